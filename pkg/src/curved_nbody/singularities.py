"""Singular configurations and the symmetric isosceles scenarios on the sphere.

A pair ``(i, j)`` is singular when ``sigma - sigma (kappa q_i.q_j)^2`` vanishes.
On the sphere this happens for collisions (``kappa q_i.q_j = +1``) and for
antipodal pairs (``kappa q_i.q_j = -1``); on the hyperboloid only collisions
exist. A collision pair whose bodies are both antipodal to a third body is a
collision-antipodal configuration.

The isosceles family places equal masses ``M`` at ``(-x, y, 0)`` and
``(x, y, 0)`` and a mass ``m`` at ``(0, -1, 0)``, all at rest. By symmetry the
third body never moves and the motion of the second body ``(x(t), y(t))``
obeys a planar system in which the energy has been eliminated.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from curved_nbody.errors import DomainError, SingularityError

COLLISION = "collision"
ANTIPODAL = "antipodal"
COLLISION_ANTIPODAL = "collision_antipodal"

TOWARD_10 = "toward_(1,0)"
TOWARD_01 = "toward_(0,1)"
NO_FORCE = "no_force"
IMPOSSIBLE = "impossible"


@dataclass(frozen=True)
class SingularityClassification:
    pair: Tuple[int, int]
    kind: str
    proximity: float


def _base_kind(kappa, c):
    return COLLISION if (kappa < 0 or c > 0) else ANTIPODAL


def _upgrade(kappa, c, pairs):
    """Per-pair kinds, marking pairs that take part in a collision-antipodal triple."""
    base = {p: _base_kind(kappa, c[p]) for p in pairs}
    kinds = dict(base)
    for p, kp in base.items():
        for r, kr in base.items():
            if p >= r or not set(p) & set(r):
                continue
            # two antipodal pairs sharing a body: the other two bodies collide;
            # a collision pair sharing a body with an antipodal pair likewise
            if ANTIPODAL in (kp, kr):
                kinds[p] = kinds[r] = COLLISION_ANTIPODAL
    return kinds


def kind_of_pairs(kappa, c, pairs) -> str:
    """Overall kind of a set of singular pairs given the cosine matrix ``c``."""
    kinds = set(_upgrade(kappa, np.asarray(c), [tuple(p) for p in pairs]).values())
    for k in (COLLISION_ANTIPODAL, ANTIPODAL, COLLISION):
        if k in kinds:
            return k
    return COLLISION


def classify(state, threshold=1e-8) -> List[SingularityClassification]:
    """All pairs within ``threshold`` of the singular set, with their kind."""
    from curved_nbody.dynamics import _pair_tables

    if threshold <= 0:
        raise DomainError("threshold must be positive")
    kappa = state.kappa
    c, gap = _pair_tables(kappa, state.q)[:2]
    n = state.n
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if gap[i, j] < threshold]
    kinds = _upgrade(kappa, c, pairs)
    return [SingularityClassification(p, kinds[p], float(gap[p])) for p in pairs]


def overall_kind(classes: List[SingularityClassification]) -> str:
    kinds = {c.kind for c in classes}
    for k in (COLLISION_ANTIPODAL, ANTIPODAL, COLLISION):
        if k in kinds:
            return k
    return COLLISION


# --------------------------------------------------------------------------
# direction of the force along the geodesic z = 0


def direction_on_geodesic(x, y, xdd, ydd) -> str:
    """Which way a body at rest at ``(x, y)`` in the first quadrant is pulled.

    Cases: ``xdd > 0 > ydd`` pulls toward (1, 0); ``xdd < 0 < ydd`` toward
    (0, 1); both nonpositive compares ``ydd/xdd`` with ``y/x`` (greater: toward
    (1, 0), smaller: toward (0, 1), equal: no force); both positive is
    impossible. The slope comparison is done in the cross-multiplied form
    ``xdd*y - ydd*x`` (the tangential component toward (1, 0)), which also
    covers ``xdd = 0``. An acceleration with a positive component and a
    vanishing one points off the circle and is reported as impossible too.
    """
    if not (x > 0 and y > 0):
        raise DomainError("the body must lie in the open first quadrant")
    if xdd > 0 and ydd < 0:
        return TOWARD_10
    if xdd < 0 and ydd > 0:
        return TOWARD_01
    if xdd <= 0 and ydd <= 0:
        s = xdd * y - ydd * x
        if s > 0:
            return TOWARD_10
        if s < 0:
            return TOWARD_01
        return NO_FORCE
    return IMPOSSIBLE


# --------------------------------------------------------------------------
# isosceles scenarios

_CASE_RATIOS = {"8m": 8.0, "2m": 2.0, "4m": 4.0}


def _normalize_case(case):
    key = str(case).replace("M=", "").replace(" ", "")
    if key in _CASE_RATIOS or key == "custom":
        return key
    raise DomainError(f"unknown isosceles case {case!r}; use '8m', '2m', '4m' or 'custom'")


def _mass_M(case, m, M):
    case = _normalize_case(case)
    if case == "custom":
        if M is None or M <= 0:
            raise DomainError("the custom case needs a positive M")
        return case, float(M)
    return case, _CASE_RATIOS[case] * m


@dataclass(frozen=True)
class IsoscelesScenario:
    """Equal masses ``M`` at ``(-x0, y0, 0)``, ``(x0, y0, 0)`` and ``m`` at ``(0, -1, 0)``."""

    case: str
    mass_M: float
    mass_m: float
    x0: float

    @property
    def y0(self) -> float:
        return float(np.sqrt(1.0 - self.x0 ** 2))

    @property
    def energy_h(self) -> float:
        """Energy ``T - U`` of the full system (the bodies start at rest)."""
        from curved_nbody.dynamics import energy

        return energy(self.state())

    def state(self):
        from curved_nbody.dynamics import SystemState

        x, y = self.x0, self.y0
        q = np.array([[-x, y, 0.0], [x, y, 0.0], [0.0, -1.0, 0.0]])
        masses = [self.mass_M, self.mass_M, self.mass_m]
        return SystemState(1.0, masses, q, np.zeros((3, 3)))

    def reduced_rhs(self, x, y, h=None):
        h = self.energy_h if h is None else h
        return reduced_rhs(self.case, x, y, h, self.mass_m, self.mass_M)

    def initial_accelerations(self):
        """``(xdd(0), ydd(0))`` of the second body, from the rest start."""
        x, y, M, m = self.x0, self.y0, self.mass_M, self.mass_m
        f = M / (4.0 * y * y) - m
        return -(y / (x * x)) * f, f / x


def isosceles_scenario(case, x0, m=1.0, M=None) -> IsoscelesScenario:
    case, M = _mass_M(case, m, M)
    if m <= 0:
        raise DomainError("m must be positive")
    if not (0.0 < x0 < 1.0):
        raise DomainError(f"x0 must lie in (0, 1), got {x0!r}")
    if case == "4m" and not x0 < 1.0 / np.sqrt(3.0):
        raise DomainError("the M=4m collision case needs x0 < 1/sqrt(3)")
    return IsoscelesScenario(case, M, float(m), float(x0))


def make_isosceles(case, x0, m=1.0, M=None):
    """Full three-body :class:`SystemState` for an isosceles scenario."""
    return isosceles_scenario(case, x0, m, M).state()


def reduced_rhs(case, x, y, h, m=1.0, M=None):
    """Accelerations ``(xdd, ydd)`` of the second body in the reduced system.

    ``h`` is the energy of the full system. For the named cases the
    specialised closed forms are used; ``custom`` uses the general form.
    """
    case, M = _mass_M(case, m, M)
    if x == 0 or y == 0:
        raise SingularityError("the reduced system is singular at x = 0 or y = 0",
                               pairs=[(0, 1)], kind=COLLISION_ANTIPODAL)
    if case == "8m":
        xdd = 6 * m * x * x / y - 3 * m / y - m / (x * x * y) - h * x / (8 * m)
        ydd = 2 * m / (x * y * y) + 3 * m / x - 6 * m * y * y / x - h * y / (8 * m)
    elif case == "2m":
        xdd = m / (2 * x * x * y) - h * x / (2 * m)
        ydd = m / (2 * x * y * y) - h * y / (2 * m)
    elif case == "4m":
        xdd = m * (2 * x * x - 1) / y - h * x / (4 * m)
        ydd = m * x * (2 * y * y + 1) / (y * y) - h * y / (4 * m)
    else:
        a = M - 2 * m
        xdd = (4 * a * x ** 4 - 2 * a * x * x - M + 4 * m) / (4 * x * x * y) - h * x / M
        ydd = (M + 2 * a * y * y - 4 * a * y ** 4) / (4 * x * y * y) - h * y / M
    return xdd, ydd


def reduced_speed_sq(case, x, y, h, m=1.0, M=None):
    """``xdot^2 + ydot^2`` implied by the energy integral of the reduced system."""
    case, M = _mass_M(case, m, M)
    return h / M - 2 * m * y / x + M * (2 * y * y - 1) / (2 * x * y)


def reduced_energy_residual(case, x, y, xd, yd, h, m=1.0, M=None):
    """Left side minus right side of the energy integral of the reduced system."""
    return xd * xd + yd * yd - reduced_speed_sq(case, x, y, h, m, M)


def integrate_reduced(scenario: IsoscelesScenario, t_eval, rtol=1e-12, atol=1e-14):
    """Integrate the reduced planar system from rest.

    Returns an array of shape ``(len(t_eval), 4)`` with ``x, y, xdot, ydot``.
    """
    h = scenario.energy_h
    t_eval = np.asarray(t_eval, dtype=float)

    def f(_, u):
        xdd, ydd = reduced_rhs(scenario.case, u[0], u[1], h, scenario.mass_m, scenario.mass_M)
        return [u[2], u[3], xdd, ydd]

    sol = solve_ivp(f, (0.0, float(t_eval[-1])), [scenario.x0, scenario.y0, 0.0, 0.0],
                    method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol)
    if not sol.success:
        raise SingularityError(f"reduced integration failed: {sol.message}",
                               pairs=[(0, 1)], kind=COLLISION_ANTIPODAL)
    return sol.y.T
