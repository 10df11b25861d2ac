"""Moments of inertia, per-sample diagnostics and the geodesic Saari classifier.

``I = sum m_i (x_i^2 + y_i^2)`` measures rotation about the z axis (both
surfaces); ``J = sum m_i (y_i^2 - z_i^2)`` measures hyperbolic rotation about
the x axis of the hyperboloid.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from curved_nbody.dynamics import (
    angular_momentum,
    angular_momentum_per_body,
    energy,
    euclidean_gradient,
    force_function_arrays,
    min_pair_gap,
)
from curved_nbody.errors import DomainError
from curved_nbody.geometry import distance, surface_residual, tangent_residual

ELLIPTIC = "elliptic_about_z"
HYPERBOLIC = "hyperbolic_about_x"

RELATIVE_EQUILIBRIUM = "relative_equilibrium"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DiagnosticsRecord:
    energy: float
    angular_momentum: np.ndarray
    moment_I: float
    moment_J: Optional[float]
    min_pair_gap: float
    constraint_residual: float


def constraint_residual(state) -> float:
    """Largest surface or tangency residual over all bodies."""
    k = state.kappa
    return float(max(np.max(surface_residual(k, state.q)),
                     np.max(tangent_residual(k, state.q, state.p))))


def record(state) -> DiagnosticsRecord:
    return DiagnosticsRecord(
        energy=energy(state),
        angular_momentum=angular_momentum(state),
        moment_I=moment_inertia_I(state),
        moment_J=moment_inertia_J(state) if state.kappa < 0 else None,
        min_pair_gap=min_pair_gap(state),
        constraint_residual=constraint_residual(state),
    )


# --------------------------------------------------------------------------
# moments of inertia


def moments_I(state):
    q = state.q
    return state.masses * (q[:, 0] ** 2 + q[:, 1] ** 2)


def moments_J(state):
    if state.kappa > 0:
        raise DomainError("J is defined for negative curvature only")
    q = state.q
    return state.masses * (q[:, 1] ** 2 - q[:, 2] ** 2)


def moment_inertia_I(state) -> float:
    return float(np.sum(moments_I(state)))


def moment_inertia_J(state) -> float:
    return float(np.sum(moments_J(state)))


# --------------------------------------------------------------------------
# alignment


def geodesic_alignment(state, tol=1e-9):
    """Whether all positions lie in one plane through the origin.

    Returns
    -------
    (bool, ndarray)
        The verdict (smallest singular value of the position matrix below
        ``tol`` times ``max(1, largest singular value)``) and a unit normal
        of the best-fitting plane.
    """
    q = np.asarray(state.q)
    if len(q) < 2:
        raise DomainError("alignment needs at least two bodies")
    _, s, vt = np.linalg.svd(q, full_matrices=True)
    normal = vt[-1]
    smallest = s[2] if len(s) == 3 else 0.0
    return bool(smallest < tol * max(1.0, s[0])), normal


# --------------------------------------------------------------------------
# Saari classifier


@dataclass
class SaariVerdict:
    """Outcome of :func:`saari_classify`.

    ``constants`` holds the per-body heights ``z_i`` (elliptic mode) or
    ``x_i`` (hyperbolic mode) when the verdict is a relative equilibrium.
    """

    verdict: str
    omega: Optional[float] = None
    constants: Optional[np.ndarray] = None
    failed_check: Optional[str] = None
    evidence: dict = field(default_factory=dict)

    @property
    def is_relative_equilibrium(self) -> bool:
        return self.verdict == RELATIVE_EQUILIBRIUM


def _states(trajectory):
    return [getattr(s, "state", s) for s in trajectory]


def _rel_spread(values, scale=None):
    values = np.asarray(values, dtype=float)
    ref = np.max(np.abs(values[0])) if scale is None else scale
    spread = np.max(np.abs(values - values[0]))
    return float(spread / max(ref, 1.0))


def _fit_rate(t, angle):
    """Least-squares slope of an angle series and the max residual."""
    A = np.vstack([t, np.ones_like(t)]).T
    coef, *_ = np.linalg.lstsq(A, angle, rcond=None)
    return float(coef[0]), float(np.max(np.abs(A @ coef - angle)))


def pairwise_distance_drift(states) -> float:
    """Largest change of any mutual distance relative to the first state."""
    n = states[0].n
    k = states[0].kappa
    iu = np.triu_indices(n, 1)
    d = np.array([distance(k, s.q[iu[0]], s.q[iu[1]]) for s in states])
    return float(np.max(np.abs(d - d[0]))) if d.size else 0.0


def saari_classify(trajectory, mode=ELLIPTIC, moment_tol=1e-7, fit_tol=1e-7,
                   distance_tol=1e-6) -> SaariVerdict:
    """Decide whether an aligned, constant-moment solution is a relative equilibrium.

    The checks follow the chain: bodies aligned on a geodesic through every
    sample; the moment (``I`` or ``J``) constant; each body's angular-momentum
    component about the axis constant; each body's own moment constant; a
    single angular (or rapidity) rate shared by all bodies. As a last guard
    the mutual distances must not drift.

    Parameters
    ----------
    trajectory : sequence of TrajectorySample or SystemState
    mode : {"elliptic_about_z", "hyperbolic_about_x"}
    """
    states = _states(trajectory)
    if len(states) < 3:
        raise DomainError("the classifier needs at least three samples")
    if mode not in (ELLIPTIC, HYPERBOLIC):
        raise DomainError(f"unknown mode {mode!r}")
    if mode == HYPERBOLIC and states[0].kappa > 0:
        raise DomainError("hyperbolic rotations exist only for negative curvature")
    t = np.array([s.time for s in states])
    ev = {}

    def fail(check, **info):
        ev.update(info)
        return SaariVerdict(INCONCLUSIVE, failed_check=check, evidence=ev)

    aligned = [geodesic_alignment(s)[0] for s in states]
    if not all(aligned):
        return fail("geodesic_alignment", first_unaligned=int(np.argmin(aligned)))

    if mode == ELLIPTIC:
        per_moment = np.array([moments_I(s) for s in states])
        axis = 2
    else:
        per_moment = np.array([moments_J(s) for s in states])
        axis = 0
    total = per_moment.sum(axis=1)
    ev["moment_drift"] = _rel_spread(total)
    if ev["moment_drift"] > moment_tol:
        return fail("moment_constant")

    L = np.array([angular_momentum_per_body(s)[:, axis] for s in states])
    ev["body_momentum_drift"] = _rel_spread(L, scale=np.max(np.abs(L)))
    if ev["body_momentum_drift"] > moment_tol:
        return fail("body_angular_momentum_constant")

    ev["body_moment_drift"] = _rel_spread(per_moment, scale=np.max(np.abs(per_moment)))
    if ev["body_moment_drift"] > moment_tol:
        return fail("body_moment_constant")

    Q = np.array([s.q for s in states])  # (samples, n, 3)
    if mode == ELLIPTIC:
        weight = per_moment[0]
        angles = np.unwrap(np.arctan2(Q[:, :, 1], Q[:, :, 0]), axis=0)
        constants = Q[0, :, 2].copy()
    else:
        # distance of (y, z) from the x axis, in the Lorentz sense
        weight = Q[0, :, 2] ** 2 - Q[0, :, 1] ** 2
        angles = 0.5 * np.log((Q[:, :, 2] + Q[:, :, 1]) / (Q[:, :, 2] - Q[:, :, 1]))
        constants = Q[0, :, 0].copy()
    ref = int(np.argmax(np.abs(weight)))
    omega, resid = _fit_rate(t, angles[:, ref])
    ev["omega_fit_residual"] = resid
    if resid > fit_tol:
        return fail("common_omega", reference_body=ref)
    # every body off the axis must share the rate
    movable = np.abs(weight) > 1e-9 * np.max(np.abs(weight))
    rates = [_fit_rate(t, angles[:, i]) for i in np.flatnonzero(movable)]
    spread = max(abs(r - omega) for r, _ in rates)
    ev["omega_spread"] = spread
    if spread > fit_tol or max(res for _, res in rates) > fit_tol:
        return fail("common_omega", reference_body=ref)

    ev["distance_drift"] = pairwise_distance_drift(states)
    if ev["distance_drift"] > distance_tol:
        return fail("distance_guard")
    return SaariVerdict(RELATIVE_EQUILIBRIUM, omega=omega, constants=constants, evidence=ev)


# --------------------------------------------------------------------------
# gradient oracle


def finite_difference_gradient_check(state, step=1e-6) -> float:
    """Worst relative error between central differences and the analytic gradient.

    Differences are taken along the ambient axes of the homogeneous
    (extended-distance) force function, and compared with its plain partial
    derivatives. The error is relative to the largest gradient component, or
    absolute when every component is below 1e-12.
    """
    if not step > 0:
        raise DomainError("step must be positive")
    k, m = state.kappa, state.masses
    q = np.array(state.q, dtype=float)
    analytic = euclidean_gradient(k, m, q)
    fd = np.zeros_like(q)
    for i in range(len(q)):
        for a in range(3):
            qp = q.copy()
            qm = q.copy()
            qp[i, a] += step
            qm[i, a] -= step
            fd[i, a] = (force_function_arrays(k, m, qp) - force_function_arrays(k, m, qm)) / (2 * step)
    scale = np.max(np.abs(analytic))
    err = np.max(np.abs(fd - analytic))
    return float(err / scale if scale >= 1e-12 else err)


def conservation_report(trajectory) -> dict:
    """Drifts of energy, angular momentum, I (and J) and the constraint residual."""
    from curved_nbody.integrate import invariant_drift

    de, dc, res = invariant_drift(trajectory)
    recs = [s.diagnostics for s in trajectory]
    out = {"energy_drift": de, "angular_momentum_drift": dc, "constraint_residual": res,
           "I_drift": _rel_spread([r.moment_I for r in recs])}
    if recs[0].moment_J is not None:
        out["J_drift"] = _rel_spread([r.moment_J for r in recs])
    out["min_pair_gap"] = float(min(r.min_pair_gap for r in recs))
    return out
