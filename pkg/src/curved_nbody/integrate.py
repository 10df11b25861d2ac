"""Adaptive, projection-stabilized integration of the Hamiltonian equations.

Each step is a Dormand--Prince 5(4) step on the first-order system
``(q, p)``, followed by re-projection of every position onto the surface and
every momentum onto its tangent plane. Steps are error-controlled with a mixed
absolute/relative max-norm. Singular configurations are treated as events: the
integration stops once ``min_{i<j} (sigma - sigma (kappa q_i.q_j)^2)`` drops
below a threshold, with the crossing time located by bisection.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import RK45

from curved_nbody import diagnostics
from curved_nbody.dynamics import SINGULAR_TOL, SystemState, pair_gaps, rhs_arrays
from curved_nbody.errors import DomainError, SingularityError
from curved_nbody.geometry import project_point, project_velocity
from curved_nbody.singularities import classify, overall_kind

# Dormand--Prince coefficients (scipy's RK45 propagates the 5th-order solution)
_A = RK45.A
_B = RK45.B
_C = RK45.C
_E = RK45.E
_P = RK45.P
_N_STAGES = RK45.n_stages

REACHED_T_END = "reached_t_end"
SINGULARITY_EVENT = "singularity_event"
STEP_UNDERFLOW = "step_underflow"
MAX_STEPS = "max_steps"

#: Smallest step before giving up.
MIN_DT = 1e-14
#: Event times are refined until the bracket is this narrow.
EVENT_TIME_TOL = 1e-10


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and limits for :func:`integrate`.

    ``event_screen`` controls when a step is searched for an interior
    crossing of the event threshold: only if the pair gap at either end of the
    step is below ``event_screen * singularity_event_threshold`` and the gap
    along the step's dense-output interpolant comes within a factor of ten of
    the threshold.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    initial_dt: float = 1e-3
    max_dt: float = np.inf
    singularity_event_threshold: float = 1e-8
    max_steps: int = 1_000_000
    event_samples: int = 8
    event_screen: float = 1e4

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "initial_dt", "max_dt", "singularity_event_threshold"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.singularity_event_threshold <= SINGULAR_TOL:
            raise DomainError("the event threshold must exceed the hard singularity tolerance")
        if self.max_steps < 1 or self.event_samples < 1:
            raise DomainError("max_steps and event_samples must be at least 1")


@dataclass(frozen=True)
class StopReason:
    """Why :func:`integrate` returned.

    ``kind`` is one of ``reached_t_end``, ``singularity_event``,
    ``step_underflow`` or ``max_steps``. For events, ``pairs`` lists the
    offending pairs and ``classification`` holds the overall kind
    (``collision``, ``antipodal`` or ``collision_antipodal``).
    """

    kind: str
    time: float
    pairs: Tuple[Tuple[int, int], ...] = ()
    classification: Optional[str] = None
    message: str = ""


@dataclass(frozen=True)
class TrajectorySample:
    time: float
    state: SystemState
    diagnostics: "diagnostics.DiagnosticsRecord" = field(repr=False)


def make_sample(state) -> TrajectorySample:
    return TrajectorySample(state.time, state, diagnostics.record(state))


# --------------------------------------------------------------------------
# single steps


class _System:
    """Flattened right-hand side for a fixed curvature and mass vector."""

    def __init__(self, kappa, masses):
        self.kappa = float(kappa)
        self.masses = np.asarray(masses, dtype=float)
        self.n = len(self.masses)

    def split(self, y):
        half = 3 * self.n
        return y[:half].reshape(self.n, 3), y[half:].reshape(self.n, 3)

    def __call__(self, y):
        q, p = self.split(y)
        qd, pd = rhs_arrays(self.kappa, self.masses, q, p)
        out = np.concatenate([qd.ravel(), pd.ravel()])
        if not np.all(np.isfinite(out)):
            raise SingularityError("non-finite derivative")
        return out

    def project(self, y):
        q, p = self.split(y)
        q = project_point(self.kappa, q)
        p = project_velocity(self.kappa, q, p)
        return q, p

    def gap(self, q):
        if self.n < 2:
            return np.inf
        return float(np.min(pair_gaps(self.kappa, q)))


def _combine(coef, K):
    """``sum_s coef[s] K[s]`` accumulated stage by stage.

    Plain elementwise operations round every component identically, so
    mirror-symmetric states stay exactly symmetric (BLAS matrix products may
    round different components differently).
    """
    acc = coef[0] * K[0]
    for c, k in zip(coef[1:], K[1:]):
        if c != 0.0:
            acc = acc + c * k
    return acc


def _dopri(f, y, dt, k1):
    """One Dormand--Prince step; returns (y_new, error vector, stage matrix)."""
    K = np.empty((_N_STAGES + 1, y.size))
    K[0] = k1
    for s in range(1, _N_STAGES):
        K[s] = f(y + dt * _combine(_A[s, :s], K[:s]))
    y_new = y + dt * _combine(_B, K[:_N_STAGES])
    K[-1] = f(y_new)
    return y_new, dt * _combine(_E, K), K


def _dense(y, dt, K, theta):
    powers = np.cumprod(np.full(_P.shape[1], theta))
    return y + dt * ((K.T @ _P) @ powers)


def _error_norm(y, y_new, err, config):
    scale = config.abs_tol + config.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def _flatten(state):
    return np.concatenate([state.q.ravel(), state.p.ravel()])


def _restate(state, q, p, t):
    return SystemState(state.curvature, state.masses, q, p, t, check=False)


def step(state, dt, config: Optional[IntegratorConfig] = None):
    """Advance ``state`` by one Dormand--Prince step of size ``dt`` and project.

    Returns
    -------
    (SystemState, float)
        The projected new state and the scaled error estimate (``<= 1``
        means the step would be accepted under ``config``).
    """
    config = config or IntegratorConfig()
    if dt < 0:
        raise DomainError("dt must be nonnegative")
    if dt == 0:
        return state, 0.0
    f = _System(state.kappa, state.masses)
    y = _flatten(state)
    y_new, err, _ = _dopri(f, y, dt, f(y))
    q, p = f.project(y_new)
    return _restate(state, q, p, state.time + dt), _error_norm(y, y_new, err, config)


def integrate_fixed(state, dt, n_steps) -> List[SystemState]:
    """Fixed-step integration (no error control, no events); returns all states."""
    f = _System(state.kappa, state.masses)
    out = [state]
    y = _flatten(state)
    for k in range(n_steps):
        y_new, _, _ = _dopri(f, y, dt, f(y))
        q, p = f.project(y_new)
        state = _restate(state, q, p, out[0].time + (k + 1) * dt)
        out.append(state)
        y = _flatten(state)
    return out


# --------------------------------------------------------------------------
# adaptive driver


_DENSE_SCREEN = 10.0
_SCREEN_THETAS = np.linspace(0.0, 1.0, 11)


def _dense_min_gap(f, y, dt, K):
    """Smallest pair gap along the step's dense-output interpolant."""
    n3 = 3 * f.n
    return min(f.gap(_dense(y, dt, K, th)[:n3].reshape(f.n, 3)) for th in _SCREEN_THETAS)


def _locate_event(f, y0, t0, dt, threshold, samples, template):
    """Find the first time in ``(t0, t0 + dt]`` where the gap drops below threshold.

    The gap is evaluated on projected single steps of size ``tau`` from the
    start of the step, which makes the result independent of the threshold
    used to trigger the search. Returns ``(time, state)`` or ``None``.
    """
    k1 = f(y0)

    def at(tau):
        y_new, _, _ = _dopri(f, y0, tau, k1)
        q, p = f.project(y_new)
        return f.gap(q), q, p

    lo = 0.0
    hi = None
    for k in range(1, samples + 1):
        tau = dt * k / samples
        g, q, p = at(tau)
        if g < threshold:
            hi, best = tau, (q, p)
            break
        lo = tau
    if hi is None:
        return None
    while hi - lo > EVENT_TIME_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g, q, p = at(mid)
        if g < threshold:
            hi, best = mid, (q, p)
        else:
            lo = mid
    return t0 + hi, _restate(template, best[0], best[1], t0 + hi)


def integrate(state, t_end, config: Optional[IntegratorConfig] = None,
              observer: Optional[Callable[[TrajectorySample], None]] = None,
              sample_times: Optional[Sequence[float]] = None):
    """Integrate from ``state.time`` to ``t_end``.

    Parameters
    ----------
    state : SystemState
    t_end : float
        Must exceed ``state.time``.
    config : IntegratorConfig, optional
    observer : callable, optional
        Called synchronously with every recorded :class:`TrajectorySample`.
    sample_times : sequence of float, optional
        If given, samples are recorded exactly at these times (steps are
        shortened to land on them) instead of after every accepted step.

    Returns
    -------
    (list of TrajectorySample, StopReason)
        The first sample is the initial state. When an event stops the run,
        the last sample is the state at the located event time.
    """
    config = config or IntegratorConfig()
    t0 = state.time
    t_end = float(t_end)
    if not t_end > t0:
        raise DomainError("t_end must be greater than the initial time")
    if sample_times is not None:
        targets = sorted(float(t) for t in sample_times if t0 < t <= t_end)
        if not targets or targets[-1] != t_end:
            targets.append(t_end)
    else:
        targets = [t_end]
    record_all = sample_times is None

    samples: List[TrajectorySample] = []

    def emit(s):
        sample = make_sample(s)
        samples.append(sample)
        if observer is not None:
            observer(sample)

    emit(state)
    f = _System(state.kappa, state.masses)
    thr = config.singularity_event_threshold

    def event_stop(ev_state):
        classes = classify(ev_state, thr * (1 + 1e-6))
        pairs = tuple(c.pair for c in classes)
        kind = overall_kind(classes)
        return StopReason(SINGULARITY_EVENT, ev_state.time, pairs, kind,
                          f"{kind} at pairs {list(pairs)}")

    gap_now = f.gap(state.q)
    if gap_now < thr:
        return samples, event_stop(state)

    y = _flatten(state)
    t = t0
    k1 = f(y)
    dt = min(config.initial_dt, config.max_dt)
    target_idx = 0
    n_steps = 0
    while True:
        target = targets[target_idx]
        h = min(dt, config.max_dt, target - t)
        landing = h == target - t
        if n_steps >= config.max_steps:
            return samples, StopReason(MAX_STEPS, t, message="step limit reached")
        if h < MIN_DT:
            return samples, StopReason(STEP_UNDERFLOW, t, message=f"dt fell to {h:.3e}")
        try:
            y_new, err, K = _dopri(f, y, h, k1)
            err_norm = _error_norm(y, y_new, err, config)
            if not np.isfinite(err_norm):
                raise SingularityError("non-finite error estimate")
        except SingularityError:
            dt = 0.25 * h
            continue
        n_steps += 1
        if err_norm > 1.0:
            dt = h * max(0.2, 0.9 * err_norm ** -0.2)
            continue

        t_new = target if landing else t + h
        q, p = f.project(y_new)
        gap_new = f.gap(q)
        if (min(gap_now, gap_new) < config.event_screen * thr
                and _dense_min_gap(f, y, h, K) < _DENSE_SCREEN * thr):
            found = _locate_event(f, y, t, h, thr, config.event_samples, state)
            if found is not None:
                ev_time, ev_state = found
                emit(ev_state)
                return samples, event_stop(ev_state)
        new_state = _restate(state, q, p, t_new)
        y = _flatten(new_state)
        try:
            k1 = f(y)
        except SingularityError:
            emit(new_state)
            return samples, event_stop(new_state)
        t, gap_now = t_new, gap_new
        proposed = h * (5.0 if err_norm == 0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2)))
        # a step shortened to hit a sample time says little about the next one
        dt = max(dt, proposed) if (landing and h < dt) else proposed
        if record_all or landing:
            emit(new_state)
        if landing:
            target_idx += 1
            if target_idx == len(targets):
                return samples, StopReason(REACHED_T_END, t)


def invariant_drift(trajectory):
    """Maximum drifts of the first integrals along a trajectory.

    Returns
    -------
    (float, float, float)
        Relative energy drift, relative angular-momentum drift (max-norm of
        ``c(t) - c(0)`` over ``|c(0)|_inf``) and the largest constraint
        residual. Drifts are absolute when the initial value is below 1e-12.
    """
    if len(trajectory) == 0:
        raise DomainError("empty trajectory")
    recs = [s.diagnostics for s in trajectory]
    e = np.array([r.energy for r in recs])
    c = np.array([r.angular_momentum for r in recs])
    e0 = abs(e[0])
    de = np.max(np.abs(e - e[0])) / (e0 if e0 >= 1e-12 else 1.0)
    c0 = np.max(np.abs(c[0]))
    dc = np.max(np.abs(c - c[0])) / (c0 if c0 >= 1e-12 else 1.0)
    res = max(r.constraint_residual for r in recs)
    return float(de), float(dc), float(res)
