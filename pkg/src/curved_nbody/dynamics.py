"""Cotangent-potential n-body dynamics on the sphere and the hyperboloid.

Units have ``G = 1``. A state stores positions ``q`` and momenta
``p = m * qdot``, both of shape ``(n, 3)``. The equations of motion are::

    q_i'' = grad_i U / m_i - kappa <q_i', q_i'> q_i

where ``grad_i`` is the gradient with respect to the metric of the ambient
space (for ``kappa < 0`` the z-partial is negated) and the second term is the
constraint force, i.e. the Lagrange multiplier
``lambda_i = -kappa m_i <q_i', q_i'>`` times ``q_i``.

Two gradient forms are provided. :func:`grad_force_function` uses the form
simplified with the constraints ``kappa <q_i, q_i> = 1`` and drives the
integrator. :func:`grad_force_function_homogeneous` keeps the unsimplified,
degree-zero homogeneous form, which is correct off the surface too and is the
one to use for finite differences and Euler's identity.
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from curved_nbody.errors import ConstraintViolation, DomainError, SingularityError
from curved_nbody.geometry import (
    Curvature,
    as_curvature,
    cross,
    inner,
    project_point,
    project_velocity,
    surface_residual,
)

#: Pairs whose gap ``sigma - sigma*c**2`` falls below this are singular.
SINGULAR_TOL = 1e-14
#: Slack used when validating constructed states.
STATE_TOL = 1e-9

_G = np.array([1.0, 1.0, -1.0])


@dataclass(frozen=True)
class Body:
    mass: float
    q: np.ndarray
    p: np.ndarray

    @property
    def velocity(self):
        return self.p / self.mass


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SystemState:
    """Immutable snapshot of an n-body system.

    Parameters
    ----------
    curvature : Curvature or float
    masses : array_like, shape (n,)
    q : array_like, shape (n, 3)
        Positions on the surface.
    p : array_like, shape (n, 3)
        Momenta ``m_i * qdot_i``, tangent at ``q_i``.
    time : float
    """

    curvature: Curvature
    masses: np.ndarray
    q: np.ndarray
    p: np.ndarray
    time: float = 0.0
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "curvature", as_curvature(self.curvature))
        m = _frozen(self.masses).reshape(-1)
        q = _frozen(self.q).reshape(-1, 3)
        p = _frozen(self.p).reshape(-1, 3)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "time", float(self.time))
        if not (len(m) == len(q) == len(p)) or len(m) == 0:
            raise DomainError("masses, q and p must describe the same n >= 1 bodies")
        if not self.check:
            return
        if np.any(~np.isfinite(m)) or np.any(m <= 0):
            raise DomainError("masses must be positive")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise DomainError("positions and momenta must be finite")
        k = self.kappa
        res = surface_residual(k, q)
        if np.any(res > STATE_TOL):
            raise ConstraintViolation(
                f"positions off the surface, max residual {res.max():.3e}")
        if k < 0 and np.any(q[:, 2] <= 0):
            raise ConstraintViolation("hyperboloid positions must have z > 0")
        tang = np.abs(inner(k, q, p)) / np.maximum(
            np.linalg.norm(q, axis=1) * np.linalg.norm(p, axis=1), 1e-300)
        if np.any(tang > STATE_TOL):
            raise ConstraintViolation(
                f"momenta not tangent, max residual {tang.max():.3e}")

    @classmethod
    def from_arrays(cls, kappa, masses, q, v=None, p=None, time=0.0, project=True):
        """Build a state from positions and velocities (or momenta).

        With ``project=True`` the positions are pushed onto the surface and
        velocities onto the tangent planes first.
        """
        kappa = as_curvature(kappa)
        masses = np.asarray(masses, dtype=float).reshape(-1)
        q = np.asarray(q, dtype=float).reshape(-1, 3)
        if p is None:
            v = np.zeros_like(q) if v is None else np.asarray(v, dtype=float).reshape(-1, 3)
            p = masses[:, None] * v
        elif v is not None:
            raise DomainError("give either velocities or momenta, not both")
        p = np.asarray(p, dtype=float).reshape(-1, 3)
        if project:
            q = project_point(kappa, q)
            p = project_velocity(kappa, q, p)
        return cls(kappa, masses, q, p, time)

    @property
    def kappa(self) -> float:
        return self.curvature.kappa

    @property
    def sigma(self) -> int:
        return self.curvature.sigma

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def velocities(self):
        return self.p / self.masses[:, None]

    @property
    def bodies(self) -> List[Body]:
        return [Body(float(m), q, p) for m, q, p in zip(self.masses, self.q, self.p)]

    def replace(self, **changes):
        return replace(self, **changes)

    def __eq__(self, other):
        if not isinstance(other, SystemState):
            return NotImplemented
        return (self.curvature == other.curvature and self.time == other.time
                and np.array_equal(self.masses, other.masses)
                and np.array_equal(self.q, other.q) and np.array_equal(self.p, other.p))

    __hash__ = None


@dataclass(frozen=True)
class FirstIntegrals:
    """Energy ``h = T - U`` and total angular momentum ``c``."""

    energy_h: float
    angular_momentum_c: np.ndarray
    kinetic_T: float
    potential_U: float

    def __post_init__(self):
        if abs(self.energy_h - (self.kinetic_T - self.potential_U)) > 1e-12 * max(
                1.0, abs(self.kinetic_T), abs(self.potential_U)):
            raise DomainError("energy_h must equal kinetic_T - potential_U")


# --------------------------------------------------------------------------
# pair quantities


def _pair_tables(kappa, q):
    """Pairwise quantities, evaluated without cancellation near singular pairs.

    Returns ``(c, gap, nrm, d, s, qd)``: the normalized cosines
    ``c_ij = kappa <q_i,q_j> / sqrt(kappa<q_i,q_i> kappa<q_j,q_j>)``, the gaps
    ``sigma - sigma c_ij^2`` (inf on the diagonal), the norms ``kappa <q_i,q_i>``, the differences
    ``d_ij = q_j - s_ij q_i``, the signs ``s_ij = sign(c_ij)`` and the
    products ``qd_ij = <q_i, d_ij>``.

    The gap comes from the Lagrange identity
    ``gap = sigma kappa^2 (<q_i,q_i><d,d> - <q_i,d>^2) / (kappa<q_i,q_i> kappa<q_j,q_j>)``
    with ``d = d_ij``. Since ``d_ij`` is an exact difference of nearby floats
    and ``<q_i,d_ij>^2`` is of fourth order in ``|d_ij|``, the gap keeps full
    relative precision as a pair approaches a collision (or an antipodal
    position).
    """
    q = np.asarray(q, dtype=float)
    sigma = 1.0 if kappa > 0 else -1.0
    metric = _METRIC[sigma]
    dots = np.sum((q * metric)[:, None, :] * q[None, :, :], axis=-1)
    self_dots = dots.diagonal()
    nrm = kappa * self_dots
    scale2 = nrm[:, None] * nrm[None, :]
    c = kappa * dots / np.sqrt(scale2)
    s = np.where(c < 0, -1.0, 1.0)
    d = q[None, :, :] - s[:, :, None] * q[:, None, :]
    dm = d * metric
    dd = np.einsum("ijk,ijk->ij", dm, d)
    qd = np.einsum("ik,ijk->ij", q, dm)
    gap = (sigma * kappa * kappa) * (self_dots[:, None] * dd - qd * qd) / scale2
    np.fill_diagonal(gap, np.inf)
    return c, gap, nrm, d, s, qd


_METRIC = {1.0: np.array([1.0, 1.0, 1.0]), -1.0: np.array([1.0, 1.0, -1.0])}


def _check_singular(kappa, q, c, gap):
    if len(q) < 2 or gap.min() > SINGULAR_TOL:
        return
    n = len(q)
    iu = np.triu_indices(n, 1)
    bad = gap[iu] <= SINGULAR_TOL
    if np.any(bad):
        from curved_nbody.singularities import kind_of_pairs

        pairs = [(int(i), int(j)) for i, j, b in zip(iu[0], iu[1], bad) if b]
        kind = kind_of_pairs(kappa, c, pairs)
        raise SingularityError(
            f"singular configuration ({kind}) at pairs {pairs}", pairs=pairs, kind=kind)


def pair_gaps(state_or_kappa, q=None):
    """Matrix of ``sigma - sigma (kappa q_i.q_j)^2`` (normalized); diagonal is inf."""
    if q is None:
        kappa, q = state_or_kappa.kappa, state_or_kappa.q
    else:
        kappa = float(as_curvature(state_or_kappa).kappa)
    return _pair_tables(kappa, q)[1]


def min_pair_gap(state) -> float:
    if state.n < 2:
        return float("inf")
    return float(np.min(pair_gaps(state)))


# --------------------------------------------------------------------------
# potential and gradients


def force_function_arrays(kappa, masses, q):
    """Force function ``U`` from raw arrays (homogeneous of degree zero in q)."""
    kappa = float(kappa)
    q = np.asarray(q, dtype=float)
    masses = np.asarray(masses, dtype=float)
    c, gap = _pair_tables(kappa, q)[:2]
    _check_singular(kappa, q, c, gap)
    iu = np.triu_indices(len(q), 1)
    mm = np.outer(masses, masses)[iu]
    return float(np.sum(mm * np.sqrt(abs(kappa)) * c[iu] / np.sqrt(gap[iu])))


def force_function(state) -> float:
    """Force function ``U = sum_{i<j} m_i m_j ctn_kappa(d_ij)``."""
    return force_function_arrays(state.kappa, state.masses, state.q)


def gradient_arrays(kappa, masses, q):
    """Constraint-simplified gradients for all bodies, shape ``(n, 3)``.

    ``sum_j m_i m_j (sigma kappa)^{3/2} [q_j - (kappa q_i.q_j) q_i] / gap_ij^{3/2}``
    """
    kappa = float(kappa)
    q = np.asarray(q, dtype=float)
    masses = np.asarray(masses, dtype=float)
    n = len(q)
    if n < 2:
        return np.zeros_like(q)
    c, gap, _, d, _, qd = _pair_tables(kappa, q)
    _check_singular(kappa, q, c, gap)
    w = (masses[:, None] * masses[None, :] * abs(kappa) ** 1.5) / (gap * np.sqrt(gap))
    # q_j - c_ij q_i is the tangential part of q_j at q_i, which equals the
    # tangential part of d_ij; projecting the exact difference d_ij avoids the
    # cancellation that the direct form suffers near singular pairs
    return np.einsum("ij,ijk->ik", w, d) - (kappa * np.einsum("ij,ij->i", w, qd))[:, None] * q


def grad_force_function(state, i: Optional[int] = None):
    """Gradient of ``U`` with respect to ``q_i`` (all bodies if ``i`` is None).

    This is the vector on the right-hand side of the equations of motion: for
    ``kappa < 0`` the z-partial derivative carries the Lorentz sign.
    """
    g = gradient_arrays(state.kappa, state.masses, state.q)
    return g if i is None else g[i]


def homogeneous_gradient_arrays(kappa, masses, q):
    """Unsimplified, homogeneous gradient; valid at off-surface scalings of q."""
    kappa = float(kappa)
    sigma = 1.0 if kappa > 0 else -1.0
    q = np.asarray(q, dtype=float)
    masses = np.asarray(masses, dtype=float)
    n = len(q)
    if n < 2:
        return np.zeros_like(q)
    c, gap, nrm = _pair_tables(kappa, q)[:3]
    _check_singular(kappa, q, c, gap)
    dots = inner(kappa, q[:, None, :], q[None, :, :])
    np.fill_diagonal(gap, np.inf)
    scale = np.sqrt(np.outer(nrm, nrm))
    w = np.outer(masses, masses) * np.sqrt(abs(kappa)) / (scale * gap ** 1.5)
    coef_i = sigma * kappa * kappa * dots / nrm[:, None]
    return sigma * kappa * (w @ q) - (w * coef_i).sum(axis=1)[:, None] * q


def grad_force_function_homogeneous(state_or_kappa, i=None, masses=None, q=None):
    """Homogeneous-form gradient. Accepts a state, or ``(kappa, masses=, q=)``."""
    if masses is None:
        kappa, masses, q = state_or_kappa.kappa, state_or_kappa.masses, state_or_kappa.q
    else:
        kappa = float(as_curvature(state_or_kappa).kappa)
    g = homogeneous_gradient_arrays(kappa, masses, q)
    return g if i is None else g[i]


def euclidean_gradient(kappa, masses, q):
    """Plain partial derivatives ``dU/dq`` (undoes the Lorentz sign flip)."""
    g = homogeneous_gradient_arrays(kappa, masses, q)
    return g * _G if float(kappa) < 0 else g


# --------------------------------------------------------------------------
# equations of motion


def rhs_arrays(kappa, masses, q, p):
    """Hamiltonian vector field ``(qdot, pdot)`` from raw arrays."""
    kappa = float(kappa)
    masses = np.asarray(masses, dtype=float)
    grad = gradient_arrays(kappa, masses, q)
    qdot = p / masses[:, None]
    pp = inner(kappa, p, p)
    pdot = grad - (kappa * pp / masses)[:, None] * q
    return qdot, pdot


def hamiltonian_rhs(state):
    """``qdot_i = p_i/m_i`` and ``pdot_i = grad_i U - kappa m_i^{-1} <p_i,p_i> q_i``."""
    return rhs_arrays(state.kappa, state.masses, state.q, state.p)


def acceleration(state):
    """Second derivatives ``q_i''`` of all positions, shape ``(n, 3)``."""
    _, pdot = hamiltonian_rhs(state)
    return pdot / state.masses[:, None]


# --------------------------------------------------------------------------
# first integrals


def kinetic_energy(state) -> float:
    """``T = sum <p_i, p_i> / (2 m_i)``.

    The Hamiltonian form multiplies each term by ``kappa <q_i, q_i>``, which is
    identically one on the surface; it is left out here.
    """
    return float(np.sum(inner(state.kappa, state.p, state.p) / (2.0 * state.masses)))


def energy(state) -> float:
    return kinetic_energy(state) - force_function(state)


def angular_momentum_per_body(state):
    """Per-body ``L_i = q_i (x) p_i``, shape ``(n, 3)``."""
    return cross(state.kappa, state.q, state.p)


def angular_momentum(state):
    return angular_momentum_per_body(state).sum(axis=0)


def first_integrals(state) -> FirstIntegrals:
    t = kinetic_energy(state)
    u = force_function(state)
    return FirstIntegrals(t - u, angular_momentum(state), t, u)
