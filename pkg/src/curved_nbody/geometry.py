"""Unified circular/hyperbolic geometry for surfaces of constant curvature.

Points live in ambient 3-space: on the sphere ``x^2 + y^2 + z^2 = 1/kappa``
for ``kappa > 0`` and on the upper sheet (``z > 0``) of the hyperboloid
``x^2 + y^2 - z^2 = 1/kappa`` for ``kappa < 0``. The hyperboloid carries the
Lorentz inner product ``a_x b_x + a_y b_y - a_z b_z``.

All vector arguments are array-likes whose last axis has length 3, so the
helpers broadcast over stacks of vectors.
"""

from dataclasses import dataclass, replace

import numpy as np

from curved_nbody.errors import ConstraintViolation, DomainError

#: Slack allowed on inverse-trig arguments before clamping turns into an error.
CLAMP_TOL = 1e-10

_EPS = np.finfo(float).eps
_LORENTZ = np.array([1.0, 1.0, -1.0])


@dataclass(frozen=True)
class Curvature:
    """Nonzero Gaussian curvature ``kappa`` and its sign ``sigma``."""

    kappa: float

    def __post_init__(self):
        k = float(self.kappa)
        if not np.isfinite(k) or k == 0.0:
            raise DomainError(f"curvature must be finite and nonzero, got {self.kappa!r}")
        object.__setattr__(self, "kappa", k)

    @property
    def sigma(self) -> int:
        return 1 if self.kappa > 0 else -1

    @property
    def radius(self) -> float:
        """``|kappa|**-1/2``, the length scale of the surface."""
        return abs(self.kappa) ** -0.5

    def __float__(self):
        return self.kappa


def as_curvature(kappa) -> Curvature:
    if isinstance(kappa, Curvature):
        return kappa
    return Curvature(float(kappa))


def _kval(kappa) -> float:
    return kappa.kappa if isinstance(kappa, Curvature) else float(kappa)


# --------------------------------------------------------------------------
# kappa-trigonometry


def kappa_sn(kappa, x):
    """kappa-sine: ``sin(sqrt(k) x)/sqrt(k)``, ``x`` or ``sinh(sqrt(-k) x)/sqrt(-k)``."""
    k = _kval(kappa)
    x = np.asarray(x, dtype=float)
    if k > 0:
        s = np.sqrt(k)
        out = np.sin(s * x) / s
    elif k < 0:
        s = np.sqrt(-k)
        out = np.sinh(s * x) / s
    else:
        out = x.copy()
    return out[()] if out.ndim == 0 else out


def kappa_csn(kappa, x):
    """kappa-cosine: ``cos(sqrt(k) x)``, ``1`` or ``cosh(sqrt(-k) x)``."""
    k = _kval(kappa)
    x = np.asarray(x, dtype=float)
    if k > 0:
        out = np.cos(np.sqrt(k) * x)
    elif k < 0:
        out = np.cosh(np.sqrt(-k) * x)
    else:
        out = np.ones_like(x)
    return out[()] if out.ndim == 0 else out


def kappa_tn(kappa, x):
    return kappa_sn(kappa, x) / kappa_csn(kappa, x)


def kappa_ctn(kappa, x):
    """kappa-cotangent ``csn/sn``; raises :class:`DomainError` at its poles."""
    k = _kval(kappa)
    xa = np.asarray(x, dtype=float)
    if k > 0:
        turns = xa * np.sqrt(k) / np.pi
        at_pole = np.abs(turns - np.round(turns)) < 1e-12
    else:
        at_pole = xa == 0.0
    if np.any(at_pole):
        raise DomainError(f"ctn_kappa has a pole at x={x!r} for kappa={k}")
    return kappa_csn(k, xa) / kappa_sn(k, xa)


# --------------------------------------------------------------------------
# products and distances


def inner(kappa, a, b):
    """Euclidean dot product for ``kappa > 0``, Lorentz product for ``kappa < 0``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    zz = a[..., 2] * b[..., 2]
    xy = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
    return xy + zz if _kval(kappa) > 0 else xy - zz


def cross(kappa, a, b):
    """Cross product; for ``kappa < 0`` the z-component is ``a_y b_x - a_x b_y``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ax, ay, az = a[..., 0], a[..., 1], a[..., 2]
    bx, by, bz = b[..., 0], b[..., 1], b[..., 2]
    cz = ax * by - ay * bx
    if _kval(kappa) < 0:
        cz = -cz
    return np.stack(np.broadcast_arrays(ay * bz - az * by, az * bx - ax * bz, cz), axis=-1)


def pair_gap(kappa, a, b):
    """``sigma - sigma*c**2`` with ``c`` the normalized ``kappa a.b``.

    Zero exactly on the singular set (collisions, and antipodal pairs on the
    sphere). Evaluated through the Lagrange identity
    ``(a.a)(b.b) - (a.b)^2 = sigma (a x b).(a x b)`` which keeps full relative
    precision when the two points nearly coincide.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = cross(kappa, a, b)
    return inner(kappa, c, c) / (inner(kappa, a, a) * inner(kappa, b, b))


def _check_cos_arg(k, arg):
    if k > 0:
        bad = np.abs(arg) > 1.0 + CLAMP_TOL
    else:
        bad = arg < 1.0 - CLAMP_TOL
    if np.any(bad):
        raise ConstraintViolation(
            f"inverse-trig argument {arg!r} is out of range; inputs are off the surface"
        )


def distance(kappa, a, b):
    """Geodesic distance between two points on the surface.

    The inverse-cosine argument is validated against ``[-1, 1]`` (or
    ``[1, inf)`` on the hyperboloid) with slack ``CLAMP_TOL``; the value is
    then computed with the better-conditioned ``atan2``/``asinh`` forms.
    """
    k = _kval(kappa)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_cos_arg(k, k * inner(k, a, b))
    return distance_extended(k, a, b)


def distance_extended(kappa, a, b):
    """Distance formula normalized by ``sqrt(kappa a.a)``; valid off the surface.

    Requires ``kappa * inner(a, a) > 0`` and the same for ``b``.
    """
    k = _kval(kappa)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = k * inner(k, a, a)
    nb = k * inner(k, b, b)
    if np.any(na <= 0) or np.any(nb <= 0):
        raise DomainError("distance_extended needs kappa*<a,a> > 0 and kappa*<b,b> > 0")
    c = cross(k, a, b)
    sin_part = np.sqrt(np.maximum(inner(k, c, c), 0.0))
    if k > 0:
        # |a x b| and a.b are both |a||b| times sin/cos of the angle
        d = np.arctan2(sin_part, np.sum(a * b, axis=-1)) / np.sqrt(k)
    else:
        d = np.arcsinh(sin_part / np.sqrt(inner(k, a, a) * inner(k, b, b))) / np.sqrt(-k)
    return d[()] if np.ndim(d) == 0 else d


# --------------------------------------------------------------------------
# projections


def project_point(kappa, a):
    """Rescale ``a`` onto the surface. Points already on it are returned as is."""
    k = _kval(kappa)
    a = np.array(a, dtype=float)
    n = k * inner(k, a, a)
    if np.any(n <= 0):
        raise DomainError(f"cannot project {a!r} onto the surface of curvature {k}")
    if k < 0 and np.any(a[..., 2] <= 0):
        raise DomainError("hyperboloid points must lie on the sheet z > 0")
    done = np.abs(n - 1.0) <= 8 * _EPS
    scale = np.where(done, 1.0, 1.0 / np.sqrt(n))
    return a * scale[..., None] if a.ndim > 1 else a * float(scale)


def project_velocity(kappa, q, v):
    """Remove the normal component: ``v - kappa <q, v> q``."""
    k = _kval(kappa)
    q = np.asarray(q, dtype=float)
    v = np.array(v, dtype=float)
    qv = inner(k, q, v)
    size = np.linalg.norm(q, axis=-1) * np.linalg.norm(v, axis=-1)
    qv = np.where(np.abs(qv) <= 8 * _EPS * size, 0.0, qv)
    return v - k * np.asarray(qv)[..., None] * q


def surface_residual(kappa, q):
    """``|kappa <q, q> - 1|`` per point."""
    k = _kval(kappa)
    return np.abs(k * inner(k, q, q) - 1.0)


def tangent_residual(kappa, q, v):
    """``|<q, v>| / (|q| |v|)``; zero for exactly tangent vectors."""
    k = _kval(kappa)
    scale = np.linalg.norm(q, axis=-1) * np.maximum(np.linalg.norm(v, axis=-1), 1.0)
    return np.abs(inner(k, q, v)) / scale


# --------------------------------------------------------------------------
# isometries


def so3_rotation_z(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def isometry_elliptic(theta):
    """Lorentz rotation about the timelike z axis."""
    return so3_rotation_z(theta)


def isometry_hyperbolic(s):
    """Lorentz boost about the spacelike x axis."""
    ch, sh = np.cosh(s), np.sinh(s)
    return np.array([[1.0, 0.0, 0.0], [0.0, ch, sh], [0.0, sh, ch]])


def isometry_parabolic(t):
    """Lorentz rotation about the null line ``x = 0, y = z``."""
    h = 0.5 * t * t
    return np.array([[1.0, -t, t], [t, 1.0 - h, h], [t, -h, 1.0 + h]])


def conjugate(matrix, basis):
    """``P A P^-1`` for a change of basis ``P``."""
    basis = np.asarray(basis, dtype=float)
    return basis @ np.asarray(matrix, dtype=float) @ np.linalg.inv(basis)


def apply_isometry(matrix, state):
    """Map every position and momentum of ``state`` through ``matrix``."""
    m = np.asarray(matrix, dtype=float)
    return replace(state, q=state.q @ m.T, p=state.p @ m.T)


# --------------------------------------------------------------------------
# free motion


def geodesic_flow(kappa, q, v, t):
    """Closed-form free-body motion: position and velocity after time ``t``."""
    k = _kval(kappa)
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    speed = float(np.sqrt(max(inner(k, v, v), 0.0)))
    if speed == 0.0:
        return q.copy(), np.zeros(3)
    arc = speed * t
    sn, csn = kappa_sn(k, arc), kappa_csn(k, arc)
    q_t = csn * q + (sn / speed) * v
    v_t = -k * speed * sn * q + csn * v
    return q_t, v_t
