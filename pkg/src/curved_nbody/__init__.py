"""The n-body problem with the cotangent potential on the sphere and the hyperboloid.

Bodies move on ``S^2`` (``kappa > 0``, the sphere ``x^2 + y^2 + z^2 = 1/kappa``)
or on ``H^2`` (``kappa < 0``, the upper sheet of ``x^2 + y^2 - z^2 = 1/kappa``
with the Lorentz inner product). The force function is
``U = sum_{i<j} m_i m_j ctn_kappa(d_ij)``, which reduces to the Newtonian
potential as ``kappa -> 0``.

Modules
-------
geometry
    kappa-trigonometry, signed products, distances, projections, isometries.
dynamics
    States, the force function, its gradient, the equations of motion and
    first integrals.
integrate
    Adaptive Dormand--Prince integration with projection and event location.
singularities
    Classification of singular configurations and the isosceles scenarios.
equilibria
    Fixed points, relative equilibria, omega^2 relations and their roots.
diagnostics
    Moments of inertia, conservation reports, geodesic alignment and the
    constant-moment relative-equilibrium classifier.
scenario, cli
    Scenario files, deterministic outputs and the ``curved-nbody`` command.
theorems
    The bundled quantitative checks run by ``curved-nbody verify``.
"""

from curved_nbody.diagnostics import (
    DiagnosticsRecord,
    conservation_report,
    geodesic_alignment,
    moment_inertia_I,
    moment_inertia_J,
    saari_classify,
)
from curved_nbody.dynamics import (
    Body,
    FirstIntegrals,
    SystemState,
    acceleration,
    angular_momentum,
    energy,
    first_integrals,
    force_function,
    grad_force_function,
    hamiltonian_rhs,
    min_pair_gap,
    pair_gaps,
)
from curved_nbody.equilibria import (
    RelativeEquilibrium,
    eulerian_re,
    fixed_point_ngon,
    fixed_point_tetrahedron,
    hyperbolic_re,
    is_fixed_point,
    lagrangian_re,
    ngon_re,
    solve_roots,
    verify_relative_equilibrium,
)
from curved_nbody.errors import (
    ConstraintViolation,
    CurvedNBodyError,
    DomainError,
    SingularityError,
)
from curved_nbody.geometry import (
    Curvature,
    distance,
    inner,
    kappa_csn,
    kappa_ctn,
    kappa_sn,
    kappa_tn,
)
from curved_nbody.integrate import IntegratorConfig, StopReason, integrate, invariant_drift
from curved_nbody.singularities import classify, isosceles_scenario

__version__ = "0.1.0"

__all__ = [
    "Body", "ConstraintViolation", "Curvature", "CurvedNBodyError", "DiagnosticsRecord",
    "DomainError", "FirstIntegrals", "IntegratorConfig", "RelativeEquilibrium",
    "SingularityError", "StopReason", "SystemState", "acceleration", "angular_momentum",
    "classify", "conservation_report", "distance", "energy", "eulerian_re",
    "first_integrals", "fixed_point_ngon", "fixed_point_tetrahedron", "force_function",
    "geodesic_alignment", "grad_force_function", "hamiltonian_rhs", "hyperbolic_re",
    "inner", "integrate", "invariant_drift", "is_fixed_point", "isosceles_scenario",
    "kappa_csn", "kappa_ctn", "kappa_sn", "kappa_tn", "lagrangian_re", "min_pair_gap",
    "moment_inertia_I", "moment_inertia_J", "ngon_re", "pair_gaps", "saari_classify",
    "solve_roots", "verify_relative_equilibrium",
]
