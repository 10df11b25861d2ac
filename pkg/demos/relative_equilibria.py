"""Relative equilibria on the sphere and the hyperboloid.

Builds a few closed-form rigidly rotating configurations, integrates them
for three periods and checks that the mutual distances do not move (an
unstable member shows round-off growing instead). Then
tilts a rotating triangle off its circle of latitude and shows that the
same check now fails.

Run with ``python3 demos/relative_equilibria.py``.
"""

import numpy as np

from curved_nbody.diagnostics import saari_classify
from curved_nbody.equilibria import (
    eulerian_re,
    hyperbolic_re,
    lagrangian_re,
    ngon_re,
    tilted_ngon_state,
    verify_relative_equilibrium,
)
from curved_nbody.integrate import IntegratorConfig, integrate

config = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)

cases = [
    ("Lagrangian triangle, S2, z=0.3", lagrangian_re(1.0, 0.3), "elliptic"),
    ("Lagrangian triangle, H2, z=1.05", lagrangian_re(-1.0, 1.05), "elliptic"),
    # higher up the hyperboloid the triangle is an unstable equilibrium:
    # round-off grows over the long period and the distances start to move
    ("Lagrangian triangle, H2, z=1.5 (unst.)", lagrangian_re(-1.0, 1.5), "elliptic"),
    ("square, S2, z=0.2", ngon_re(1.0, 4, 0.2), "elliptic"),
    ("Eulerian, S2, z=0.4", eulerian_re(1.0, 0.4), "elliptic"),
    ("hyperbolic, H2, x=1", hyperbolic_re(1.0), "hyperbolic"),
]

print(f"{'configuration':40s} {'omega':>10s} {'period':>8s} {'distance drift':>15s}  verdict")
for label, re, kind in cases:
    span = 3 * re.period
    times = np.linspace(0.0, span, 91)[1:]
    traj, stop = integrate(re.state, span, config, sample_times=times)
    rep = verify_relative_equilibrium(traj, kind)
    print(f"{label:40s} {re.omega:10.6f} {re.period:8.4f} {rep.distance_drift:15.2e}  "
          f"{'RE' if rep.passed else 'not RE'}")

# The Eulerian solution is aligned on a rotating great circle, so the
# classifier can recover its angular velocity from the motion alone.
re = eulerian_re(1.0, 0.4)
traj, _ = integrate(re.state, 3 * re.period, config,
                    sample_times=np.linspace(0, 3 * re.period, 91)[1:])
verdict = saari_classify(traj)
print(f"\nclassifier on the Eulerian run: {verdict.verdict}, "
      f"omega fit {verdict.omega:.12f} vs {re.omega:.12f}")

# Rigidity: the same triangle tilted off its latitude circle is not an RE.
state = tilted_ngon_state(3, 0.4, 1.0)
span = 4 * np.pi
traj, _ = integrate(state, span, config, sample_times=np.linspace(0, span, 41)[1:])
rep = verify_relative_equilibrium(traj)
print(f"tilted triangle: distance drift {rep.distance_drift:.3e} -> "
      f"{'RE' if rep.passed else 'not RE'}")
