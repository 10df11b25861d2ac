"""The three isosceles collision scenarios on the unit sphere.

A body of mass M sits at the north pole and two bodies of mass m start
symmetrically on a meridian plane. Depending on M the pair either falls
into a collision at the south-pole antipode (M = 8m), is pushed away
(M = 2m), or collides with a finite speed fixed by the energy (M = 4m).

Run with ``python3 demos/isosceles_singularities.py``.
"""

import numpy as np

from curved_nbody.integrate import IntegratorConfig, integrate
from curved_nbody.singularities import integrate_reduced, isosceles_scenario


def speed_sq(state, body=1):
    v = state.velocities[body]
    return float(v @ v)


sc = isosceles_scenario("8m", 0.05)
traj, stop = integrate(sc.state(), 5.0)
print(f"M=8m: {stop.kind} ({stop.classification}) at t={stop.time:.6f}, "
      f"speed^2 {speed_sq(traj[-1].state):.4g}")

for x0 in (0.05, 0.1):
    sc = isosceles_scenario("2m", x0)
    times = np.linspace(0.0, 20.0, 201)[1:]
    traj, stop = integrate(sc.state(), 20.0, sample_times=times)
    xs = [s.state.q[1, 0] for s in traj]
    print(f"M=2m, x0={x0}: {stop.kind}, x ranges over [{min(xs):.4f}, {max(xs):.4f}]")

sc = isosceles_scenario("4m", 0.2)
traj, stop = integrate(sc.state(), 5.0, IntegratorConfig(singularity_event_threshold=1e-10))
target = sc.energy_h / (4 * sc.mass_m)
v2 = speed_sq(traj[-1].state)
print(f"M=4m: {stop.kind} at t={stop.time:.6f}, speed^2 {v2:.8f}, h/4m {target:.8f}")

# the reduced planar system reproduces the full three-body motion
sc = isosceles_scenario("2m", 0.1)
times = np.linspace(0.0, 5.0, 11)[1:]
full, _ = integrate(sc.state(), 5.0, IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14),
                    sample_times=times)
red = integrate_reduced(sc, times)
diff = max(abs(s.state.q[1, 0] - r[0]) for s, r in zip(full[1:], red))
print(f"reduced vs full (M=2m, x0=0.1, t<=5): max |dx| = {diff:.2e}")
