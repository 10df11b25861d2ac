"""How many relative equilibria exist for a given angular velocity.

Scans the omega^2 relations for the equilateral triangle on the sphere and
for the equal-mass Eulerian configuration, printing how the number of
heights solving omega^2/m = target changes across the critical values.

Run with ``python3 demos/root_counts.py``.
"""

import numpy as np

from curved_nbody.equilibria import eq4, ratio1, solve_roots

print("equilateral triangle on the sphere (critical values 3 and 8/sqrt(3))")
for target in (2.0, 3.0, 4.0, 8 / np.sqrt(3), 5.0):
    scan = solve_roots("eq4", target)
    tags = ["t" if r.tangency else "" for r in scan.roots]
    vals = ", ".join(f"{v:+.6f}{t}" for v, t in zip(scan.values, tags))
    print(f"  target {target:8.5f}: {len(scan):d} roots  [{vals}]")

z = np.linspace(0.01, 0.99, 100001)
zmin = z[np.argmin(ratio1(z))]
print(f"\nEulerian curve on (0, 1): minimum {ratio1(zmin):.8f} at z = {zmin:.5f} "
      f"(64 sqrt(15)/45 = {64 * np.sqrt(15) / 45:.8f}, sqrt(3/8) = {np.sqrt(3 / 8):.5f})")
for target in (3.0, 5.5, 6.0, 10.0):
    scan = solve_roots("ratio1", target)
    print(f"  target {target:5.2f}: {len(scan)} roots  "
          f"[{', '.join(f'{v:+.6f}' for v in scan.values)}]")
print(f"\neq4 at the equator: {eq4(0.0):.6f}")
