"""
Scanning the contrast for critical intervals
============================================

For each azimuthal mode, we record whether a black-hole pair exists along a
grid of contrasts ``kappa = eps_minus / eps_plus``.  Sign changes of that
indicator are refined by bisection to locate the interval endpoints.
"""

import math

from conetrap import scan_contrast

kappas = [-3.0, -2.5, -2.0, -1.5, -1.2, -0.8, -0.5]
result = scan_contrast(2 * math.pi / 3, kappas, modes=[0, 1], n_elements=128)

for row in result.rows:
    eta = "-" if row.eta is None else f"{row.eta:.4f}"
    note = f"  ({', '.join(row.flags)})" if row.flags else ""
    print(f"kappa = {row.kappa:5.2f}  m = {row.mode}  eta = {eta}{note}")

# Near kappa = -1 the pencil produces very large eta values that the mesh
# cannot resolve; they are flagged "unresolved" rather than trusted.
for ep in result.endpoints:
    note = f"  ({', '.join(ep.flags)})" if ep.flags else ""
    print(f"m = {ep.mode}: endpoint in [{ep.kappa_lo:.4f}, {ep.kappa_hi:.4f}], eta there {ep.eta:.4f}{note}")
