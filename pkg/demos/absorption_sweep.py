"""
Following the exponent under dissipation
========================================

Adding a small loss ``i delta`` to the negative permittivity pushes the
outgoing exponent off the line ``Re lambda = -1/2``.  The first-order drift
``lambda'`` is positive, so the exponent moves to the right: the physical
solution for a slightly lossy material converges to the outgoing one.
"""

import math

from conetrap import analyze, make_cap_geometry, make_material, perturbation_slope, sweep_delta

geometry = make_cap_geometry(2 * math.pi / 3)
material = make_material(1.0, -1.9)
(pair,) = analyze(geometry, material, modes=[0], n_elements=512).pairs

deltas = [0.0, 0.001, 0.01, 0.05, 0.1]
rows = sweep_delta(pair, deltas)

print(" delta      lambda")
for row in rows:
    lam = row.lambda_delta
    print(f"{row.delta:6.3f}   {lam.real:+.4f} {lam.imag:+.4f}i   in window: {row.in_window}")

slope = perturbation_slope(pair)
fd = (rows[1].lambda_delta.real - rows[0].lambda_delta.real) / deltas[1]
print(f"lambda' = {slope:.4f} (finite difference {fd:.4f})")
