"""
Finding a black-hole pair at a conical tip
==========================================

A circular cone of aperture 120 degrees is filled with a negative material
(permittivity -1.9) and surrounded by vacuum.  We discretize the weighted
Laplace-Beltrami pencil on the unit sphere, look for real eigenvalues
``mu < -1/4`` and read off the exponents ``-1/2 +- i eta``.
"""

import math

from conetrap import analyze, make_cap_geometry, make_material

geometry = make_cap_geometry(2 * math.pi / 3)
material = make_material(eps_plus=1.0, eps_minus=-1.9)

# Azimuthal modes m = 0..3 on 256 quadratic elements in latitude.
analysis = analyze(geometry, material, modes=range(4), n_elements=256)

for pair in analysis.pairs:
    print(f"m = {pair.mode.m}: eta = {pair.eta:.6f}, D = {pair.D:.6f}")
    # The outgoing exponent is the one with eta * D > 0.
    print(f"  outgoing exponent {pair.lambda_out:.6f}")

# beta0 is the distance from Re lambda = -1/2 to the rest of the spectrum;
# it bounds the weights for which the problem remains well posed.
print(f"beta0 = {analysis.beta0:.6f}")

# Flipping the sign of the eigenfunction leaves the selection unchanged.
pair = analysis.pairs[0]
print("sign-flip invariant:", pair.flipped().D == pair.D)
