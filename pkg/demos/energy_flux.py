"""
Energy carried by the singular function
=======================================

The outgoing singular function ``s = chi(r) r^(-1/2 + i eta) Phi`` is
harmonic for the weighted operator away from the cutoff annulus.  Its
energy flux through any small sphere is ``-(1/2 + i eta) D``, and the
imaginary part of ``int div(eps grad conj(s)) s`` equals ``eta D`` whatever
the cutoff profile: a nonzero energy flux towards the tip in a lossless
configuration.
"""

import math

from conetrap import CutoffProfile, analyze, make_cap_geometry, make_material
from conetrap.flux import surface_flux, volume_flux_integral

(pair,) = analyze(make_cap_geometry(2 * math.pi / 3), make_material(1.0, -1.9), modes=[0], n_elements=256).pairs
eta_D = pair.signed_eta * pair.D
print(f"eta * D = {eta_D:.10f}")

for tau in (0.05, 0.2, 0.5):
    print(f"surface flux at tau = {tau}: {surface_flux(pair, tau):.10f}")

for cutoff in (CutoffProfile(), CutoffProfile(family="bump"), CutoffProfile(0.2, 0.9)):
    vol = volume_flux_integral(pair, cutoff)
    print(f"{cutoff.family:10s} r1={cutoff.r_one} rho={cutoff.rho}: Im volume integral = {vol.imag:.10f}")
