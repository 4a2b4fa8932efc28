"""Cavity loss on a symmetric entangled coherent state: closed form and master equation."""

import math

import numpy as np

from condswap.coherent import secs
from condswap.decoherence import (DensityOperator, analytic_lossy_secs, fidelity_curve, lindblad_evolve,
                                  state_fidelity)
from condswap.hilbert import FockCutoff
from condswap.params import EffectiveParams

A, B = 6 * math.sqrt(2), math.sqrt(2)
KAPPA = 1 / 0.13

print("     t           C        f_linear   f_sqrt")
for t, kt, c, fl, fs in fidelity_curve(A, B, KAPPA, np.geomspace(1e-6, 1e-4, 5)):
    print(f"{t:10.3e}   {c:.6f}   {fl:.6f}   {fs:.6f}")

# small amplitudes fit in a truncated space; compare both which-path factors with the numerics
cut = FockCutoff(20, 20)
rho0 = DensityOperator.from_coherent(secs(1.2, 0.3), cut, accept_leakage=True)
rho0 = DensityOperator(rho0.matrix / rho0.trace(), cut)
idle = EffectiveParams(0.0, 0.0, 0.0, delta_f=0.0)
print("\n kappa t    F(numeric, factor 2)   F(numeric, factor 1)")
for kt in (1e-3, 1e-2, 5e-2):
    rho = lindblad_evolve(rho0, idle, 1.0, kt)
    f2, f1 = (state_fidelity(rho, analytic_lossy_secs(1.2, 0.3, 1.0, kt, which_path_factor=f)
                             .to_density(cut, accept_leakage=True)) for f in (2.0, 1.0))
    print(f"{kt:8.0e}   {f2:.9f}            {f1:.9f}")
