"""Conditional swap on Fock and coherent inputs, then a beam splitter to a cat."""

import math

import numpy as np

from condswap import run_protocol
from condswap.coherent import secs
from condswap.hilbert import FockCutoff, fidelity_fock
from condswap.protocol import cat_amplitude, convert_to_cat, noon_state

# |N>|0> -> (|N,0> -+ |0,N>)/sqrt 2 on the two ancilla outcomes
for n in (1, 2, 4):
    basis = np.eye(n + 1)
    out = run_protocol(basis[n], basis[0])
    cut = FockCutoff(n, n)
    print(f"N={n}: p_m={out.p_m:.3f} p_g={out.p_g:.3f} "
          f"F_m={fidelity_fock(out.state_m, noon_state(n, cut, -1)):.12f} "
          f"F_g={fidelity_fock(out.state_g, noon_state(n, cut, +1)):.12f}")

alpha, beta = 6 * math.sqrt(2), math.sqrt(2)
out = run_protocol(alpha, beta)
print(f"\ncoherent |{alpha:.4f}>|{beta:.4f}>: p_m = {out.p_m:.17g}, (1 - e^-50)/2 = {(1 - math.exp(-50)) / 2:.17g}")

cat = convert_to_cat(secs(alpha, beta))
print(f"after the balanced beam splitter: {cat}")
print(f"cat amplitude |d| = {abs(cat_amplitude(alpha, beta)):.6f}")
