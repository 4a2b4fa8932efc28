"""Swap time against chi0/delta_F and the zero-phase line of the closed-form output phases."""

import math

import numpy as np

from condswap.cli import fig3a_row, fig3b_point, ridge_eta

A, B = 6 * math.sqrt(2), math.sqrt(2)

print(" ratio    chi0 t_s   reachable")
for r in (0.5, math.pi / 4, 0.8, 1, 2, 5, 10, 100, 1000):
    ratio, val, ok = fig3a_row(r)
    print(f"{ratio:8.4f}  {val:9.6f}   {ok}")
print(f"plateau pi/2 = {math.pi / 2:.6f}")

print("\n ratio   eta*/chi0   F(eta*)   F(eta*+1e-3)  F(eta*+0.1)")
for r in np.geomspace(0.8, 10, 6):
    e = ridge_eta(r)
    f = [fig3b_point(A, B, r, e + d)[2] for d in (0.0, 1e-3, 0.1)]
    print(f"{r:6.3f}   {e:9.6f}   {f[0]:.6f}  {f[1]:.6f}      {f[2]:.6f}")
