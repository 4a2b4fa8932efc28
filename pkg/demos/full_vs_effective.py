"""Five-level loop against the effective beam-splitter model for one swap period."""

from condswap.dynamics import compare_full_vs_effective, swap_time
from condswap.hilbert import FockCutoff, fock_state
from condswap.params import PhysicalParams, check_validity, derive_effective

p = PhysicalParams(g1=0.03, g2=0.03, omega_rabi1=1.0, omega_rabi2=1.0, delta1=1.0, delta2=1.0,
                   delta_two_photon=0.0, n1=1, n2=0)
print("validity passed:", check_validity(p).passed)
eff = derive_effective(p)
print(eff)
t_s = swap_time(eff)
cut = FockCutoff(1, 1)
report = compare_full_vs_effective(p, fock_state(1, 0, cut), t_s, cut, n_times=11)
for row in report.rows():
    print("  ".join(f"{v:.6g}" for v in row))
print(f"min fidelity {report.min_fidelity:.6f}, max excited {report.max_nonground:.3e}, "
      f"bound {report.excitation_bound:.3e}")
