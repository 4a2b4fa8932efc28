"""Conditional beam-splitter entanglement of two photonic modes via a five-level ancilla."""

from .coherent import CoherentSuperposition, fidelity_coherent, mode_transform, overlap, secs, to_fock
from .decoherence import (AnalyticLossyState, DensityOperator, analytic_lossy_secs, decay_budget,
                          lindblad_evolve, lossy_fidelity, state_fidelity)
from .dynamics import (FullHamiltonianSpec, compare_full_vs_effective, decompose, evolve_effective,
                       evolve_full, output_phases, swap_time)
from .errors import *  # noqa: F401,F403
from .hilbert import (AncillaLevel, FockCutoff, JointState, TwoModeState, annihilate, apply_bs,
                      coherent_fock, create, fidelity_fock, fock_state)
from .params import (EffectiveParams, PhysicalParams, ValidityReport, check_validity, derive_effective,
                     excitation_probabilities)
from .protocol import (EffectiveSwap, FullSwap, IdealSwap, ProtocolOutcome, cavity_steady_state,
                       conditional_swap, convert_to_cat, run_protocol)

__version__ = "0.1.0"
