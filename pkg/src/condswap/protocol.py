"""The four-step conditional-swap protocol and the states it produces.

Steps: prepare ``|Psi1, Psi2>|m>``; rotate the ancilla,
``|m> -> (|m> - i|g>)/sqrt 2``; swap the photonic modes on the ``|g>`` branch
only; rotate again; measure ``m`` versus ``g``. With an ideal swap the two
outcomes leave ``|Psi1,Psi2> - |Psi2,Psi1>`` (``m``) and
``|Psi1,Psi2> + |Psi2,Psi1>`` (``g``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .coherent import CoherentSuperposition, mode_transform
from .dynamics import FullHamiltonianSpec, evolve_effective, evolve_full
from .errors import NotSECSShape, ZeroBranch, ZeroDenominator
from .hilbert import (AncillaLevel, FockCutoff, JointState, TwoModeState, apply_mode_unitary,
                      bs_matrix, product_state)
from .params import EffectiveParams, PhysicalParams, derive_effective

ZERO_BRANCH_TOL = 1e-14

ROTATION = np.array([[1, -1j], [-1j, 1]]) / math.sqrt(2)
"""Ancilla sigma-x rotation on ``(m, g)``; columns are the images of ``|m>``, ``|g>``."""

BALANCED_BS = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


# -- swap specifications ----------------------------------------------------

@dataclass(frozen=True)
class IdealSwap:
    """Exact exchange ``a1 <-> a2``.

    Realized as the beam splitter at ``chi0 t = pi/2`` followed by the
    single-mode phases ``i e^{-i phi}``, ``i e^{i phi}`` that cancel its
    ``-i e^{+-i phi}`` factors.
    """

    phi: float = 0.0

    def mode_matrix(self) -> np.ndarray:
        correction = np.diag([1j * np.exp(-1j * self.phi), 1j * np.exp(1j * self.phi)])
        u = correction @ bs_matrix(math.pi / 2, self.phi)
        return np.where(np.abs(u) < 1e-15, 0.0, u)


@dataclass(frozen=True)
class EffectiveSwap:
    """Evolution under ``H_eff`` for ``duration``."""

    eff: EffectiveParams
    duration: float
    method: str = "exact"


@dataclass(frozen=True)
class FullSwap:
    """Evolution of the full five-level loop for ``duration`` (Fock backend only)."""

    params: PhysicalParams
    duration: float
    tol: float = 1e-10


SwapSpec = Union[IdealSwap, EffectiveSwap, FullSwap]


# -- ancilla-tagged coherent states ----------------------------------------

@dataclass(frozen=True)
class CoherentJoint:
    """``|m>`` and ``|g>`` branches of a coherent-backend joint state."""

    m: CoherentSuperposition = field(default_factory=lambda: CoherentSuperposition([]))
    g: CoherentSuperposition = field(default_factory=lambda: CoherentSuperposition([]))


def rotate(joint):
    """Apply the ancilla rotation to the ``{m, g}`` branches."""
    if isinstance(joint, CoherentJoint):
        (r_mm, r_mg), (r_gm, r_gg) = ROTATION
        return CoherentJoint(m=r_mm * joint.m + r_mg * joint.g, g=r_gm * joint.m + r_gg * joint.g)
    data = joint.array.copy()
    m, g = AncillaLevel.M.index, AncillaLevel.G.index
    pair = np.tensordot(ROTATION, data[[m, g]], axes=(1, 0))
    data[m], data[g] = pair
    return JointState.from_array(data, joint.cutoff)


def conditional_swap(joint, swap: SwapSpec):
    """Transform the ``|g>`` branch with the chosen engine; leave ``|m>`` untouched."""
    if isinstance(joint, CoherentJoint):
        if isinstance(swap, IdealSwap):
            g = mode_transform(joint.g, swap.mode_matrix())
        elif isinstance(swap, EffectiveSwap):
            g = evolve_effective(swap.eff, joint.g, swap.duration, swap.method)
        elif isinstance(swap, FullSwap):
            raise TypeError("the full five-level engine needs the Fock backend")
        else:
            raise TypeError(f"unknown swap specification {swap!r}")
        return CoherentJoint(m=joint.m, g=g)
    if isinstance(swap, FullSwap):
        spec = FullHamiltonianSpec(swap.params, joint.cutoff, conditional=True)
        return evolve_full(spec, joint, swap.duration, tol=swap.tol).final
    g = joint.branch(AncillaLevel.G)
    if isinstance(swap, IdealSwap):
        g = apply_mode_unitary(g, swap.mode_matrix())
    elif isinstance(swap, EffectiveSwap):
        g = evolve_effective(swap.eff, g, swap.duration, swap.method)
    else:
        raise TypeError(f"unknown swap specification {swap!r}")
    data = joint.array.copy()
    data[AncillaLevel.G.index] = g.amplitudes
    return JointState.from_array(data, joint.cutoff)


# -- outcomes ---------------------------------------------------------------

@dataclass(frozen=True)
class ProtocolOutcome:
    """Conditional photonic states after measuring the ancilla.

    ``p_m + p_g = 1``: Born weights are renormalized over the two ground
    outcomes (``leaked`` records any population left in ``a, b, c`` by
    the full engine). Branch states are normalized with the global-phase
    convention of ``with_phase_convention``; a branch is ``None`` when its
    probability is below :data:`ZERO_BRANCH_TOL`.
    """

    p_m: float
    p_g: float
    _state_m: object = None
    _state_g: object = None
    leaked: float = 0.0

    @property
    def state_m(self):
        if self._state_m is None:
            raise ZeroBranch(f"outcome m has probability {self.p_m:.3g}")
        return self._state_m

    @property
    def state_g(self):
        if self._state_g is None:
            raise ZeroBranch(f"outcome g has probability {self.p_g:.3g}")
        return self._state_g

    def has_branch(self, level) -> bool:
        level = AncillaLevel(level)
        return (self._state_m if level is AncillaLevel.M else self._state_g) is not None

    def to_records(self) -> dict:
        def rec(s):
            return None if s is None else s.to_records()
        return {"p_m": self.p_m, "p_g": self.p_g, "leaked": self.leaked,
                "state_m": rec(self._state_m), "state_g": rec(self._state_g)}


def measure(joint) -> ProtocolOutcome:
    """Ideal projective measurement of the ancilla on ``m`` versus ``g``."""
    if isinstance(joint, CoherentJoint):
        branches = {"m": joint.m, "g": joint.g}
        weights = {k: max(v.norm_squared(), 0.0) if len(v) else 0.0 for k, v in branches.items()}
        leaked = 0.0
    else:
        branches = {"m": joint.branch(AncillaLevel.M), "g": joint.branch(AncillaLevel.G)}
        weights = {k: v.norm_squared() for k, v in branches.items()}
        pops = joint.populations()
        leaked = pops[AncillaLevel.A] + pops[AncillaLevel.B] + pops[AncillaLevel.C]
    total = weights["m"] + weights["g"]
    if total <= 0:
        raise ZeroBranch("both ground outcomes vanish")
    probs = {k: w / total for k, w in weights.items()}
    states = {}
    for k, s in branches.items():
        if probs[k] < ZERO_BRANCH_TOL:
            states[k] = None
        else:
            states[k] = (s / math.sqrt(weights[k])).with_phase_convention()
    return ProtocolOutcome(p_m=probs["m"], p_g=probs["g"], _state_m=states["m"],
                           _state_g=states["g"], leaked=leaked)


def _product_input(psi1, psi2, cutoff: FockCutoff | None):
    """Two-mode product from single-mode inputs of either backend.

    A complex number is a coherent amplitude, a list of ``(weight, alpha)``
    pairs a single-mode coherent superposition, and a 1-D array a Fock
    amplitude vector.
    """
    def coherent_form(psi):
        if np.isscalar(psi) and not isinstance(psi, str):
            return [(1.0, complex(psi))]
        if isinstance(psi, (list, tuple)) and psi and all(np.ndim(x) == 1 and len(x) == 2 for x in psi):
            return [(complex(w), complex(a)) for w, a in psi]
        return None

    c1, c2 = coherent_form(psi1), coherent_form(psi2)
    if c1 is not None and c2 is not None:
        state = CoherentSuperposition.from_single_modes(c1, c2)
        return state.normalized()
    v1 = np.asarray(psi1, complex).ravel()
    v2 = np.asarray(psi2, complex).ravel()
    if cutoff is None:
        n = max(len(v1), len(v2)) - 1
        cutoff = FockCutoff(n, n)
    return product_state(v1, v2, cutoff).normalized()


def run_protocol(psi1, psi2, swap: SwapSpec = IdealSwap(), cutoff: FockCutoff | None = None) -> ProtocolOutcome:
    """Run prepare, rotate, conditional swap, rotate and measure.

    Parameters
    ----------
    psi1, psi2
        Single-mode inputs: complex coherent amplitudes (coherent backend)
        or Fock amplitude vectors (Fock backend).
    swap : IdealSwap, EffectiveSwap or FullSwap
    cutoff : FockCutoff, optional
        Fock cutoff; defaults to the longer input vector, shared by both
        modes.
    """
    return run_protocol_state(_product_input(psi1, psi2, cutoff), swap)


def run_protocol_state(photonic, swap: SwapSpec = IdealSwap()) -> ProtocolOutcome:
    """:func:`run_protocol` for a prepared two-mode photonic input."""
    if isinstance(photonic, CoherentSuperposition):
        joint = CoherentJoint(m=photonic)
    elif isinstance(photonic, TwoModeState):
        joint = JointState.product(AncillaLevel.M, photonic)
    else:
        raise TypeError(f"unsupported photonic state type {type(photonic).__name__}")
    joint = rotate(joint)
    joint = conditional_swap(joint, swap)
    joint = rotate(joint)
    return measure(joint)


def ideal_probabilities(psi1_psi2_overlap: complex):
    """``(p_m, p_g) = ((1 - |<Psi1|Psi2>|^2)/2, (1 + |<Psi1|Psi2>|^2)/2)``."""
    o = abs(psi1_psi2_overlap) ** 2
    return (1 - o) / 2, (1 + o) / 2


def symmetric_target(psi: object, sign: int = +1):
    """``|Psi1,Psi2> + sign |Psi2,Psi1>`` for a two-mode product ``psi`` (unnormalized)."""
    if isinstance(psi, CoherentSuperposition):
        return psi + sign * psi.exchanged()
    return psi + sign * TwoModeState(psi.amplitudes.T, psi.cutoff)


# -- state families ---------------------------------------------------------

def noon_state(n: int, cutoff: FockCutoff, sign: int = +1) -> TwoModeState:
    """Normalized ``(|N,0> + sign |0,N>)/sqrt 2``."""
    amps = np.zeros(cutoff.shape, complex)
    amps[n, 0] += 1
    amps[0, n] += sign
    return TwoModeState(amps, cutoff).normalized()


def convert_to_cat(secs: CoherentSuperposition) -> CoherentSuperposition:
    """Balanced beam splitter on ``w1|a,b> + w2|b,a>``.

    The result is ``|(a+b)/sqrt 2> (w1|d> + w2|-d>)`` with ``d = (a-b)/sqrt 2``.

    Raises
    ------
    NotSECSShape
        Unless the input is of that two-term mirrored form (or a single
        term with equal amplitudes).
    """
    terms = secs.terms
    if len(terms) == 1:
        if abs(terms[0][1] - terms[0][2]) > 1e-12:
            raise NotSECSShape("single term is not of the form |a,a>")
    elif len(terms) == 2:
        (_, a1, b1), (_, a2, b2) = terms
        if abs(a1 - b2) > 1e-12 or abs(b1 - a2) > 1e-12:
            raise NotSECSShape("terms are not mode-exchanged copies of each other")
    else:
        raise NotSECSShape(f"expected two terms, got {len(terms)}")
    return mode_transform(secs, BALANCED_BS)


def cat_amplitude(alpha: complex, beta: complex) -> complex:
    """Cat size ``d = (alpha - beta)/sqrt 2`` produced by :func:`convert_to_cat`."""
    return (alpha - beta) / math.sqrt(2)


def cavity_steady_state(drive: complex, delta0: float, kappa: float) -> complex:
    """Steady intracavity amplitude ``E / (kappa/2 + i Delta_0)`` of a driven, damped mode."""
    den = 0.5 * kappa + 1j * delta0
    if den == 0:
        raise ZeroDenominator("kappa and drive detuning are both zero")
    return drive / den


def drive_for_amplitude(amplitude: complex, delta0: float, kappa: float) -> complex:
    """Inverse of :func:`cavity_steady_state`."""
    den = 0.5 * kappa + 1j * delta0
    if den == 0:
        raise ZeroDenominator("kappa and drive detuning are both zero")
    return amplitude * den
