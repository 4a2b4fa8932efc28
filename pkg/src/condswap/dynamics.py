"""Time evolution: the full five-level loop and the effective beam-splitter model.

Full model (rotating frame, hbar = 1)::

    H(t) = -Delta1 s_aa - Delta2 s_bb - delta s_cc
           + g1 a1^dag s_ga + g2 a2^dag s_gb + Omega1 s_ca
           + Omega2 exp(i Delta_F t) s_cb + h.c.

with ``s_ij = |i><j|``. The ``m`` ground state does not couple.

Effective model on the ``g`` branch::

    H_eff(t) = eta1 n1 + eta2 n2 + chi0 (a1^dag a2 exp(i Delta_F t) + h.c.)

``H_eff`` is quadratic and number conserving, so its propagator is fixed by a
2x2 mode matrix ``u(t)`` (coherent amplitudes evolve as ``alpha -> u alpha``).
Two forms are provided: the exact solution, which is constant-coefficient in
the frame rotating at ``Delta_F / 2``, and the phase-times-beam-splitter
product that keeps only the first Magnus term of the interaction picture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .coherent import CoherentSuperposition, mode_transform, to_fock
from .errors import RegimeViolation, SwapUnreachable
from .hilbert import (LEVELS, AncillaLevel, FockCutoff, JointState, TwoModeState,
                      apply_mode_unitary, bs_matrix, fidelity_fock, ladder_matrices)
from .integrate import IntegrationStats, dopri5
from .params import (DEFAULT_STRICTNESS, EffectiveParams, PhysicalParams, check_validity,
                     derive_effective, max_excitation_probabilities)

DENSE_LIMIT = 600
TRACE_COLUMNS = ("t", "pop_m", "pop_g", "pop_a", "pop_b", "pop_c", "n1", "n2", "norm")

_M, _G, _A, _B, _C = (lvl.index for lvl in LEVELS)


# -- full five-level engine -------------------------------------------------

@dataclass(frozen=True)
class FullHamiltonianSpec:
    """Full loop Hamiltonian on ``ancilla (x) two modes``.

    With ``conditional`` set the ``m`` branch is inert. Without it the model
    is the bare four-level ``g, a, b, c`` loop and the ``m`` branch must be
    empty.
    """

    params: PhysicalParams
    cutoff: FockCutoff
    conditional: bool = True

    @property
    def dim(self) -> int:
        return 5 * self.cutoff.dim


class _FullOperators:
    """Static and rotating parts: ``H(t) = H0 + e^{i Delta_F t} Hp + e^{-i Delta_F t} Hp^dag``."""

    def __init__(self, spec: FullHamiltonianSpec):
        p = spec.params
        d = spec.cutoff.dim
        a1, a2 = ladder_matrices(spec.cutoff)
        eye = np.eye(d)

        def sigma(i, j):
            m = np.zeros((5, 5))
            m[i, j] = 1.0
            return m

        h0 = (-p.delta1 * np.kron(sigma(_A, _A), eye)
              - p.delta2 * np.kron(sigma(_B, _B), eye)
              - p.delta_two_photon * np.kron(sigma(_C, _C), eye)
              + p.g1 * np.kron(sigma(_G, _A), a1.conj().T)
              + p.g2 * np.kron(sigma(_G, _B), a2.conj().T)
              + p.omega_rabi1 * np.kron(sigma(_C, _A), eye)).astype(complex)
        h0 = h0 + h0.conj().T - np.diag(np.diag(h0))  # diagonal counted once
        hp = (p.omega_rabi2 * np.kron(sigma(_C, _B), eye)).astype(complex)
        self.delta_f = p.delta_four_photon
        if spec.dim > DENSE_LIMIT:
            h0, hp = sp.csr_matrix(h0), sp.csr_matrix(hp)
        self.h0 = h0
        self.hp = hp
        self.hm = hp.conj().T
        if self.delta_f == 0:
            self.h0 = h0 + hp + self.hm

    def matrix(self, t: float):
        if self.delta_f == 0:
            h = self.h0
        else:
            ph = np.exp(1j * self.delta_f * t)
            h = self.h0 + ph * self.hp + np.conj(ph) * self.hm
        return h.toarray() if sp.issparse(h) else np.array(h)

    def rhs(self, t, y):
        if self.delta_f == 0:
            return -1j * (self.h0 @ y)
        ph = np.exp(1j * self.delta_f * t)
        return -1j * (self.h0 @ y + ph * (self.hp @ y) + np.conj(ph) * (self.hm @ y))


def full_hamiltonian(spec: FullHamiltonianSpec, t: float = 0.0) -> np.ndarray:
    """Dense ``H(t)`` in the level-major basis (``m, g, a, b, c`` blocks)."""
    return _FullOperators(spec).matrix(t)


@dataclass
class EvolutionResult:
    """Final state of a run plus observables sampled on ``times``."""

    final: object
    times: np.ndarray
    populations: dict = field(default_factory=dict)
    n1: np.ndarray | None = None
    n2: np.ndarray | None = None
    norm: np.ndarray | None = None
    states: list = field(default_factory=list)
    stats: IntegrationStats | None = None

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norm - self.norm[0]))) if self.norm is not None else 0.0

    def trace_rows(self):
        """Rows matching :data:`TRACE_COLUMNS`."""
        for k, t in enumerate(self.times):
            yield (t, *(self.populations[lvl][k] for lvl in LEVELS),
                   self.n1[k], self.n2[k], self.norm[k])


def _observables(data: np.ndarray, cutoff: FockCutoff):
    p = np.abs(data) ** 2
    pops = p.sum(axis=(1, 2))
    n1 = np.arange(cutoff.nmax1 + 1)
    n2 = np.arange(cutoff.nmax2 + 1)
    photons = p.sum(axis=0)
    return pops, float(n1 @ photons.sum(axis=1)), float(photons.sum(axis=0) @ n2)


def evolve_full(spec: FullHamiltonianSpec, initial: JointState, t: float, tol: float = 1e-10,
                n_samples: int = 2, times=None, keep_states: bool = False) -> EvolutionResult:
    """Integrate the Schrodinger equation of the full loop from 0 to ``t``.

    Parameters
    ----------
    spec : FullHamiltonianSpec
    initial : JointState
        Should be normalized.
    t : float
        Final time.
    tol : float
        Local error tolerance of the adaptive integrator (relative; the
        absolute tolerance is ``tol / 100``).
    n_samples : int
        Number of equally spaced observable samples on ``[0, t]``; ignored
        when ``times`` is given.
    keep_states : bool
        Also return the joint state at every sample.

    Raises
    ------
    StepFailure
        If the integrator cannot meet ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if initial.cutoff != spec.cutoff:
        raise ValueError("initial state and Hamiltonian use different cutoffs")
    if not spec.conditional and np.any(initial.array[_M]):
        raise ValueError("non-conditional model has no |m> branch; initial |m> amplitude must vanish")
    if times is None:
        times = np.linspace(0.0, t, max(int(n_samples), 2))
    times = np.asarray(times, float)
    ops = _FullOperators(spec)
    y0 = initial.array.reshape(-1)
    m_branch = initial.array[_M].copy()
    stats = IntegrationStats()
    ys = dopri5(ops.rhs, y0, times, rtol=tol, atol=tol * 1e-2, stats=stats)
    pops = {lvl: np.empty(len(times)) for lvl in LEVELS}
    n1 = np.empty(len(times))
    n2 = np.empty(len(times))
    norm = np.empty(len(times))
    states = []
    for k, y in enumerate(ys):
        data = y.reshape((5,) + spec.cutoff.shape)
        if spec.conditional:
            data[_M] = m_branch
        pp, a, b = _observables(data, spec.cutoff)
        for lvl in LEVELS:
            pops[lvl][k] = pp[lvl.index]
        n1[k], n2[k] = a, b
        norm[k] = math.sqrt(pp.sum())
        if keep_states:
            states.append(JointState.from_array(data, spec.cutoff))
    final = JointState.from_array(ys[-1].reshape((5,) + spec.cutoff.shape), spec.cutoff)
    if spec.conditional:
        arr = final.array.copy()
        arr[_M] = m_branch
        final = JointState.from_array(arr, spec.cutoff)
    return EvolutionResult(final=final, times=times, populations=pops, n1=n1, n2=n2, norm=norm,
                           states=states, stats=stats)


# -- effective engine -------------------------------------------------------

def _as_effective(eff) -> EffectiveParams:
    return derive_effective(eff) if isinstance(eff, PhysicalParams) else eff


def effective_mode_matrix(eff: EffectiveParams, t: float) -> np.ndarray:
    """Exact Heisenberg mode matrix of ``T exp(-i int_0^t H_eff)``.

    In the frame rotating at ``Delta_F / 2`` the single-particle matrix is
    constant, ``K = (eta1 + eta2)/2 + [[delta_F/2, chi0], [chi0, -delta_F/2]]``.
    """
    eff = _as_effective(eff)
    big_df = eff.delta_four_photon
    k = np.array([[eff.eta1 + big_df / 2, eff.chi0],
                  [eff.chi0, eff.eta2 - big_df / 2]], complex)
    frame = np.diag([np.exp(0.5j * big_df * t), np.exp(-0.5j * big_df * t)])
    return frame @ la.expm(-1j * k * t)


def _interaction_integral(delta_f: float, t: float) -> complex:
    """``int_0^t exp(i delta_f tau) d tau``."""
    x = delta_f * t
    if abs(x) < 1e-8:
        return complex(t * (1 + 0.5j * x - x * x / 6))
    return complex(np.expm1(1j * x) / (1j * delta_f))


class Decomposition(NamedTuple):
    """Phase-shift part and leading-order beam-splitter part of the evolution."""

    phase1: float       # eta1 t
    phase2: float       # eta2 t
    bs_angle: float     # |chi0 int_0^t exp(-i delta_F tau) d tau|
    bs_phase: float     # residual phase of the beam splitter


def decompose(eff: EffectiveParams, t: float) -> Decomposition:
    """Split the evolution into ``exp(-i eta n t)`` times a first-order beam splitter.

    The beam-splitter angle is ``2 |chi0 sin(delta_F t / 2) / delta_F|``
    (``|chi0| t`` at ``delta_F = 0``).
    """
    eff = _as_effective(eff)
    z = eff.chi0 * _interaction_integral(eff.delta_f, t)
    return Decomposition(eff.eta1 * t, eff.eta2 * t, abs(z), float(np.angle(z)) if z != 0 else 0.0)


def magnus_mode_matrix(eff: EffectiveParams, t: float) -> np.ndarray:
    """Mode matrix of the phase-shift times first-Magnus beam-splitter product."""
    d = decompose(eff, t)
    phases = np.diag([np.exp(-1j * d.phase1), np.exp(-1j * d.phase2)])
    return phases @ bs_matrix(d.bs_angle, d.bs_phase)


def mode_matrix(eff, t: float, method: str = "exact") -> np.ndarray:
    if method == "exact":
        return effective_mode_matrix(eff, t)
    if method == "magnus":
        return magnus_mode_matrix(eff, t)
    raise ValueError(f"unknown evolution method {method!r}")


def evolve_effective(eff: EffectiveParams, initial, t: float, method: str = "exact"):
    """Evolve a photonic state (coherent or Fock backend) under ``H_eff``."""
    u = mode_matrix(eff, t, method)
    if isinstance(initial, CoherentSuperposition):
        return mode_transform(initial, u)
    if isinstance(initial, TwoModeState):
        return apply_mode_unitary(initial, u)
    raise TypeError(f"unsupported photonic state type {type(initial).__name__}")


# -- swap time and output phases --------------------------------------------

def swap_angle_ratio(ratio: float) -> float:
    """``delta_F t_s`` for ``|chi0 / delta_F| = ratio``: ``2 arcsin(pi / (4 ratio))``."""
    ratio = abs(ratio)
    s = math.pi / (4 * ratio) if ratio > 0 else math.inf
    if s > 1:
        if s - 1 <= 1e-12:
            s = 1.0
        else:
            raise SwapUnreachable(f"|chi0/delta_F| = {ratio:.6g} < pi/4: no full swap accumulates")
    return 2 * math.asin(s)


def swap_time(eff: EffectiveParams) -> float:
    """Smallest ``t_s > 0`` with ``2 chi0 sin(delta_F t_s / 2) / delta_F = pi / 2`` (in modulus).

    Raises
    ------
    SwapUnreachable
        If ``|chi0 / delta_F| < pi / 4``.
    """
    eff = _as_effective(eff)
    if eff.chi0 == 0:
        raise SwapUnreachable("chi0 = 0: no beam-splitter coupling")
    if eff.delta_f == 0:
        return math.pi / (2 * abs(eff.chi0))
    return swap_angle_ratio(eff.chi0 / eff.delta_f) / abs(eff.delta_f)


def wrap_phase(x):
    """Reduce to ``(-pi, pi]``."""
    return math.pi - np.mod(math.pi - np.asarray(x, float), 2 * math.pi) if np.ndim(x) \
        else math.pi - (math.pi - x) % (2 * math.pi)


def output_phases(eff: EffectiveParams, t_s: float):
    """Phases in ``|alpha,beta> +- |beta e^{i phi1}, alpha e^{i phi2}>``.

    ``phi_i = eta_i t_s - pi/2 + delta_F t_s / 2``, reduced to ``(-pi, pi]``.
    """
    eff = _as_effective(eff)
    common = -0.5 * math.pi + 0.5 * eff.delta_f * t_s
    return wrap_phase(eff.eta1 * t_s + common), wrap_phase(eff.eta2 * t_s + common)


def swapped_output(alpha: complex, beta: complex, phi1: float, phi2: float, sign: int = +1):
    """``|alpha,beta> + sign |beta e^{i phi1}, alpha e^{i phi2}>`` (unnormalized)."""
    return CoherentSuperposition([(1.0, alpha, beta),
                                  (float(sign), beta * np.exp(1j * phi1), alpha * np.exp(1j * phi2))])


# -- full-vs-effective audit ------------------------------------------------

@dataclass
class ComparisonReport:
    times: np.ndarray
    fidelity: np.ndarray
    nonground: np.ndarray
    full: EvolutionResult
    excitation_bound: float
    effective: EffectiveParams

    @property
    def min_fidelity(self) -> float:
        return float(np.min(self.fidelity))

    @property
    def max_nonground(self) -> float:
        return float(np.max(self.nonground))

    def rows(self):
        pops = self.full.populations
        for k, t in enumerate(self.times):
            yield (t, self.fidelity[k], pops[AncillaLevel.G][k], pops[AncillaLevel.A][k],
                   pops[AncillaLevel.B][k], pops[AncillaLevel.C][k], self.nonground[k],
                   self.full.n1[k], self.full.n2[k], self.full.norm[k])


COMPARE_COLUMNS = ("t", "fidelity", "pop_g", "pop_a", "pop_b", "pop_c", "nonground",
                   "n1", "n2", "norm")


def compare_full_vs_effective(p: PhysicalParams, initial, t: float, cutoff: FockCutoff | None = None,
                              n_times: int = 41, strictness=DEFAULT_STRICTNESS,
                              tol: float = 1e-10, times=None) -> ComparisonReport:
    """Run both engines from ``|g> (x) initial`` and compare the photonic ``g`` branch.

    The comparison grid is ``n_times`` points on ``[0, t]`` unless explicit
    ``times`` (starting at 0, ending at ``t``) are given.

    Raises
    ------
    RegimeViolation
        If any validity inequality fails at ``strictness``.
    """
    report = check_validity(p, strictness)
    if not report.passed:
        raise RegimeViolation(report.failures())
    if isinstance(initial, CoherentSuperposition):
        if cutoff is None:
            raise ValueError("a cutoff is needed to compare coherent inputs")
        initial = to_fock(initial, cutoff)
    if cutoff is not None and initial.cutoff != cutoff:
        raise ValueError("cutoff does not match the initial state")
    initial = initial.normalized()
    eff = derive_effective(p)
    spec = FullHamiltonianSpec(p, initial.cutoff)
    if times is None:
        times = np.linspace(0.0, t, max(int(n_times), 2))
    else:
        times = np.asarray(times, float)
        if times[0] != 0 or np.any(np.diff(times) <= 0):
            raise ValueError("comparison times must start at 0 and increase strictly")
        t = float(times[-1])
    full = evolve_full(spec, JointState.product(AncillaLevel.G, initial), t, tol=tol,
                       times=times, keep_states=True)
    fid = np.empty(len(times))
    nonground = np.empty(len(times))
    for k, (tk, joint) in enumerate(zip(times, full.states)):
        g_branch = joint.branch(AncillaLevel.G)
        target = evolve_effective(eff, initial, tk)
        fid[k] = fidelity_fock(g_branch, target)
        pops = joint.populations()
        nonground[k] = pops[AncillaLevel.A] + pops[AncillaLevel.B] + pops[AncillaLevel.C]
    bound = 2 * sum(max_excitation_probabilities(p))
    return ComparisonReport(times=times, fidelity=fid, nonground=nonground, full=full,
                            excitation_bound=bound, effective=eff)
