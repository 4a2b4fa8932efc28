"""Cavity loss during the swap and decay budgets of the ancilla.

The photonic density operator obeys the zero-temperature master equation

    d rho/dt = -i [H_eff, rho] + kappa sum_i (a_i rho a_i^dag - {n_i, rho}/2).

For the symmetric entangled coherent state the short-time solution is the
four-term mixture of decayed amplitudes ``alpha e^{-kappa t/2}``,
``beta e^{-kappa t/2}`` with cross weight ``C``; see
:func:`analytic_lossy_secs`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .coherent import CoherentSuperposition, gram, secs, to_fock
from .hilbert import FockCutoff, TwoModeState, ladder_matrices
from .integrate import IntegrationStats, dopri5
from .params import (DEFAULT_STRICTNESS, EffectiveParams, Margin, PhysicalParams, ValidityReport,
                     _ratio, _strictness_for, decay_ab_bounds, decay_c_bound, derive_effective,
                     max_excitation_probabilities)

KAPPA_T_WARN = 0.2
DEFAULT_WHICH_PATH_FACTOR = 2.0
DECOHERENCE_COLUMNS = ("t", "kappa_t", "C", "f_linear", "f_sqrt")


class DensityOperator:
    """Density matrix on the flattened two-mode truncated space."""

    __slots__ = ("matrix", "cutoff")

    def __init__(self, matrix, cutoff: FockCutoff):
        m = np.array(matrix, dtype=complex)
        if m.shape != (cutoff.dim, cutoff.dim):
            raise ValueError(f"matrix shape {m.shape} does not match cutoff dimension {cutoff.dim}")
        m.flags.writeable = False
        self.matrix = m
        self.cutoff = cutoff

    @classmethod
    def from_pure(cls, state: TwoModeState) -> "DensityOperator":
        v = state.normalized().vector
        return cls(np.outer(v, v.conj()), state.cutoff)

    @classmethod
    def from_coherent(cls, s: CoherentSuperposition, cutoff: FockCutoff, **kw) -> "DensityOperator":
        return cls.from_pure(to_fock(s, cutoff, **kw))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        h = (self.matrix + self.matrix.conj().T) / 2
        return float(np.linalg.eigvalsh(h)[0])

    def expectation(self, op) -> complex:
        return complex(np.trace(op @ self.matrix))

    def mean_photons(self):
        p = np.real(np.diag(self.matrix)).reshape(self.cutoff.shape)
        return (float(np.arange(self.cutoff.nmax1 + 1) @ p.sum(axis=1)),
                float(p.sum(axis=0) @ np.arange(self.cutoff.nmax2 + 1)))

    def check(self, trace_tol=1e-8, herm_tol=1e-10, pos_tol=1e-8):
        """Raise ``ValueError`` unless trace, Hermiticity and positivity hold."""
        if abs(self.trace() - 1) > trace_tol:
            raise ValueError(f"trace {self.trace():.12g} differs from 1")
        if self.hermiticity_error() > herm_tol:
            raise ValueError(f"not Hermitian: {self.hermiticity_error():.3g}")
        if self.min_eigenvalue() < -pos_tol:
            raise ValueError(f"negative eigenvalue {self.min_eigenvalue():.3g}")
        return self


def _psd_sqrt(m):
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def state_fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    a = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
    b = sigma.matrix if isinstance(sigma, DensityOperator) else np.asarray(sigma)
    s = _psd_sqrt(a)
    w = np.linalg.eigvalsh(s @ b @ s)
    return float(min(1.0, np.sum(np.sqrt(np.clip(w, 0, None))) ** 2))


# -- master equation ------------------------------------------------------

class _Lindbladian:
    def __init__(self, eff: EffectiveParams, kappa: float, cutoff: FockCutoff):
        a1, a2 = ladder_matrices(cutoff)
        n1 = np.real(np.diag(a1.conj().T @ a1))
        n2 = np.real(np.diag(a2.conj().T @ a2))
        self.h_diag = eff.eta1 * n1 + eff.eta2 * n2
        self.hop = sp.csr_matrix(eff.chi0 * (a1.conj().T @ a2))   # chi0 a1^dag a2
        self.delta_f = eff.delta_four_photon
        self.kappa = kappa
        self.a = [sp.csr_matrix(a1), sp.csr_matrix(a2)]
        self.n_total = n1 + n2

    def rhs(self, t, rho):
        ph = np.exp(1j * self.delta_f * t)
        h_rho = self.h_diag[:, None] * rho + ph * (self.hop @ rho) + np.conj(ph) * (self.hop.T.conj() @ rho)
        # rho H = (H rho^dag)^dag
        rho_h = (self.h_diag[:, None] * rho.conj().T + ph * (self.hop @ rho.conj().T)
                 + np.conj(ph) * (self.hop.T.conj() @ rho.conj().T)).conj().T
        out = -1j * (h_rho - rho_h)
        if self.kappa:
            jump = 0
            for a in self.a:
                ar = a @ rho
                jump = jump + (a @ ar.conj().T).conj().T      # a rho a^dag
            anti = 0.5 * (self.n_total[:, None] * rho + rho * self.n_total[None, :])
            out = out + self.kappa * (jump - anti)
        return out


def lindblad_evolve(rho0: DensityOperator, eff: EffectiveParams, kappa: float, t: float,
                    tol: float = 1e-10, times=None, stats: IntegrationStats | None = None):
    """Integrate the master equation with ``H_eff`` from ``eff`` and loss ``kappa``.

    Returns the final :class:`DensityOperator`, or a list of them when
    ``times`` (starting at 0) is given.

    Raises
    ------
    StepFailure
        If the adaptive integrator cannot meet ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    eff = derive_effective(eff) if isinstance(eff, PhysicalParams) else eff
    lv = _Lindbladian(eff, kappa, rho0.cutoff)
    grid = np.array([0.0, t]) if times is None else np.asarray(times, float)
    ys = dopri5(lv.rhs, rho0.matrix, grid, rtol=tol, atol=tol * 1e-2, stats=stats)
    ops = [DensityOperator(y, rho0.cutoff) for y in ys]
    return ops[-1] if times is None else ops


# -- analytic lossy SECS ----------------------------------------------------

@dataclass(frozen=True)
class AnalyticLossyState:
    """Short-time mixed state of a lossy SECS.

    ``rho = (|A><A| + |B><B| + sign C (|A><B| + |B><A|)) / N`` with
    ``A = |alpha e^{-kt/2}, beta e^{-kt/2}>``, ``B`` its mode exchange and
    ``N`` fixed by unit trace.
    """

    alpha: complex
    beta: complex
    kappa_t: float
    sign: int = +1
    which_path_factor: float = DEFAULT_WHICH_PATH_FACTOR

    @property
    def C(self) -> float:
        return math.exp(-self.which_path_factor * abs(self.alpha - self.beta) ** 2
                        * -math.expm1(-self.kappa_t))

    @property
    def decay(self) -> float:
        return math.exp(-self.kappa_t / 2)

    @property
    def kets(self) -> CoherentSuperposition:
        """The two decayed product states ``A`` and ``B`` as unit-weight terms."""
        a, b = self.alpha * self.decay, self.beta * self.decay
        return CoherentSuperposition([(1.0, a, b), (1.0, b, a)], merge_tol=-1)

    @property
    def weights(self) -> np.ndarray:
        """Unnormalized 2x2 weights in ``sum_jk w_jk |X_j><X_k|``."""
        c = self.sign * self.C
        return np.array([[1.0, c], [c, 1.0]])

    @property
    def normalization(self) -> float:
        return float(np.real(np.sum(self.weights * gram(self.kets, self.kets).T)))

    def to_density(self, cutoff: FockCutoff, **kw) -> DensityOperator:
        kets = self.kets
        vecs = [to_fock(CoherentSuperposition([term], merge_tol=-1), cutoff, **kw).vector
                for term in kets.terms]
        w = self.weights / self.normalization
        rho = sum(w[j, k] * np.outer(vecs[j], vecs[k].conj()) for j in range(2) for k in range(2))
        return DensityOperator(rho, cutoff)


def analytic_lossy_secs(alpha: complex, beta: complex, kappa: float, t: float, sign: int = +1,
                        warn_above: float = KAPPA_T_WARN,
                        which_path_factor: float = DEFAULT_WHICH_PATH_FACTOR) -> AnalyticLossyState:
    """Closed-form lossy SECS after time ``t``.

    ``C = exp(-f |alpha - beta|^2 (1 - e^{-kappa t}))`` with ``f = 2`` by
    default. Pure amplitude damping of the two-mode superposition gives
    ``f = 1``; pass ``which_path_factor=1`` for that value.

    Warns (``RuntimeWarning``) when ``kappa t`` exceeds ``warn_above``: the
    form is a short-time result.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    kt = kappa * t
    if kt > warn_above:
        warnings.warn(f"kappa t = {kt:.3g} exceeds {warn_above}; short-time form may be inaccurate",
                      RuntimeWarning, stacklevel=2)
    return AnalyticLossyState(complex(alpha), complex(beta), float(kt), sign, which_path_factor)


def lossy_fidelity(state: AnalyticLossyState):
    """Fidelity with the pure, undecayed SECS in both conventions.

    Returns
    -------
    (f_linear, f_sqrt)
        ``<psi|rho|psi>`` and its square root.
    """
    psi = secs(state.alpha, state.beta, state.sign).normalized()
    v = np.conj(psi.weights) @ gram(psi, state.kets)         # <psi|X_j>
    f = float(np.real(v @ state.weights @ np.conj(v)) / state.normalization)
    f = min(max(f, 0.0), 1.0)
    return f, math.sqrt(f)


def fidelity_curve(alpha: complex, beta: complex, kappa: float, times, sign: int = +1,
                   which_path_factor: float = DEFAULT_WHICH_PATH_FACTOR):
    """Rows ``(t, kappa t, C, f_linear, f_sqrt)`` over ``times``."""
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for t in times:
            s = analytic_lossy_secs(alpha, beta, kappa, t, sign, which_path_factor=which_path_factor)
            fl, fs = lossy_fidelity(s)
            rows.append((float(t), s.kappa_t, s.C, fl, fs))
    return rows


# -- ancilla decay budget ---------------------------------------------------

def decay_budget(p: PhysicalParams, t_s: float, strictness=DEFAULT_STRICTNESS) -> ValidityReport:
    """Swap time against the effective radiative lifetimes ``1/(gamma_i P_i)``.

    ``lifetime_a/b/c`` are ``t_s gamma_i P_i`` with ``P_c`` at its worst case
    over the four-photon phase; ``decay_a/b/c`` are the closed-form bounds of
    :func:`~condswap.params.check_validity`.
    """
    eff = derive_effective(p)
    p_a, p_b, p_c = max_excitation_probabilities(p)
    bound_a, bound_b = decay_ab_bounds(p, eff)
    rows = [
        ("lifetime_a", t_s * p.gamma_a * p_a, "t_s << 1/(gamma_a P_a)"),
        ("lifetime_b", t_s * p.gamma_b * p_b, "t_s << 1/(gamma_b P_b)"),
        ("lifetime_c", t_s * p.gamma_c * p_c, "t_s << 1/(gamma_c P_c)"),
        ("decay_a", _ratio(p.gamma_a, bound_a), "closed-form gamma_a condition"),
        ("decay_b", _ratio(p.gamma_b, bound_b), "closed-form gamma_b condition"),
        ("decay_c", _ratio(p.gamma_c, decay_c_bound(p, eff)), "closed-form gamma_c condition"),
    ]
    return ValidityReport({n: Margin(n, float(r), _strictness_for(strictness, n), d) for n, r, d in rows})
