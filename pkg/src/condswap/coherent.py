"""Exact superpositions of two-mode coherent product states.

A :class:`CoherentSuperposition` is a finite list of terms
``w |alpha1> |alpha2>`` with normalized coherent states. Linear optics maps
coherent states to coherent states, so transforms act on the amplitude
pairs only and no truncation is ever needed. States are kept unnormalized;
normalization happens inside :func:`fidelity_coherent` and friends.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import NonUnitary, ZeroState
from .hilbert import (LEAKAGE_TOL, CutoffTooSmall, FockCutoff, TwoModeState,
                      coherent_amplitudes, coherent_leakage, is_unitary)

MAX_TERMS = 64
MERGE_TOL = 1e-12


class CoherentSuperposition:
    """Weighted sum of two-mode coherent product states.

    Parameters
    ----------
    terms : iterable of (weight, alpha1, alpha2)
    max_terms : int, optional
        Upper bound on the stored term count after merging.
    merge_tol : float, optional
        Terms whose amplitude pairs differ by less than this are merged.
    """

    __slots__ = ("weights", "alphas")

    def __init__(self, terms, max_terms: int = MAX_TERMS, merge_tol: float = MERGE_TOL):
        terms = list(terms)
        w = np.array([t[0] for t in terms], complex)
        a = np.array([[t[1], t[2]] for t in terms], complex).reshape(-1, 2)
        w, a = _merge(w, a, merge_tol)
        if len(w) > max_terms:
            raise ValueError(f"{len(w)} terms exceed the configured maximum {max_terms}")
        w.flags.writeable = False
        a.flags.writeable = False
        self.weights = w
        self.alphas = a

    @classmethod
    def product(cls, alpha1: complex, alpha2: complex, weight: complex = 1.0):
        return cls([(weight, alpha1, alpha2)])

    @classmethod
    def from_single_modes(cls, psi1, psi2) -> "CoherentSuperposition":
        """Tensor product of two single-mode expansions ``[(w, alpha), ...]``."""
        return cls([(w1 * w2, a1, a2) for w1, a1 in psi1 for w2, a2 in psi2])

    @property
    def terms(self):
        return [(complex(w), complex(a[0]), complex(a[1])) for w, a in zip(self.weights, self.alphas)]

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        body = " + ".join(f"({w:.4g})|{a1:.4g},{a2:.4g}>" for w, a1, a2 in self.terms)
        return f"CoherentSuperposition({body or '0'})"

    def __add__(self, other):
        return CoherentSuperposition(self.terms + other.terms)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, c):
        return CoherentSuperposition((c * w, a1, a2) for w, a1, a2 in self.terms)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / c)

    def exchanged(self) -> "CoherentSuperposition":
        """Swap the two mode labels of every term."""
        return CoherentSuperposition((w, a2, a1) for w, a1, a2 in self.terms)

    def norm_squared(self) -> float:
        return float(overlap(self, self).real)

    def norm(self) -> float:
        return float(np.sqrt(max(self.norm_squared(), 0.0)))

    def normalized(self) -> "CoherentSuperposition":
        n = self.norm()
        if n == 0:
            raise ZeroState("cannot normalize a zero superposition")
        return self / n

    def mean_photons(self):
        """Normalized ``(<n1>, <n2>)`` from ``<a_i^dag a_i>`` in the coherent basis."""
        g = gram(self, self)
        wcw = np.conj(self.weights)[:, None] * self.weights[None, :] * g
        norm = wcw.sum().real
        if norm == 0:
            raise ZeroState("mean photon number of a zero superposition")
        out = []
        for m in range(2):
            amp = np.conj(self.alphas[:, m])[:, None] * self.alphas[None, :, m]
            out.append(float((wcw * amp).sum().real / norm))
        return tuple(out)

    def with_phase_convention(self) -> "CoherentSuperposition":
        """Global phase chosen so that the first term's weight is real positive."""
        if len(self) == 0 or self.weights[0] == 0:
            return self
        ph = self.weights[0] / abs(self.weights[0])
        return self * np.conj(ph)

    # -- serialization ------------------------------------------------------

    def to_records(self) -> dict:
        """``{"kind": "coherent", "columns": [...], "terms": [[re w, im w, re a1, im a1, re a2, im a2], ...]}``."""
        rows = [[float(w.real), float(w.imag), float(a[0].real), float(a[0].imag),
                 float(a[1].real), float(a[1].imag)] for w, a in zip(self.weights, self.alphas)]
        return {"kind": "coherent",
                "columns": ["w_re", "w_im", "alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im"],
                "terms": rows}

    @classmethod
    def from_records(cls, data) -> "CoherentSuperposition":
        return cls((complex(r[0], r[1]), complex(r[2], r[3]), complex(r[4], r[5]))
                   for r in data["terms"])

    def dumps(self) -> str:
        return json.dumps(self.to_records())

    @classmethod
    def loads(cls, text: str) -> "CoherentSuperposition":
        return cls.from_records(json.loads(text))


def _merge(w, a, tol):
    if len(w) <= 1:
        return w.copy(), a.copy()
    keep_w, keep_a = [], []
    for wi, ai in zip(w, a):
        for k, ak in enumerate(keep_a):
            if np.max(np.abs(ak - ai)) < tol:
                keep_w[k] += wi
                break
        else:
            keep_w.append(complex(wi))
            keep_a.append(ai.copy())
    return np.array(keep_w, complex), np.array(keep_a, complex).reshape(-1, 2)


def gram(x: CoherentSuperposition, y: CoherentSuperposition) -> np.ndarray:
    """``G[j, k] = <alpha_j | beta_k>`` for the two-mode coherent products."""
    a = x.alphas[:, None, :]
    b = y.alphas[None, :, :]
    expo = -0.5 * np.abs(a) ** 2 - 0.5 * np.abs(b) ** 2 + np.conj(a) * b
    return np.exp(expo.sum(axis=-1))


def overlap(x: CoherentSuperposition, y: CoherentSuperposition) -> complex:
    """``<x|y>`` in closed form."""
    if len(x) == 0 or len(y) == 0:
        return 0j
    return complex(np.conj(x.weights) @ gram(x, y) @ y.weights)


def mode_transform(s: CoherentSuperposition, u, atol: float = 1e-10) -> CoherentSuperposition:
    """Apply the linear-optics transform with mode matrix ``u``: ``alpha -> u @ alpha``.

    Raises
    ------
    NonUnitary
        If ``u`` is not unitary to ``atol``.
    """
    u = np.asarray(u, complex)
    if not is_unitary(u, atol):
        raise NonUnitary(f"mode matrix is not unitary:\n{u}")
    return _transform(s, u)


def _transform(s, u):
    new = s.alphas @ u.T
    return CoherentSuperposition(zip(s.weights, new[:, 0], new[:, 1]))


def phase_shift(s: CoherentSuperposition, phi1: float, phi2: float) -> CoherentSuperposition:
    """``exp(i phi1 n1 + i phi2 n2)``: each amplitude gains ``exp(i phi_j)``."""
    return _transform(s, np.diag([np.exp(1j * phi1), np.exp(1j * phi2)]))


def fidelity_coherent(a: CoherentSuperposition, b: CoherentSuperposition) -> float:
    """``|<a|b>|^2 / (||a||^2 ||b||^2)``."""
    na, nb = a.norm_squared(), b.norm_squared()
    if na <= 0 or nb <= 0:
        raise ZeroState("fidelity with a zero superposition")
    return float(min(1.0, abs(overlap(a, b)) ** 2 / (na * nb)))


def to_fock(s: CoherentSuperposition, cutoff: FockCutoff, tol: float = LEAKAGE_TOL,
            accept_leakage: bool = False) -> TwoModeState:
    """Expand in the truncated Fock basis (unnormalized, as the superposition is).

    Raises
    ------
    CutoffTooSmall
        If any term leaks more than ``tol`` past the cutoff.
    """
    amps = np.zeros(cutoff.shape, complex)
    for w, a1, a2 in s.terms:
        l1 = coherent_leakage(a1, cutoff.nmax1)
        l2 = coherent_leakage(a2, cutoff.nmax2)
        leak = l1 + l2 - l1 * l2
        if leak > tol and not accept_leakage:
            raise CutoffTooSmall(f"term |{a1}, {a2}> leaks {leak:.3g} past cutoff {cutoff}")
        amps += w * np.outer(coherent_amplitudes(a1, cutoff.nmax1),
                             coherent_amplitudes(a2, cutoff.nmax2))
    return TwoModeState(amps, cutoff)


def secs(alpha: complex, beta: complex, sign: int = +1) -> CoherentSuperposition:
    """Unnormalized symmetric entangled coherent state ``|alpha,beta> + sign |beta,alpha>``."""
    return CoherentSuperposition([(1.0, alpha, beta), (float(sign), beta, alpha)])
