"""Truncated two-mode Fock space and the five-level ancilla.

Photonic amplitudes are stored densely as a ``(nmax1 + 1, nmax2 + 1)`` complex
array indexed by the occupations ``(n1, n2)``. Ladder operators truncate
silently at the cutoff; validity of a truncation is checked once, when a
state is built (see :func:`coherent_fock`).

Linear-optics transforms are applied per photon-number sector. A 2x2 mode
matrix ``u`` acts on the mode operators as ``a_i -> sum_j u_ij a_j`` (the
Heisenberg picture), which sends a coherent amplitude vector ``alpha`` to
``u @ alpha``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np
import scipy.linalg as la
from scipy.special import gammainc

from .errors import CutoffTooSmall, ZeroState

LEAKAGE_TOL = 1e-8
NORM_SLACK = 1e-9


@dataclass(frozen=True)
class FockCutoff:
    """Per-mode truncation (largest photon number kept, inclusive)."""

    nmax1: int
    nmax2: int

    def __post_init__(self):
        if int(self.nmax1) != self.nmax1 or int(self.nmax2) != self.nmax2:
            raise ValueError("cutoffs must be integers")
        if self.nmax1 < 0 or self.nmax2 < 0:
            raise ValueError("cutoffs must be non-negative")
        object.__setattr__(self, "nmax1", int(self.nmax1))
        object.__setattr__(self, "nmax2", int(self.nmax2))

    @classmethod
    def square(cls, n: int) -> "FockCutoff":
        return cls(n, n)

    @property
    def shape(self):
        return (self.nmax1 + 1, self.nmax2 + 1)

    @property
    def dim(self) -> int:
        return (self.nmax1 + 1) * (self.nmax2 + 1)


class TwoModeState:
    """Immutable amplitude array over ``|n1, n2>`` with ``n_i <= nmax_i``."""

    __slots__ = ("_amps", "cutoff")

    def __init__(self, amplitudes, cutoff: FockCutoff | None = None):
        amps = np.array(amplitudes, dtype=complex)
        if amps.ndim != 2:
            raise ValueError("amplitudes must be a 2-D array indexed by (n1, n2)")
        if cutoff is None:
            cutoff = FockCutoff(amps.shape[0] - 1, amps.shape[1] - 1)
        if amps.shape != cutoff.shape:
            raise ValueError(f"amplitude shape {amps.shape} does not match cutoff {cutoff.shape}")
        amps.flags.writeable = False
        self._amps = amps
        self.cutoff = cutoff

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def vector(self) -> np.ndarray:
        """Flattened amplitudes, row-major in ``(n1, n2)``."""
        return self._amps.reshape(-1)

    @classmethod
    def from_vector(cls, vec, cutoff: FockCutoff) -> "TwoModeState":
        return cls(np.asarray(vec).reshape(cutoff.shape), cutoff)

    @classmethod
    def zeros(cls, cutoff: FockCutoff) -> "TwoModeState":
        return cls(np.zeros(cutoff.shape, complex), cutoff)

    def __repr__(self):
        return f"TwoModeState(cutoff={self.cutoff}, norm={self.norm():.6g})"

    def __add__(self, other):
        _same_cutoff(self, other)
        return TwoModeState(self._amps + other._amps, self.cutoff)

    def __sub__(self, other):
        _same_cutoff(self, other)
        return TwoModeState(self._amps - other._amps, self.cutoff)

    def __mul__(self, c):
        return TwoModeState(self._amps * c, self.cutoff)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return TwoModeState(self._amps / c, self.cutoff)

    def __neg__(self):
        return TwoModeState(-self._amps, self.cutoff)

    def norm_squared(self) -> float:
        return float(np.vdot(self._amps, self._amps).real)

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def normalized(self) -> "TwoModeState":
        n = self.norm()
        if n == 0:
            raise ZeroState("cannot normalize the zero vector")
        return self / n

    def inner(self, other) -> complex:
        """``<self|other>``."""
        _same_cutoff(self, other)
        return complex(np.vdot(self._amps, other._amps))

    def mean_photons(self):
        """Unnormalized ``(<n1>, <n2>)``: weighted by the squared amplitudes."""
        p = np.abs(self._amps) ** 2
        n1 = np.arange(self.cutoff.nmax1 + 1)
        n2 = np.arange(self.cutoff.nmax2 + 1)
        return float(n1 @ p.sum(axis=1)), float(p.sum(axis=0) @ n2)

    def sector_norms(self) -> np.ndarray:
        """Squared norm in each total-photon-number sector ``N = n1 + n2``."""
        p = np.abs(self._amps) ** 2
        out = np.zeros(self.cutoff.nmax1 + self.cutoff.nmax2 + 1)
        n1, n2 = np.indices(p.shape)
        np.add.at(out, (n1 + n2).ravel(), p.ravel())
        return out

    def with_phase_convention(self, rel_tol: float = 1e-12) -> "TwoModeState":
        """Rotate the global phase so that the first non-negligible amplitude is real positive."""
        flat = self.vector
        scale = np.max(np.abs(flat)) if flat.size else 0.0
        if scale == 0:
            return self
        idx = int(np.argmax(np.abs(flat) > rel_tol * scale))
        ph = flat[idx] / abs(flat[idx])
        return self * np.conj(ph)

    # -- serialization ------------------------------------------------------

    def to_records(self, atol: float = 0.0) -> dict:
        """JSON-compatible ``{"cutoff": [nmax1, nmax2], "amplitudes": [[n1, n2, re, im], ...]}``."""
        recs = []
        for (i, j), a in np.ndenumerate(self._amps):
            if abs(a) > atol:
                recs.append([int(i), int(j), float(a.real), float(a.imag)])
        return {"cutoff": [self.cutoff.nmax1, self.cutoff.nmax2], "amplitudes": recs}

    @classmethod
    def from_records(cls, data: Mapping) -> "TwoModeState":
        cutoff = FockCutoff(*data["cutoff"])
        amps = np.zeros(cutoff.shape, complex)
        for n1, n2, re, im in data["amplitudes"]:
            amps[int(n1), int(n2)] = complex(re, im)
        return cls(amps, cutoff)

    def dumps(self) -> str:
        return json.dumps(self.to_records())

    @classmethod
    def loads(cls, text: str) -> "TwoModeState":
        return cls.from_records(json.loads(text))


def _same_cutoff(a: TwoModeState, b: TwoModeState):
    if a.cutoff != b.cutoff:
        raise ValueError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")


class AncillaLevel(enum.Enum):
    """Levels of the ancilla; ``m`` and ``g`` are the two long-lived ground states."""

    M = "m"
    G = "g"
    A = "a"
    B = "b"
    C = "c"

    @property
    def index(self) -> int:
        return _LEVEL_ORDER.index(self)


_LEVEL_ORDER = [AncillaLevel.M, AncillaLevel.G, AncillaLevel.A, AncillaLevel.B, AncillaLevel.C]
LEVELS = tuple(_LEVEL_ORDER)


class JointState:
    """Ancilla-level-indexed family of photonic branches sharing one cutoff.

    Missing levels are zero branches. The amplitudes are stored as a
    ``(5, nmax1 + 1, nmax2 + 1)`` array in the order ``m, g, a, b, c``.
    """

    __slots__ = ("_data", "cutoff")

    def __init__(self, branches: Mapping, cutoff: FockCutoff | None = None):
        if cutoff is None:
            cutoff = next(iter(branches.values())).cutoff
        data = np.zeros((5,) + cutoff.shape, complex)
        for level, state in branches.items():
            level = AncillaLevel(level)
            if state.cutoff != cutoff:
                raise ValueError("all branches must share one cutoff")
            data[level.index] = state.amplitudes
        data.flags.writeable = False
        self._data = data
        self.cutoff = cutoff

    @classmethod
    def from_array(cls, data, cutoff: FockCutoff) -> "JointState":
        data = np.asarray(data, complex).reshape((5,) + cutoff.shape)
        obj = cls.__new__(cls)
        arr = data.copy()
        arr.flags.writeable = False
        obj._data = arr
        obj.cutoff = cutoff
        return obj

    @classmethod
    def product(cls, level, photonic: TwoModeState) -> "JointState":
        return cls({AncillaLevel(level): photonic}, photonic.cutoff)

    @property
    def array(self) -> np.ndarray:
        return self._data

    def branch(self, level) -> TwoModeState:
        return TwoModeState(self._data[AncillaLevel(level).index], self.cutoff)

    def populations(self) -> dict:
        p = np.sum(np.abs(self._data) ** 2, axis=(1, 2))
        return {lvl: float(p[lvl.index]) for lvl in LEVELS}

    def norm(self) -> float:
        return float(np.linalg.norm(self._data))

    def __repr__(self):
        pops = ", ".join(f"{k.value}={v:.3g}" for k, v in self.populations().items())
        return f"JointState({pops})"


# -- states -----------------------------------------------------------------

def fock_state(n1: int, n2: int, cutoff: FockCutoff) -> TwoModeState:
    if not (0 <= n1 <= cutoff.nmax1 and 0 <= n2 <= cutoff.nmax2):
        raise CutoffTooSmall(f"|{n1},{n2}> lies outside cutoff {cutoff}")
    amps = np.zeros(cutoff.shape, complex)
    amps[n1, n2] = 1.0
    return TwoModeState(amps, cutoff)


def product_state(v1, v2, cutoff: FockCutoff | None = None) -> TwoModeState:
    """``|v1> (x) |v2>`` from single-mode amplitude vectors (zero-padded to the cutoff)."""
    v1 = np.asarray(v1, complex).ravel()
    v2 = np.asarray(v2, complex).ravel()
    if cutoff is None:
        cutoff = FockCutoff(len(v1) - 1, len(v2) - 1)
    if len(v1) > cutoff.nmax1 + 1 or len(v2) > cutoff.nmax2 + 1:
        if np.any(v1[cutoff.nmax1 + 1:]) or np.any(v2[cutoff.nmax2 + 1:]):
            raise CutoffTooSmall("single-mode amplitudes extend beyond the cutoff")
        v1 = v1[:cutoff.nmax1 + 1]
        v2 = v2[:cutoff.nmax2 + 1]
    a = np.zeros(cutoff.nmax1 + 1, complex)
    b = np.zeros(cutoff.nmax2 + 1, complex)
    a[:len(v1)] = v1
    b[:len(v2)] = v2
    return TwoModeState(np.outer(a, b), cutoff)


def coherent_amplitudes(alpha: complex, nmax: int) -> np.ndarray:
    """``exp(-|alpha|^2/2) alpha^n / sqrt(n!)`` for ``n = 0..nmax`` (by recursion)."""
    out = np.empty(nmax + 1, complex)
    out[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, nmax + 1):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


def coherent_leakage(alpha: complex, nmax: int) -> float:
    """Poisson weight beyond ``nmax``: ``P(n > nmax)`` at mean ``|alpha|^2``."""
    lam = abs(alpha) ** 2
    if lam == 0:
        return 0.0
    return float(gammainc(nmax + 1, lam))


def coherent_fock(alpha1: complex, alpha2: complex, cutoff: FockCutoff,
                  tol: float = LEAKAGE_TOL, accept_leakage: bool = False) -> TwoModeState:
    """Truncated, renormalized product coherent state ``|alpha1> |alpha2>``.

    Raises
    ------
    CutoffTooSmall
        If the discarded probability exceeds ``tol`` and ``accept_leakage``
        is false.
    """
    l1 = coherent_leakage(alpha1, cutoff.nmax1)
    l2 = coherent_leakage(alpha2, cutoff.nmax2)
    leak = l1 + l2 - l1 * l2
    if leak > tol and not accept_leakage:
        raise CutoffTooSmall(f"truncation leakage {leak:.3g} exceeds tolerance {tol:.3g} "
                             f"for alpha=({alpha1}, {alpha2}) at cutoff {cutoff}")
    return product_state(coherent_amplitudes(alpha1, cutoff.nmax1),
                         coherent_amplitudes(alpha2, cutoff.nmax2), cutoff).normalized()


# -- operators --------------------------------------------------------------

def annihilate(state: TwoModeState, mode: int) -> TwoModeState:
    """``a_mode |psi>``; the ``n = 0`` row maps to zero."""
    amps = state.amplitudes
    out = np.zeros_like(amps)
    if mode == 1:
        n = np.sqrt(np.arange(1, state.cutoff.nmax1 + 1))
        out[:-1, :] = n[:, None] * amps[1:, :]
    elif mode == 2:
        n = np.sqrt(np.arange(1, state.cutoff.nmax2 + 1))
        out[:, :-1] = amps[:, 1:] * n[None, :]
    else:
        raise ValueError("mode must be 1 or 2")
    return TwoModeState(out, state.cutoff)


def create(state: TwoModeState, mode: int) -> TwoModeState:
    """``a_mode^dag |psi>``; amplitude pushed past the cutoff is dropped."""
    amps = state.amplitudes
    out = np.zeros_like(amps)
    if mode == 1:
        n = np.sqrt(np.arange(1, state.cutoff.nmax1 + 1))
        out[1:, :] = n[:, None] * amps[:-1, :]
    elif mode == 2:
        n = np.sqrt(np.arange(1, state.cutoff.nmax2 + 1))
        out[:, 1:] = amps[:, :-1] * n[None, :]
    else:
        raise ValueError("mode must be 1 or 2")
    return TwoModeState(out, state.cutoff)


def number(state: TwoModeState, mode: int) -> TwoModeState:
    return create(annihilate(state, mode), mode)


def ladder_matrices(cutoff: FockCutoff):
    """Dense ``(a1, a2)`` on the flattened two-mode space (row-major ``(n1, n2)``)."""
    def single(nmax):
        return np.diag(np.sqrt(np.arange(1, nmax + 1)), k=1).astype(complex)
    a1 = np.kron(single(cutoff.nmax1), np.eye(cutoff.nmax2 + 1))
    a2 = np.kron(np.eye(cutoff.nmax1 + 1), single(cutoff.nmax2))
    return a1, a2


def bs_matrix(theta: float, phi: float = 0.0) -> np.ndarray:
    """Heisenberg mode matrix of the beam splitter of angle ``theta`` and phase ``phi``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -1j * np.exp(1j * phi) * s],
                     [-1j * np.exp(-1j * phi) * s, c]])


def is_unitary(u, atol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return u.shape == (2, 2) and np.allclose(u.conj().T @ u, np.eye(2), rtol=0, atol=atol)


def mode_generator(u) -> np.ndarray:
    """Hermitian ``h`` with ``expm(-1j * h) == u`` (one branch of the logarithm)."""
    t, z = la.schur(np.asarray(u, complex), output="complex")
    mu = np.angle(np.diag(t))
    return -(z * mu) @ z.conj().T


@lru_cache(maxsize=512)
def _sector_ladders(n_total: int):
    k = np.arange(n_total + 1)
    up = np.sqrt((k[:-1] + 1) * (n_total - k[:-1]))   # <k+1| a1^dag a2 |k>
    return k, up


def sector_unitary(h, n_total: int) -> np.ndarray:
    """Action of ``exp(-i sum h_pq a_p^dag a_q)`` on the sector spanned by ``|k, N-k>``."""
    k, up = _sector_ladders(n_total)
    gen = np.diag(h[0, 0] * k + h[1, 1] * (n_total - k)).astype(complex)
    if n_total > 0:
        idx = np.arange(n_total)
        gen[idx + 1, idx] = h[0, 1] * up
        gen[idx, idx + 1] = h[1, 0] * up
    w, v = la.eigh(gen)
    return (v * np.exp(-1j * w)) @ v.conj().T


def apply_mode_unitary(state: TwoModeState, u) -> TwoModeState:
    """Unitary image of ``state`` under the linear-optics transform with mode matrix ``u``.

    Each photon-number sector is transformed exactly; components pushed
    past a rectangular cutoff are dropped.
    """
    h = mode_generator(u)
    h = (h + h.conj().T) / 2
    amps = state.amplitudes
    c1, c2 = state.cutoff.nmax1, state.cutoff.nmax2
    out = np.zeros_like(amps)
    for n_total in range(c1 + c2 + 1):
        lo, hi = max(0, n_total - c2), min(n_total, c1)
        k = np.arange(lo, hi + 1)
        block = amps[k, n_total - k]
        if not np.any(block):
            continue
        s = sector_unitary(h, n_total)
        out[k, n_total - k] = s[np.ix_(k, k)] @ block
    return TwoModeState(out, state.cutoff)


def apply_bs(state: TwoModeState, theta: float, phi: float = 0.0) -> TwoModeState:
    """Beam splitter ``[[cos t, -i e^{i phi} sin t], [-i e^{-i phi} sin t, cos t]]``."""
    return apply_mode_unitary(state, bs_matrix(theta, phi))


def apply_phases(state: TwoModeState, phi1: float, phi2: float) -> TwoModeState:
    """``exp(i phi1 n1 + i phi2 n2)``: coherent amplitudes gain ``exp(i phi_j)``."""
    n1 = np.arange(state.cutoff.nmax1 + 1)[:, None]
    n2 = np.arange(state.cutoff.nmax2 + 1)[None, :]
    return TwoModeState(state.amplitudes * np.exp(1j * (phi1 * n1 + phi2 * n2)), state.cutoff)


def swap_modes(state: TwoModeState) -> TwoModeState:
    """Exact exchange ``a1 <-> a2`` (requires equal per-mode cutoffs)."""
    if state.cutoff.nmax1 != state.cutoff.nmax2:
        raise ValueError("mode exchange needs equal per-mode cutoffs")
    return TwoModeState(state.amplitudes.T, state.cutoff)


def fidelity_fock(a: TwoModeState, b: TwoModeState) -> float:
    """``|<a|b>|^2`` after normalizing both states."""
    na, nb = a.norm_squared(), b.norm_squared()
    if na == 0 or nb == 0:
        raise ZeroState("fidelity with a zero state")
    return min(1.0, abs(a.inner(b)) ** 2 / (na * nb))
