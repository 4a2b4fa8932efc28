"""Physical constants of the four-wave-mixing loop and the effective coefficients.

All frequencies are angular frequencies in s^-1. The effective beam-splitter
Hamiltonian for the photonic modes reads

    H_eff(t) = eta1 n1 + eta2 n2 + chi0 (a1^dag a2 exp(i Delta_F t) + h.c.)

with the coefficients produced by :func:`derive_effective`.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigError, ZeroDetuning

DEFAULT_STRICTNESS = 0.1


@dataclass(frozen=True)
class PhysicalParams:
    """Raw couplings, detunings and decay rates of the five-level scheme.

    Attributes
    ----------
    g1, g2 : float
        Cavity coupling constants of modes 1 and 2.
    omega_rabi1, omega_rabi2 : float
        Classical pump Rabi frequencies.
    delta1, delta2 : float
        One-photon detunings.
    delta_two_photon : float
        Two-photon detuning of level ``c``.
    delta_four_photon : float
        Four-photon detuning carried by the explicit phase on the second pump.
    gamma_a, gamma_b, gamma_c : float
        Radiative decay rates of the excited levels.
    kappa : float
        Cavity damping rate.
    n1, n2 : float
        Mean photon numbers of the input modes (sets the scale of the
        validity ratios and excitation probabilities).
    bs_phase : float
        Phase of the ideal beam-splitter matrix, radians.
    """

    g1: float = 0.0
    g2: float = 0.0
    omega_rabi1: float = 0.0
    omega_rabi2: float = 0.0
    delta1: float = 1.0
    delta2: float = 1.0
    delta_two_photon: float = 0.0
    delta_four_photon: float = 0.0
    gamma_a: float = 0.0
    gamma_b: float = 0.0
    gamma_c: float = 0.0
    kappa: float = 0.0
    n1: float = 0.0
    n2: float = 0.0
    bs_phase: float = 0.0

    def __post_init__(self):
        for name in ("gamma_a", "gamma_b", "gamma_c", "kappa", "n1", "n2"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError(f"{name} must be non-negative, got {value!r}")

    def replace(self, **changes) -> "PhysicalParams":
        return dataclasses.replace(self, **changes)

    def scaled(self, s: float) -> "PhysicalParams":
        """Multiply every coupling and detuning (not rates or photon numbers) by ``s``."""
        return self.replace(
            g1=self.g1 * s, g2=self.g2 * s,
            omega_rabi1=self.omega_rabi1 * s, omega_rabi2=self.omega_rabi2 * s,
            delta1=self.delta1 * s, delta2=self.delta2 * s,
            delta_two_photon=self.delta_two_photon * s,
            delta_four_photon=self.delta_four_photon * s,
        )

    def mirrored(self) -> "PhysicalParams":
        """Exchange the roles of the two modes (g, Omega, Delta, n, gamma_a/b)."""
        return self.replace(
            g1=self.g2, g2=self.g1,
            omega_rabi1=self.omega_rabi2, omega_rabi2=self.omega_rabi1,
            delta1=self.delta2, delta2=self.delta1,
            gamma_a=self.gamma_b, gamma_b=self.gamma_a,
            n1=self.n2, n2=self.n1,
        )

    @property
    def delta_eff(self) -> float:
        """Effective two-level detuning ``delta - Omega1^2/Delta1 - Omega2^2/Delta2``."""
        if self.delta1 == 0 or self.delta2 == 0:
            raise ZeroDetuning("one-photon detunings must be nonzero")
        return (self.delta_two_photon
                - self.omega_rabi1 ** 2 / self.delta1
                - self.omega_rabi2 ** 2 / self.delta2)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


PHYSICAL_KEYS = tuple(f.name for f in dataclasses.fields(PhysicalParams))


@dataclass(frozen=True)
class EffectiveParams:
    """Coefficients of the effective photonic Hamiltonian.

    ``delta_f`` is the four-photon detuning shifted by the differential
    self-phase, ``Delta_F + eta1 - eta2``.
    """

    eta1: float
    eta2: float
    chi0: float
    delta_eff: float = math.inf
    delta_f: float = 0.0

    @property
    def delta_four_photon(self) -> float:
        """Unshifted four-photon detuning recovered from ``delta_f``."""
        return self.delta_f - self.eta1 + self.eta2

    @classmethod
    def from_ratios(cls, chi0: float, ratio: float | None = None,
                    eta_over_chi0: float = 0.0) -> "EffectiveParams":
        """Build parameters from ``chi0``, ``chi0/delta_f`` and ``eta/chi0`` (``eta1 = eta2``).

        ``ratio=None`` (or infinite) means ``delta_f = 0``.
        """
        delta_f = 0.0 if ratio is None or math.isinf(ratio) else chi0 / ratio
        eta = eta_over_chi0 * chi0
        return cls(eta1=eta, eta2=eta, chi0=chi0, delta_f=delta_f)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def derive_effective(p: PhysicalParams) -> EffectiveParams:
    """Compute ``eta_i``, ``chi0``, ``Delta_eff`` and ``delta_F`` from raw parameters.

    Raises
    ------
    ZeroDetuning
        If ``Delta_1``, ``Delta_2`` or ``Delta_eff`` vanishes.
    """
    d_eff = p.delta_eff
    if d_eff == 0:
        raise ZeroDetuning("effective detuning vanishes: delta = Omega1^2/Delta1 + Omega2^2/Delta2")
    eta1 = p.g1 ** 2 / p.delta1 + p.g1 ** 2 * p.omega_rabi1 ** 2 / (p.delta1 ** 2 * d_eff)
    eta2 = p.g2 ** 2 / p.delta2 + p.g2 ** 2 * p.omega_rabi2 ** 2 / (p.delta2 ** 2 * d_eff)
    chi0 = p.omega_rabi1 * p.omega_rabi2 * p.g1 * p.g2 / (p.delta1 * p.delta2 * d_eff)
    return EffectiveParams(eta1=eta1, eta2=eta2, chi0=chi0, delta_eff=d_eff,
                           delta_f=p.delta_four_photon + eta1 - eta2)


def excitation_probabilities(p: PhysicalParams, t: float = 0.0):
    """Scale of the populations of the excited levels ``a``, ``b`` and ``c``.

    ``P_c`` carries the interference of the two pump paths and depends on
    ``Delta_F t``.

    Returns
    -------
    tuple of float
        ``(P_a, P_b, P_c)``.
    """
    d_eff = derive_effective(p).delta_eff
    p_a = p.g1 ** 2 * p.n1 / p.delta1 ** 2
    p_b = p.g2 ** 2 * p.n2 / p.delta2 ** 2
    amp = (p.omega_rabi1 * p.g1 * math.sqrt(p.n1) / (p.delta1 * d_eff)
           + p.omega_rabi2 * p.g2 * math.sqrt(p.n2) * np.exp(1j * p.delta_four_photon * t)
           / (p.delta2 * d_eff))
    return p_a, p_b, float(abs(amp) ** 2)


def max_excitation_probabilities(p: PhysicalParams):
    """Worst case of :func:`excitation_probabilities` over all times."""
    d_eff = derive_effective(p).delta_eff
    p_a, p_b, _ = excitation_probabilities(p)
    amp = (abs(p.omega_rabi1 * p.g1 * math.sqrt(p.n1) / (p.delta1 * d_eff))
           + abs(p.omega_rabi2 * p.g2 * math.sqrt(p.n2) / (p.delta2 * d_eff)))
    return p_a, p_b, amp ** 2


# -- validity audit ---------------------------------------------------------

@dataclass(frozen=True)
class Margin:
    """One inequality ``lhs << rhs`` expressed as ``ratio = lhs / rhs``."""

    name: str
    ratio: float
    strictness: float
    description: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.ratio <= self.strictness)


@dataclass(frozen=True)
class ValidityReport:
    margins: dict = field(default_factory=dict)

    def __getitem__(self, name) -> Margin:
        return self.margins[name]

    def __iter__(self):
        return iter(self.margins.values())

    def __len__(self):
        return len(self.margins)

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.margins.values())

    def failures(self) -> list:
        return [m.name for m in self.margins.values() if not m.passed]

    def as_dict(self) -> dict:
        return {m.name: {"ratio": m.ratio, "strictness": m.strictness, "passed": m.passed}
                for m in self.margins.values()}


def _ratio(lhs: float, rhs: float) -> float:
    lhs, rhs = abs(lhs), abs(rhs)
    if lhs == 0:
        return 0.0
    if rhs == 0:
        return math.inf
    return lhs / rhs


def decay_ab_bounds(p: PhysicalParams, eff: EffectiveParams | None = None):
    """Right-hand sides of the closed-form conditions on ``gamma_a`` and ``gamma_b``.

    These hold the swap at ``delta_F = 0`` and do not carry the photon numbers.
    """
    if eff is None:
        eff = derive_effective(p)
    common = (2 / math.pi) * abs(p.omega_rabi1 * p.omega_rabi2 / eff.delta_eff)
    bound_a = common * _safe_abs_div(p.delta1 * p.g2, p.delta2 * p.g1)
    bound_b = common * _safe_abs_div(p.delta2 * p.g1, p.delta1 * p.g2)
    return bound_a, bound_b


def decay_c_bound(p: PhysicalParams, eff: EffectiveParams | None = None) -> float:
    """Right-hand side of the closed-form ``gamma_c`` condition, worst case over time.

    ``|sqrt(n1 m) + sqrt(n2/m) exp(i Delta_F t / 2)|`` is bounded by
    ``sqrt(n1 |m|) + sqrt(n2 / |m|)`` with ``m = Omega1 g1 Delta2 / (Omega2 g2 Delta1)``.
    """
    if eff is None:
        eff = derive_effective(p)
    num = p.omega_rabi1 * p.g1 * p.delta2
    den = p.omega_rabi2 * p.g2 * p.delta1
    if p.n1 == 0 and p.n2 == 0:
        return math.inf
    if (num == 0 and p.n2 > 0) or (den == 0 and p.n1 > 0):
        return 0.0
    m = abs(num / den) if den != 0 else math.inf
    s = 0.0
    if p.n1 > 0:
        s += math.sqrt(p.n1 * m)
    if p.n2 > 0:
        s += math.sqrt(p.n2 / m)
    return (2 / math.pi) * abs(eff.delta_eff) / s ** 2


def _safe_abs_div(a, b):
    if b == 0:
        return math.inf if a != 0 else 0.0
    return abs(a / b)


def _strictness_for(strictness, name):
    if isinstance(strictness, Mapping):
        return float(strictness.get(name, DEFAULT_STRICTNESS))
    return float(strictness)


def check_validity(p: PhysicalParams, strictness=DEFAULT_STRICTNESS) -> ValidityReport:
    """Audit every ``<<`` inequality the effective model relies on.

    Parameters
    ----------
    p : PhysicalParams
    strictness : float or mapping, optional
        Largest ``lhs/rhs`` ratio counted as ``<<``. A mapping gives per-check
        values keyed by margin name; missing names fall back to the default.

    Returns
    -------
    ValidityReport
        The report is always produced; failures are flags.
    """
    eff = derive_effective(p)
    d_eff = eff.delta_eff
    rows = []
    for i, (g, om, dl, n) in enumerate(((p.g1, p.omega_rabi1, p.delta1, p.n1),
                                         (p.g2, p.omega_rabi2, p.delta2, p.n2)), start=1):
        sq = math.sqrt(n)
        rows.append((f"one_photon_{i}", _ratio(g * sq, dl),
                     f"|g{i} sqrt(n{i}) / Delta{i}| << 1"))
        rows.append((f"two_photon_{i}", _ratio(g * sq * om, dl * d_eff),
                     f"|g{i} sqrt(n{i}) Omega{i} / (Delta{i} Delta_eff)| << 1"))
        rows.append((f"stark_shift_{i}", _ratio(g ** 2 * n / dl, d_eff),
                     f"|g{i}^2 n{i} / Delta{i}| << |Delta_eff|"))
    rows.append(("linewidth_a", _ratio(p.gamma_a, p.delta1), "Gamma_ga << |Delta1|"))
    rows.append(("linewidth_b", _ratio(p.gamma_b, p.delta2), "Gamma_gb << |Delta2|"))
    rows.append(("linewidth_c", _ratio(p.gamma_c, d_eff), "Gamma_gc << |Delta_eff|"))
    bound_a, bound_b = decay_ab_bounds(p, eff)
    rows.append(("decay_a", _ratio(p.gamma_a, bound_a),
                 "gamma_a << (2/pi)|Omega1 Omega2/Delta_eff * Delta1/Delta2 * g2/g1|"))
    rows.append(("decay_b", _ratio(p.gamma_b, bound_b),
                 "gamma_b << (2/pi)|Omega1 Omega2/Delta_eff * Delta2/Delta1 * g1/g2|"))
    rows.append(("decay_c", _ratio(p.gamma_c, decay_c_bound(p, eff)),
                 "gamma_c << (2/pi)|Delta_eff| / |sqrt(n1 m) + sqrt(n2/m)|^2"))
    margins = {name: Margin(name, ratio, _strictness_for(strictness, name), desc)
               for name, ratio, desc in rows}
    return ValidityReport(margins)


# -- configuration ----------------------------------------------------------

def physical_from_mapping(section: Mapping, section_name: str = "physical",
                          required=("g1", "g2", "omega_rabi1", "omega_rabi2",
                                    "delta1", "delta2", "delta_two_photon")) -> PhysicalParams:
    """Build :class:`PhysicalParams` from a flat key-value mapping.

    Keys are the field names. Missing required keys, unknown keys and
    non-numeric values raise :class:`~condswap.errors.ConfigError`.
    """
    values = {}
    for key in section:
        if key not in PHYSICAL_KEYS:
            raise ConfigError(f"{section_name}.{key}", "unknown key")
        raw = section[key]
        try:
            values[key] = float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"{section_name}.{key}", f"not a number: {raw!r}") from None
    for key in required:
        if key not in values:
            raise ConfigError(f"{section_name}.{key}", "missing required key")
    try:
        return PhysicalParams(**values)
    except ValueError as exc:
        raise ConfigError(section_name, str(exc)) from None


def load_physical(path) -> PhysicalParams:
    """Read the ``[physical]`` section of an INI-style configuration file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path) as fh:
        parser.read_file(fh)
    if not parser.has_section("physical"):
        raise ConfigError("physical", "missing section")
    return physical_from_mapping(dict(parser["physical"]))
