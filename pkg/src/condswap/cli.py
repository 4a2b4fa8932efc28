"""Command-line front end.

Subcommands ``run``, ``fig3a``, ``fig3b``, ``compare``, ``decoherence`` and
``validity`` read an INI configuration with sections ``[physical]``,
``[inputs]``, ``[sweep]`` and ``[output]`` and write CSV/JSON files.

Exit codes: 0 success, 2 configuration error, 3 regime violation,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .coherent import CoherentSuperposition, fidelity_coherent, mode_transform, secs
from .decoherence import DECOHERENCE_COLUMNS, decay_budget, fidelity_curve
from .dynamics import (COMPARE_COLUMNS, compare_full_vs_effective, effective_mode_matrix,
                       output_phases, swap_angle_ratio, swap_time, swapped_output, wrap_phase)
from .errors import (ConfigError, CutoffTooSmall, RegimeViolation, StepFailure,
                     SwapUnreachable, ZeroDetuning, ZeroState)
from .hilbert import FockCutoff, fidelity_fock, fock_state, product_state
from .params import EffectiveParams, PhysicalParams, check_validity, derive_effective, physical_from_mapping
from .protocol import EffectiveSwap, FullSwap, IdealSwap, run_protocol, symmetric_target

EXIT_OK, EXIT_CONFIG, EXIT_REGIME, EXIT_NUMERIC = 0, 2, 3, 4

FIG3A_COLUMNS = ("ratio", "chi0_ts", "reachable")
FIG3B_COLUMNS = ("ratio", "eta_over_chi0", "phi1", "phi2", "fidelity")
FIG3B_RIDGE_COLUMNS = ("ratio", "eta_over_chi0", "fidelity")
RIDGE_WINDOW = 3.0

DEFAULT_GRIDS = {
    "fig3a": {"ratio": "log:0.5:100:200"},
    "fig3b": {"ratio": "log:0.8:10:40", "eta_over_chi0": "lin:0:2:40"},
    "decoherence": {"time": "log:1e-8:1e-4:41"},
}
GRID_KEYS = ("ratio", "eta_over_chi0", "time")
SWEEP_OPTIONS = {"evolution": ("magnus", "exact"), "samples": None}
INPUT_KEYS = ("backend", "alpha", "beta", "fock1", "fock2", "cutoff", "sign", "swap", "duration",
              "which_path_factor")
OUTPUT_KEYS = ("directory", "formats")


# -- configuration ----------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    """Strictly monotone sample grid parsed from ``lin:a:b:n``, ``log:a:b:n`` or ``list:v1,v2,...``."""

    spec: str
    values: tuple

    @classmethod
    def parse(cls, spec: str, path: str = "sweep") -> "Grid":
        text = spec.strip()
        kind, _, body = text.partition(":")
        try:
            if kind == "list":
                vals = [float(v) for v in body.split(",") if v.strip()]
            elif kind in ("lin", "log"):
                a, b, n = body.split(":")
                a, b, n = float(a), float(b), int(n)
                if n < 1:
                    raise ValueError("point count must be positive")
                if kind == "log":
                    if a <= 0 or b <= 0:
                        raise ValueError("log grid bounds must be positive")
                    vals = np.geomspace(a, b, n).tolist() if n > 1 else [a]
                else:
                    vals = np.linspace(a, b, n).tolist() if n > 1 else [a]
            else:
                raise ValueError(f"unknown grid kind {kind!r}")
        except ValueError as exc:
            raise ConfigError(path, f"bad grid {spec!r}: {exc}") from None
        if not vals:
            raise ConfigError(path, "grid is empty")
        diffs = np.diff(vals)
        if len(vals) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ConfigError(path, f"grid {spec!r} is not strictly monotone")
        return cls(text, tuple(vals))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class InputsConfig:
    backend: str = "coherent"
    alpha: complex = 6 * math.sqrt(2)
    beta: complex = math.sqrt(2)
    fock1: int = 0
    fock2: int = 0
    cutoff: int | None = None
    sign: int = +1
    swap: str = "ideal"
    duration: float | None = None
    which_path_factor: float = 2.0


@dataclass(frozen=True)
class RunConfig:
    physical: PhysicalParams | None = None
    inputs: InputsConfig = field(default_factory=InputsConfig)
    sweep: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    output_dir: Path = Path(".")
    formats: tuple = ("csv",)

    def grid(self, name: str, command: str) -> Grid:
        if name in self.sweep:
            return self.sweep[name]
        return Grid.parse(DEFAULT_GRIDS[command][name], f"sweep.{name}")

    def require_physical(self) -> PhysicalParams:
        if self.physical is None:
            raise ConfigError("physical", "missing section")
        return self.physical

    def resolved(self) -> dict:
        """Plain-data view of the configuration, embedded in JSON outputs."""
        inp = self.inputs
        inputs = {"backend": inp.backend, "sign": inp.sign, "swap": inp.swap}
        if inp.backend == "coherent":
            inputs.update(alpha=inp.alpha, beta=inp.beta)
        else:
            inputs.update(fock1=inp.fock1, fock2=inp.fock2, cutoff=inp.cutoff)
        if inp.duration is not None:
            inputs["duration"] = inp.duration
        inputs["which_path_factor"] = inp.which_path_factor
        return {
            "physical": None if self.physical is None else self.physical.as_dict(),
            "inputs": inputs,
            "sweep": {k: g.spec for k, g in sorted(self.sweep.items())},
            "options": dict(sorted(self.options.items())),
            "output": {"directory": str(self.output_dir), "formats": list(self.formats)},
        }


def _number(section, key, conv=float):
    raw = section[key]
    try:
        return conv(raw.replace(" ", "")) if conv is complex else conv(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"inputs.{key}", f"not a valid value: {raw!r}") from None


def _parse_inputs(sec) -> InputsConfig:
    for key in sec:
        if key not in INPUT_KEYS:
            raise ConfigError(f"inputs.{key}", "unknown key")
    has_coh = any(k in sec for k in ("alpha", "beta"))
    has_fock = any(k in sec for k in ("fock1", "fock2"))
    backend = sec.get("backend")
    if backend is None:
        if has_coh and has_fock:
            raise ConfigError("inputs.backend", "both coherent and Fock inputs given; select one backend")
        backend = "fock" if has_fock else "coherent"
    if backend not in ("coherent", "fock"):
        raise ConfigError("inputs.backend", f"must be 'coherent' or 'fock', got {backend!r}")
    if backend == "coherent" and has_fock:
        raise ConfigError("inputs.fock1", "Fock occupations given with the coherent backend")
    if backend == "fock" and has_coh:
        raise ConfigError("inputs.alpha", "coherent amplitudes given with the Fock backend")
    kw = {"backend": backend}
    for key in ("alpha", "beta"):
        if key in sec:
            kw[key] = _number(sec, key, complex)
    for key in ("fock1", "fock2", "cutoff", "sign"):
        if key in sec:
            kw[key] = _number(sec, key, int)
    for key in ("duration", "which_path_factor"):
        if key in sec:
            kw[key] = _number(sec, key)
    for key in ("alpha", "beta"):
        if key in kw and kw[key].imag == 0:
            kw[key] = kw[key].real
    if "swap" in sec:
        kw["swap"] = sec["swap"]
        if kw["swap"] not in ("ideal", "effective", "full"):
            raise ConfigError("inputs.swap", f"must be ideal, effective or full, got {kw['swap']!r}")
    if kw.get("sign", 1) not in (1, -1):
        raise ConfigError("inputs.sign", "must be +1 or -1")
    if min(kw.get("fock1", 0), kw.get("fock2", 0)) < 0:
        raise ConfigError("inputs.fock1", "occupations must be non-negative")
    if kw.get("cutoff") is not None and kw["cutoff"] < 0:
        raise ConfigError("inputs.cutoff", "must be non-negative")
    return InputsConfig(**kw)


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    """Parse INI text into a :class:`RunConfig`."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0]) from None
    known = {"physical", "inputs", "sweep", "output"}
    for name in parser.sections():
        if name not in known:
            raise ConfigError(name, "unknown section")
    physical = physical_from_mapping(dict(parser["physical"])) if parser.has_section("physical") else None
    inputs = _parse_inputs(dict(parser["inputs"])) if parser.has_section("inputs") else InputsConfig()
    sweep, options = {}, {}
    if parser.has_section("sweep"):
        for key, raw in parser["sweep"].items():
            if key in GRID_KEYS:
                sweep[key] = Grid.parse(raw, f"sweep.{key}")
            elif key == "evolution":
                if raw not in SWEEP_OPTIONS["evolution"]:
                    raise ConfigError("sweep.evolution", f"must be magnus or exact, got {raw!r}")
                options[key] = raw
            elif key == "samples":
                try:
                    options[key] = int(raw)
                except ValueError:
                    raise ConfigError("sweep.samples", f"not an integer: {raw!r}") from None
            else:
                raise ConfigError(f"sweep.{key}", "unknown key")
    out_dir, formats = Path("."), ("csv",)
    if parser.has_section("output"):
        sec = parser["output"]
        for key in sec:
            if key not in OUTPUT_KEYS:
                raise ConfigError(f"output.{key}", "unknown key")
        out_dir = Path(sec.get("directory", "."))
        formats = tuple(f.strip() for f in sec.get("formats", "csv").split(",") if f.strip())
        bad = [f for f in formats if f not in ("csv", "json")]
        if bad or not formats:
            raise ConfigError("output.formats", f"unsupported formats {bad or formats}")
    return RunConfig(physical, inputs, sweep, options, out_dir, formats)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))


# -- deterministic writers --------------------------------------------------

def _json_value(x, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v, indent, level + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(x, (list, tuple)):
        if not x:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in x):
            return "[" + ", ".join(_json_value(v, indent, level + 1) for v in x) + "]"
        return "[\n" + ",\n".join(pad + _json_value(v, indent, level + 1) for v in x) + "\n" + end + "]"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(x, (complex, np.complexfloating)):
        return _json_value([x.real, x.imag], indent, level)
    return json.dumps(str(x))


def dumps_json(obj, indent: int = 1) -> str:
    """JSON text with 17 significant digits for every float; non-finite floats become ``null``."""
    return _json_value(obj, indent, 0) + "\n"


def _csv_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "nan" if math.isnan(x) else format(x, ".12g")
    return str(x)


def dumps_csv(columns, rows) -> str:
    """CSV text with a header row and 12 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_cell(v) for v in r])
    return buf.getvalue()


def _write_table(cfg: RunConfig, stem: str, columns, rows, extra=None):
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    if "csv" in cfg.formats:
        p = cfg.output_dir / f"{stem}.csv"
        p.write_text(dumps_csv(columns, rows))
        paths.append(p)
    if "json" in cfg.formats:
        doc = {"command": stem, "config": cfg.resolved(), "columns": list(columns),
               "rows": [list(r) for r in rows]}
        if extra:
            doc.update(extra)
        p = cfg.output_dir / f"{stem}.json"
        p.write_text(dumps_json(doc))
        paths.append(p)
    return paths


def _parallel_map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- commands ---------------------------------------------------------------

def _fidelity(a, b):
    if isinstance(a, CoherentSuperposition):
        return fidelity_coherent(a, b)
    return fidelity_fock(a, b)


def _photonic_inputs(cfg: RunConfig):
    inp = cfg.inputs
    if inp.backend == "coherent":
        return inp.alpha, inp.beta, None
    n = max(inp.fock1, inp.fock2) if inp.cutoff is None else inp.cutoff
    if max(inp.fock1, inp.fock2) > n:
        raise ConfigError("inputs.cutoff", f"cutoff {n} below the Fock occupation")
    basis = np.eye(n + 1)
    return basis[inp.fock1], basis[inp.fock2], FockCutoff(n, n)


def _swap_spec(cfg: RunConfig):
    inp = cfg.inputs
    if inp.swap == "ideal":
        phi = cfg.physical.bs_phase if cfg.physical is not None else 0.0
        return IdealSwap(phi)
    p = cfg.require_physical()
    duration = inp.duration if inp.duration is not None else swap_time(derive_effective(p))
    if inp.swap == "effective":
        return EffectiveSwap(derive_effective(p), duration, cfg.options.get("evolution", "exact"))
    if inp.backend != "fock":
        raise ConfigError("inputs.swap", "the full engine needs the Fock backend")
    return FullSwap(p, duration)


def cmd_run(cfg: RunConfig) -> dict:
    """Run the protocol; write ``outcome.json`` and ``summary.txt``; return the summary."""
    psi1, psi2, cutoff = _photonic_inputs(cfg)
    outcome = run_protocol(psi1, psi2, _swap_spec(cfg), cutoff=cutoff)
    if cfg.inputs.backend == "coherent":
        product = CoherentSuperposition.product(psi1, psi2)
    else:
        product = product_state(psi1, psi2, cutoff)
    summary = {"p_m": outcome.p_m, "p_g": outcome.p_g, "leaked": outcome.leaked}
    for name, sign in (("m", -1), ("g", +1)):
        key = f"fidelity_{name}"
        if not outcome.has_branch(name):
            summary[key] = None
            continue
        try:
            summary[key] = _fidelity(getattr(outcome, f"state_{name}"), symmetric_target(product, sign))
        except ZeroState:
            summary[key] = None
    doc = {"command": "run", "config": cfg.resolved(), "summary": summary, "outcome": outcome.to_records()}
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    (cfg.output_dir / "outcome.json").write_text(dumps_json(doc))
    lines = [f"p_m = {outcome.p_m:.12g}", f"p_g = {outcome.p_g:.12g}"]
    for name, label in (("m", "antisymmetric"), ("g", "symmetric")):
        f = summary[f"fidelity_{name}"]
        lines.append(f"branch {name}: empty" if f is None
                     else f"branch {name}: fidelity vs {label} target = {f:.12g}")
    if outcome.leaked:
        lines.append(f"excited-state population left by the swap = {outcome.leaked:.3g}")
    (cfg.output_dir / "summary.txt").write_text("\n".join(lines) + "\n")
    return summary


def fig3a_row(ratio: float):
    """``(ratio, chi0 t_s, reachable)``; ``chi0 t_s`` is NaN where the swap is unreachable."""
    try:
        return (ratio, ratio * swap_angle_ratio(ratio), True)
    except SwapUnreachable:
        return (ratio, math.nan, False)


def cmd_fig3a(cfg: RunConfig, jobs: int = 1):
    rows = _parallel_map(fig3a_row, cfg.grid("ratio", "fig3a"), jobs)
    _write_table(cfg, "fig3a", FIG3A_COLUMNS, rows)
    return rows


def fig3b_point(alpha, beta, ratio, eta_over_chi0, evolution="magnus", sign=+1):
    """``(phi1, phi2, fidelity)`` of the generated state against the target SECS.

    ``magnus`` uses the closed-form output phases; ``exact`` propagates
    ``|alpha, beta>`` with the exact mode matrix for the same ``t_s``.
    """
    eff = EffectiveParams.from_ratios(1.0, ratio, eta_over_chi0)
    target = secs(alpha, beta, sign)
    try:
        t_s = swap_time(eff)
    except SwapUnreachable:
        return math.nan, math.nan, math.nan
    if evolution == "magnus":
        phi1, phi2 = output_phases(eff, t_s)
        generated = swapped_output(alpha, beta, phi1, phi2, sign)
    elif evolution == "exact":
        u = effective_mode_matrix(eff, t_s)
        phi1, phi2 = wrap_phase(np.angle(u[0, 1])), wrap_phase(np.angle(u[1, 0]))
        product = CoherentSuperposition.product(alpha, beta)
        generated = product + sign * mode_transform(product, u)
    else:
        raise ValueError(f"unknown evolution {evolution!r}")
    return float(phi1), float(phi2), fidelity_coherent(generated, target)


def ridge_eta(ratio, evolution="magnus"):
    """Equal-shift ``eta/chi0`` closest to zero where the swap lands on the target phases.

    ``magnus`` solves ``phi_i = 0 (mod 2 pi)`` in closed form. ``exact``
    minimizes ``||u - swap||`` over ``|eta/chi0| <= RIDGE_WINDOW``; the
    fidelity there need not reach 1. Returns NaN for an unreachable swap.
    """
    try:
        x = swap_angle_ratio(ratio)
    except SwapUnreachable:
        return math.nan
    if evolution == "magnus":
        c = ratio * x
        k = round(-(math.pi / 2 - x / 2) / (2 * math.pi))
        return (math.pi / 2 - x / 2 + 2 * math.pi * k) / c
    if evolution != "exact":
        raise ValueError(f"unknown evolution {evolution!r}")
    swap = np.array([[0, 1], [1, 0]])

    def mismatch(e):
        eff = EffectiveParams.from_ratios(1.0, ratio, e)
        return float(np.linalg.norm(effective_mode_matrix(eff, swap_time(eff)) - swap))

    grid = np.linspace(-RIDGE_WINDOW, RIDGE_WINDOW, 601)
    vals = [mismatch(e) for e in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    return float(minimize_scalar(mismatch, bounds=(lo, hi), method="bounded",
                                 options={"xatol": 1e-12}).x)


def _fig3b_ridge_row(args):
    alpha, beta, ratio, evolution, sign = args
    e = ridge_eta(ratio, evolution)
    if math.isnan(e):
        return (ratio, math.nan, math.nan)
    return (ratio, e, fig3b_point(alpha, beta, ratio, e, evolution, sign)[2])


def _fig3b_row(args):
    alpha, beta, ratio, etas, evolution, sign = args
    return [(ratio, e) + fig3b_point(alpha, beta, ratio, e, evolution, sign) for e in etas]


def cmd_fig3b(cfg: RunConfig, jobs: int = 1):
    inp = cfg.inputs
    if inp.backend != "coherent":
        raise ConfigError("inputs.backend", "fig3b needs the coherent backend")
    evolution = cfg.options.get("evolution", "magnus")
    etas = tuple(cfg.grid("eta_over_chi0", "fig3b"))
    tasks = [(inp.alpha, inp.beta, r, etas, evolution, inp.sign) for r in cfg.grid("ratio", "fig3b")]
    rows = [row for chunk in _parallel_map(_fig3b_row, tasks, jobs) for row in chunk]
    _write_table(cfg, "fig3b", FIG3B_COLUMNS, rows)
    # the unit-fidelity band is far narrower than any practical eta grid; trace it per ratio
    ridge_tasks = [(inp.alpha, inp.beta, r, evolution, inp.sign) for r in cfg.grid("ratio", "fig3b")]
    ridge = _parallel_map(_fig3b_ridge_row, ridge_tasks, jobs)
    _write_table(cfg, "fig3b_ridge", FIG3B_RIDGE_COLUMNS, ridge)
    return rows, ridge


def cmd_compare(cfg: RunConfig):
    p = cfg.require_physical()
    if cfg.inputs.backend != "fock":
        raise ConfigError("inputs.backend", "compare needs the Fock backend")
    validity = check_validity(p)
    if not validity.passed:
        raise RegimeViolation(validity.failures())
    psi1, psi2, cutoff = _photonic_inputs(cfg)
    initial = product_state(psi1, psi2, cutoff)
    if "time" in cfg.sweep:
        times = np.asarray(cfg.sweep["time"].values)
        report = compare_full_vs_effective(p, initial, float(times[-1]), cutoff, times=times)
    else:
        duration = cfg.inputs.duration
        if duration is None:
            duration = swap_time(derive_effective(p))
        report = compare_full_vs_effective(p, initial, duration, cutoff,
                                           n_times=cfg.options.get("samples", 41))
    rows = list(report.rows())
    extra = {"min_fidelity": report.min_fidelity, "max_nonground": report.max_nonground,
             "excitation_bound": report.excitation_bound}
    _write_table(cfg, "compare", COMPARE_COLUMNS, rows, extra)
    return report


def cmd_decoherence(cfg: RunConfig):
    inp = cfg.inputs
    if inp.backend != "coherent":
        raise ConfigError("inputs.backend", "decoherence needs coherent amplitudes")
    kappa = cfg.require_physical().kappa
    rows = fidelity_curve(inp.alpha, inp.beta, kappa, cfg.grid("time", "decoherence"), inp.sign,
                          which_path_factor=inp.which_path_factor)
    _write_table(cfg, "decoherence", DECOHERENCE_COLUMNS, rows)
    return rows


def cmd_validity(cfg: RunConfig) -> dict:
    """Validity margins plus the decay budget at the swap time; writes ``validity.json``."""
    p = cfg.require_physical()
    eff = derive_effective(p)
    report = check_validity(p)
    doc = {"command": "validity", "config": cfg.resolved(), "effective": eff.as_dict(),
           "passed": report.passed, "margins": report.as_dict()}
    try:
        t_s = swap_time(eff)
    except SwapUnreachable:
        t_s = None
    doc["swap_time"] = t_s
    if t_s is not None:
        budget = decay_budget(p, t_s)
        doc["decay_budget"] = {"passed": budget.passed, "margins": budget.as_dict()}
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    (cfg.output_dir / "validity.json").write_text(dumps_json(doc))
    return doc


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="condswap", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, needs_config in (("run", True), ("fig3a", False), ("fig3b", False),
                               ("compare", True), ("decoherence", True), ("validity", True)):
        sp = sub.add_parser(name)
        sp.add_argument("config", nargs=None if needs_config else "?", help="INI configuration file")
        sp.add_argument("--out", help="output directory (overrides [output].directory)")
        sp.add_argument("--format", action="append", choices=("csv", "json"),
                        help="output format; repeat for several")
        if name in ("fig3a", "fig3b"):
            sp.add_argument("--jobs", type=int, default=1, help="sweep worker processes")
            sp.add_argument("--ratio", help="grid spec for chi0/delta_F, e.g. log:0.8:10:40")
        if name == "fig3b":
            sp.add_argument("--eta", help="grid spec for eta/chi0")
            sp.add_argument("--evolution", choices=("magnus", "exact"))
            sp.add_argument("--alpha", type=complex)
            sp.add_argument("--beta", type=complex)
    return ap


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    sweep, options, inputs = dict(cfg.sweep), dict(cfg.options), cfg.inputs
    if getattr(args, "ratio", None):
        sweep["ratio"] = Grid.parse(args.ratio, "sweep.ratio")
    if getattr(args, "eta", None):
        sweep["eta_over_chi0"] = Grid.parse(args.eta, "sweep.eta_over_chi0")
    if getattr(args, "evolution", None):
        options["evolution"] = args.evolution
    for key in ("alpha", "beta"):
        v = getattr(args, key, None)
        if v is not None:
            inputs = replace(inputs, **{key: v.real if v.imag == 0 else v})
    cfg = replace(cfg, sweep=sweep, options=options, inputs=inputs)
    if args.out:
        cfg = replace(cfg, output_dir=Path(args.out))
    if args.format:
        cfg = replace(cfg, formats=tuple(dict.fromkeys(args.format)))
    return cfg


COMMANDS = {"run": cmd_run, "fig3a": cmd_fig3a, "fig3b": cmd_fig3b, "compare": cmd_compare,
            "decoherence": cmd_decoherence, "validity": cmd_validity}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = _apply_overrides(cfg, args)
        fn = COMMANDS[args.command]
        if args.command in ("fig3a", "fig3b"):
            fn(cfg, jobs=args.jobs)
        else:
            fn(cfg)
    except (ConfigError, CutoffTooSmall) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RegimeViolation, SwapUnreachable, ZeroDetuning) as exc:
        print(f"regime violation: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except StepFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
