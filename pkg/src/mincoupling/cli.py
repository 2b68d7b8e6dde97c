"""Command-line entry point: ``mincoupling <kernel|trajectory|rates|exchange|oracle>``.

Physical constants come from built-in defaults, then ``--config`` (JSON), then
flags; later sources win. Time series are written as CSV, scalar results as
JSON, all floats with 17 significant digits.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .core import (FieldQuantum, Fock, ModelError, NumericalError, PhysicalConfig,
                   ReservoirQuantum, Thermal, Vacuum)
from .dynamics import (energy, harmonic_trajectory, solve_markovian, solve_nonmarkovian,
                       solve_with_radiation_reaction)
from .exchange import photon_absorption_rate, photon_emission_rate
from .kernel import MemoryKernel, convolve_memory, gamma_on_grid, markov_residual
from .oracle import (BathKind, analytic_slope, build_sector, discretize, evolve_survival,
                     fitted_rate, golden_rule_window)
from .rates import evaluate_spectral_rate, transition_rate

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3

DEFAULT_PHYSICAL = {"m": 1.0, "omega": 1.0, "e": 0.0, "beta": 0.0, "temperature": 0.0,
                    "cutoff": 100.0}


class UsageError(ModelError):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# output

def _fmt(x) -> str:
    x = float(x) + 0.0  # folds -0.0 into 0.0
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return json.dumps(obj if not isinstance(obj, np.bool_) else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(columns: dict) -> str:
    buf = io.StringIO()
    names = list(columns)
    buf.write(",".join(names) + "\n")
    for row in zip(*(np.asarray(columns[n], dtype=float) for n in names)):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# argument parsing helpers

def _float_list(text: str, count: int, what: str) -> list:
    parts = text.replace(",", " ").split()
    if len(parts) != count:
        raise UsageError(f"{what} needs {count} numbers, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"{what} must be numeric, got {text!r}") from None


def _normalized(vec) -> tuple:
    v = np.asarray(vec, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ModelError("photon direction must be nonzero")
    return tuple(v / norm)


def parse_photon(text: str) -> FieldQuantum:
    """``"dx dy dz lambda omega"``; the direction is normalized."""
    dx, dy, dz, lam, w = _float_list(text, 5, "photon")
    if lam not in (1.0, 2.0):
        raise ModelError(f"polarization index must be 1 or 2, got {lam:g}")
    return FieldQuantum(_normalized((dx, dy, dz)), w, int(lam))


def read_fock_file(path: str | Path, kind: str) -> Fock:
    """Line-oriented list of quanta: ``omega_p`` (reservoir) or ``dx dy dz lambda omega_p`` (field)."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ModelError(f"cannot read Fock file {path}: {exc.strerror}") from None
    quanta = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if kind == "field":
                quanta.append(parse_photon(line))
            else:
                quanta.append(ReservoirQuantum(*_float_list(line, 1, "reservoir quantum")))
        except ModelError as exc:
            raise ModelError(f"{path}:{lineno}: {exc}") from None
    return Fock(tuple(quanta))


def parse_bath(text: str, kind: str):
    if text == "vacuum":
        return Vacuum()
    if text.startswith("thermal:"):
        try:
            return Thermal(float(text.split(":", 1)[1]))
        except ValueError:
            raise UsageError(f"bad thermal temperature in {text!r}") from None
    if text.startswith("fock:"):
        return read_fock_file(text.split(":", 1)[1], kind)
    raise UsageError(f"bath must be vacuum, thermal:T or fock:<file>, got {text!r}")


def _global_options(parser: argparse.ArgumentParser):
    s = argparse.SUPPRESS
    parser.add_argument("--config", default=s, help="JSON configuration file")
    parser.add_argument("--out", default=s, help="output file (default: standard output)")
    parser.add_argument("--format", choices=("csv", "json"), default=s)
    for key in DEFAULT_PHYSICAL:
        parser.add_argument(f"--{key}", type=float, default=s, help=f"override physical '{key}'")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    _global_options(common)
    parser = _Parser(prog="mincoupling", parents=[common],
                     description="Damped oscillator coupled to a reservoir and the EM vacuum.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kernel", parents=[common], help="memory kernel and Markov residual")
    p.add_argument("--t-end", type=float)
    p.add_argument("--step", type=float)

    p = sub.add_parser("trajectory", parents=[common], help="expectation-value trajectory")
    p.add_argument("--solver", choices=("markov", "nonmarkov", "rr"))
    p.add_argument("--q0", type=float)
    p.add_argument("--v0", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--step", type=float)

    p = sub.add_parser("rates", parents=[common], help="first-order transition rates")
    p.add_argument("--n", type=int)
    p.add_argument("--direction", choices=("down", "up"))
    p.add_argument("--field")
    p.add_argument("--reservoir")
    p.add_argument("--t", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--shape", choices=("boxcar", "lorentzian"))

    p = sub.add_parser("exchange", parents=[common], help="vacuum <-> reservoir exchange rates")
    p.add_argument("--mode", choices=("absorb", "emit"))
    p.add_argument("--photon")
    p.add_argument("--reservoir")
    p.add_argument("--t", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--shape", choices=("boxcar", "lorentzian"))

    p = sub.add_parser("oracle", parents=[common], help="exact diagonalization rate check")
    p.add_argument("--bath", choices=("reservoir", "field", "both"))
    p.add_argument("--n", type=int)
    p.add_argument("--modes", type=int)
    p.add_argument("--band")
    p.add_argument("--t-grid")
    p.add_argument("--weighting", choices=("golden_rule", "interaction"))
    return parser


def _settings(args: argparse.Namespace, block: dict, defaults: dict) -> dict:
    """Merge command options: flags over the config file block over defaults."""
    out = dict(defaults)
    out.update({k.replace("-", "_"): v for k, v in block.items()})
    out.update({k: v for k, v in vars(args).items() if k in defaults and v is not None})
    return out


# ---------------------------------------------------------------------------
# subcommands

def _cmd_kernel(cfg: PhysicalConfig, opts: dict, fmt: str, out):
    t_end = opts["t_end"] if opts["t_end"] is not None else 20 * math.pi / cfg.omega
    h = opts["step"] if opts["step"] is not None else 0.4 / cfg.cutoff
    kernel = MemoryKernel.from_config(cfg)
    traj = harmonic_trajectory(cfg.omega, t_end, h)
    drag = convolve_memory(kernel, traj)
    target = cfg.damping_rate * traj.qdot
    columns = {"t": traj.t, "gamma": gamma_on_grid(kernel, h, len(traj)), "convolution": drag,
               "markov_target": target, "residual": drag - target}
    if fmt == "json":
        rms = markov_residual(kernel, traj, cfg.beta)
        scale = cfg.damping_rate * float(np.abs(traj.qdot).max())
        _emit(dumps({"physical": cfg.to_dict(), "markov_residual": rms,
                     "relative_residual": rms / scale if scale > 0 else 0.0,
                     "columns": {k: list(map(float, v)) for k, v in columns.items()}}), out)
    else:
        _emit(to_csv(columns), out)


def _cmd_trajectory(cfg: PhysicalConfig, opts: dict, fmt: str, out):
    solver = opts["solver"]
    t_end = opts["t_end"] if opts["t_end"] is not None else 20 * math.pi / cfg.omega
    h = opts["step"]
    if h is None:
        h = 0.01 / max(cfg.omega, cfg.damping_rate)
        if solver == "nonmarkov":
            h = min(h, 0.4 / cfg.cutoff)
    q0, v0 = opts["q0"], opts["v0"]
    if solver == "markov":
        traj = solve_markovian(cfg, q0, v0, t_end, h)
    elif solver == "rr":
        traj = solve_with_radiation_reaction(cfg, q0, v0, t_end, h)
    else:
        traj = solve_nonmarkovian(cfg, MemoryKernel.from_config(cfg), q0, v0, t_end, h)
    columns = {"t": traj.t, "q": traj.q, "qdot": traj.qdot, "energy": energy(cfg, traj)}
    if fmt == "json":
        _emit(dumps({"physical": cfg.to_dict(), "solver": solver,
                     "columns": {k: list(map(float, v)) for k, v in columns.items()}}), out)
    else:
        _emit(to_csv(columns), out)


def _rate_document(cfg, rate, opts, omega_ref, extra):
    doc = {"physical": cfg.to_dict(), **extra, **rate.to_dict()}
    if opts["t"] is not None and opts["eta"] is not None:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            doc["probability"] = evaluate_spectral_rate(rate, opts["t"], opts["eta"],
                                                        opts["shape"], omega_ref)
        doc["perturbative"] = not caught
    return doc


def _cmd_rates(cfg: PhysicalConfig, opts: dict, fmt: str, out):
    field = parse_bath(opts["field"], "field")
    reservoir = parse_bath(opts["reservoir"], "reservoir")
    rate = transition_rate(opts["n"], opts["direction"], field, reservoir, cfg)
    extra = {"n": opts["n"], "direction": opts["direction"], "field": opts["field"],
             "reservoir": opts["reservoir"]}
    _emit(dumps(_rate_document(cfg, rate, opts, cfg.omega, extra)), out)


def _cmd_exchange(cfg: PhysicalConfig, opts: dict, fmt: str, out):
    if opts["photon"] is None:
        raise UsageError("exchange needs --photon \"dx dy dz lambda omega\"")
    photon = parse_photon(opts["photon"])
    reservoir = parse_bath(opts["reservoir"], "reservoir")
    fn = photon_absorption_rate if opts["mode"] == "absorb" else photon_emission_rate
    rate = fn(photon, reservoir, cfg.coupling, cfg)
    extra = {"mode": opts["mode"], "photon": opts["photon"], "reservoir": opts["reservoir"]}
    _emit(dumps(_rate_document(cfg, rate, opts, photon.omega_p, extra)), out)


def run_oracle(cfg: PhysicalConfig, bath: str, n: int, modes: int, band, t_grid=None,
               weighting: str = "golden_rule") -> tuple:
    """Build, evolve and fit one oracle model. Returns (columns, summary)."""
    kinds = [BathKind.RESERVOIR, BathKind.FIELD] if bath == "both" else [BathKind(bath)]
    band_abs = [band[0] * cfg.omega, band[1] * cfg.omega]
    grids = [discretize(k, cfg.coupling, cfg, band_abs, modes, weighting) for k in kinds]
    bandwidth = band_abs[1] - band_abs[0]
    expected = analytic_slope(kinds, cfg.coupling, cfg, n)
    if t_grid is None:
        t_lo, t_hi = golden_rule_window(expected, bandwidth)
        times = np.linspace(t_lo, t_hi, 200)
    else:
        t_lo, t_hi, steps = t_grid
        times = np.linspace(t_lo, t_hi, int(steps))
    model = build_sector(n, grids, cfg)
    evo = evolve_survival(model, times)
    slope = fitted_rate(times, evo.p_transfer, (times[0], times[-1]), bandwidth)
    summary = {"physical": cfg.to_dict(), "bath": bath, "n": n, "modes": modes,
               "band": list(band), "window": [float(times[0]), float(times[-1])],
               "weighting": weighting, "fitted_slope": slope, "analytic_slope": expected,
               "ratio": slope / expected if expected > 0 else float("nan")}
    columns = {"t": times, "P_stay": evo.p_stay, "P_transfer": evo.p_transfer}
    return columns, summary


def _cmd_oracle(cfg: PhysicalConfig, opts: dict, fmt: str, out):
    band = opts["band"]
    band = _float_list(band, 2, "band") if isinstance(band, str) else [float(b) for b in band]
    t_grid = opts["t_grid"]
    if isinstance(t_grid, str):
        t_grid = _float_list(t_grid, 3, "t-grid")
    columns, summary = run_oracle(cfg, opts["bath"], opts["n"], opts["modes"], band, t_grid,
                                  opts["weighting"])
    if fmt == "json":
        summary["columns"] = {k: list(map(float, v)) for k, v in columns.items()}
        _emit(dumps(summary), out)
        return
    _emit(to_csv(columns), out)
    if out is not None:
        out.with_suffix(".json").write_text(dumps(summary) + "\n")
        sys.stdout.write(dumps(summary) + "\n")


COMMANDS = {
    "kernel": (_cmd_kernel, {"t_end": None, "step": None}, "csv"),
    "trajectory": (_cmd_trajectory, {"solver": "markov", "q0": 1.0, "v0": 0.0, "t_end": None,
                                     "step": None}, "csv"),
    "rates": (_cmd_rates, {"n": 1, "direction": "down", "field": "vacuum",
                           "reservoir": "vacuum", "t": None, "eta": None, "shape": "boxcar"},
              "json"),
    "exchange": (_cmd_exchange, {"mode": "absorb", "photon": None, "reservoir": "vacuum",
                                 "t": None, "eta": None, "shape": "boxcar"}, "json"),
    "oracle": (_cmd_oracle, {"bath": "reservoir", "n": 1, "modes": 400, "band": [0.2, 5.0],
                             "t_grid": None, "weighting": "golden_rule"}, "csv"),
}


def load_physical(args: argparse.Namespace) -> tuple:
    """Physical config and the raw config document (empty without ``--config``)."""
    data = dict(DEFAULT_PHYSICAL)
    doc = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise ModelError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ModelError(f"bad JSON in {path}: {exc.msg} (line {exc.lineno})") from None
        if not isinstance(doc, dict):
            raise ModelError("configuration must be a JSON object")
        physical = doc.get("physical", doc)
        data.update({k: physical[k] for k in DEFAULT_PHYSICAL if k in physical})
    for key in DEFAULT_PHYSICAL:
        if hasattr(args, key):
            data[key] = getattr(args, key)
    return PhysicalConfig.from_dict(data), doc


def run(argv=None) -> int:
    """Run one subcommand; returns the process exit status."""
    try:
        args = build_parser().parse_args(argv)
        handler, defaults, default_fmt = COMMANDS[args.command]
        cfg, doc = load_physical(args)
        block = doc.get(args.command, {}) if isinstance(doc.get(args.command), dict) else {}
        opts = _settings(args, block, defaults)
        fmt = getattr(args, "format", None) or doc.get("format") or default_fmt
        out = getattr(args, "out", None) or doc.get("output_path")
        handler(cfg, opts, fmt, Path(out) if out else None)
        return EXIT_OK
    except ModelError as exc:
        sys.stderr.write(f"ERROR {exc.code}: {exc}\n")
        return EXIT_VALIDATION
    except NumericalError as exc:
        sys.stderr.write(f"ERROR {exc.code}: {exc}\n")
        return EXIT_NUMERICAL


def main():
    raise SystemExit(run())
