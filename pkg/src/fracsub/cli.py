"""Batch command-line front end.

Usage::

    fracsub <command> --config run.json [--seed N] [--out table.csv]

Commands: density, charfn, simulate, solve, moments, tails, verify.  Output is
CSV with ``# key=value`` metadata lines, then a header row, then data rows;
floats are written with 17 significant digits.  Exit status is 0 on success,
2 for a bad config, 3 for a violated precondition and 4 for a numerical
failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__, audit
from .errors import NumericalError, PreconditionError
from .grid import Grid
from .pde import (SolveConfig, solve_exp_equation, solve_log_equation, solve_nonlinear_birth,
                  step_operator_equation)
from .processes import (ProcessSpec, char_fn, default_workers, empirical_tail, frac_moment,
                        mixture_density, monte_carlo, process_density_fft, quantile_probes,
                        tail_constant, variance_closed_form)
from .stable import StableParams
from .subordinators import ClockKind, TimeChangeSpec

COMMANDS = ("density", "charfn", "simulate", "solve", "moments", "tails", "verify")
STOCHASTIC = {"simulate", "tails"}

EXIT_OK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_NUMERICAL = 0, 2, 3, 4


class ConfigError(Exception):
    pass


# Tables ---------------------------------------------------------------------

def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _parse_cell(text: str):
    try:
        return float(text)
    except ValueError:
        return text


@dataclass
class Table:
    columns: List[str]
    rows: List[List[Any]]
    meta: List[tuple] = field(default_factory=list)

    def render(self) -> str:
        buf = io.StringIO()
        for key, value in self.meta:
            buf.write(f"# {key}={value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(v) for v in row])
        return buf.getvalue()


def read_table(text: str) -> Table:
    """Parse :meth:`Table.render` output; numeric cells come back as floats."""
    meta, body = [], []
    for line in text.splitlines(keepends=True):
        if line.startswith("# ") and not body:
            key, _, value = line[2:].rstrip("\n").partition("=")
            meta.append((key, value))
        else:
            body.append(line)
    reader = csv.reader(io.StringIO("".join(body)))
    columns = next(reader)
    return Table(columns, [[_parse_cell(c) for c in row] for row in reader], meta)


# Config ---------------------------------------------------------------------

def _get(cfg: Dict, key: str, kind=float, default=None, required=False):
    if key not in cfg:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = cfg[key]
    try:
        if kind is float:
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if kind is int:
            if isinstance(value, bool) or int(value) != value:
                raise TypeError
            return int(value)
        if kind is str:
            if not isinstance(value, str):
                raise TypeError
            return value
    except (TypeError, ValueError):
        raise ConfigError(f"key {key!r} has the wrong type") from None
    return value


def build_process(cfg: Dict) -> ProcessSpec:
    if "process" not in cfg or not isinstance(cfg["process"], dict):
        raise ConfigError("missing 'process' table")
    p = cfg["process"]
    clock = _get(p, "clock", str, required=True)
    if clock not in {k.value for k in ClockKind}:
        raise ConfigError(f"unknown clock {clock!r}")
    stable = StableParams(_get(p, "alpha", required=True), _get(p, "theta", default=0.0))
    kind = ClockKind(clock)
    a = _get(p, "a", default=0.0)
    if kind is ClockKind.GAMMA:
        tc = TimeChangeSpec.gamma(a, _get(p, "mu", required=True), _get(p, "rho", required=True))
    else:
        tc = TimeChangeSpec(kind, a=a, lam=_get(p, "lam", required=True))
    return ProcessSpec(stable, tc)


def build_grid(cfg: Dict) -> Grid:
    g = cfg.get("grid")
    if not isinstance(g, dict):
        raise ConfigError("missing 'grid' table")
    return Grid(_get(g, "x_min", required=True), _get(g, "x_max", required=True), _get(g, "n", int, required=True))


def _xi_values(cfg: Dict) -> np.ndarray:
    xi = cfg.get("xi")
    if isinstance(xi, list):
        try:
            return np.array([float(v) for v in xi])
        except (TypeError, ValueError):
            raise ConfigError("'xi' must be a list of numbers") from None
    if isinstance(xi, dict):
        return np.linspace(_get(xi, "start", required=True), _get(xi, "stop", required=True),
                           _get(xi, "num", int, required=True))
    raise ConfigError("'xi' must be a list or a {start, stop, num} table")


def _workers(cfg: Dict, override: Optional[int] = None) -> int:
    if override is not None:
        return override
    w = _get(cfg, "workers", int)
    return w if w is not None else default_workers()


# Commands -------------------------------------------------------------------

def cmd_density(cfg, seed, workers) -> Table:
    spec = build_process(cfg)
    grid = build_grid(cfg)
    t = _get(cfg, "t", required=True)
    method = _get(cfg, "method", str, default="fft")
    if method == "fft":
        res = process_density_fft(spec, t, grid)
    elif method == "mixture":
        res = mixture_density(spec, t, grid, _get(cfg, "truncation_eps", default=1e-12))
    else:
        raise ConfigError(f"unknown density method {method!r}")
    meta = [("atom_weight", format_cell(res.atom_weight)),
            ("atom_location", format_cell(res.atom_location) if res.atom_location is not None else "none"),
            ("retained_mass", format_cell(res.retained_mass))]
    return Table(["x", "density"], [[x, u] for x, u in zip(grid.x, res.values)], meta)


def cmd_charfn(cfg, seed, workers) -> Table:
    spec = build_process(cfg)
    t = _get(cfg, "t", required=True)
    xi = _xi_values(cfg)
    phi = np.atleast_1d(char_fn(spec, t, xi))
    return Table(["xi", "re", "im"], [[x, v.real, v.imag] for x, v in zip(xi, phi)])


def cmd_simulate(cfg, seed, workers) -> Table:
    spec = build_process(cfg)
    t = _get(cfg, "t", required=True)
    n = _get(cfg, "samples", int, required=True)
    if n < 1:
        raise PreconditionError("samples must be positive")
    draws = monte_carlo(spec, t, n, seed, workers)
    meta = [("sample_mean", format_cell(float(np.mean(draws)))),
            ("sample_variance", format_cell(float(np.var(draws))))]
    return Table(["index", "value"], [[i, v] for i, v in enumerate(draws)], meta)


def cmd_solve(cfg, seed, workers) -> Table:
    spec = build_process(cfg)
    grid = build_grid(cfg)
    t = _get(cfg, "t_final", required=True)
    dt = _get(cfg, "dt")
    initial = _get(cfg, "initial", str, default="delta")
    pad = _get(cfg, "pad", int, default=1)
    method = _get(cfg, "method", str, default="exact")
    sc = SolveConfig(grid, t, dt, initial, pad)
    c = spec.clock
    if spec.kind is ClockKind.BIRTH:
        res = solve_nonlinear_birth(spec.stable, c.a, c.lam, sc)
    elif method == "rk4":
        rates = c.lam if spec.kind is ClockKind.POISSON else (c.mu, c.rho)
        res = step_operator_equation(spec.stable, c.a, rates, sc)
    elif method != "exact":
        raise ConfigError(f"unknown solve method {method!r}")
    elif spec.kind is ClockKind.POISSON:
        res = solve_exp_equation(spec.stable, c.a, c.lam, sc)
    else:
        if spec.stable.theta != 0:
            raise PreconditionError("the logarithmic equation is symmetric: theta must be 0")
        res = solve_log_equation(spec.stable.alpha, c.a, c.mu, c.rho, sc)
    meta = [("atom_weight", format_cell(res.atom_weight)), ("grid_mass", format_cell(res.mass))]
    return Table(["x", "u"], [[x, u] for x, u in zip(grid.x, res.values)], meta)


def cmd_moments(cfg, seed, workers) -> Table:
    spec = build_process(cfg)
    t = _get(cfg, "t", required=True)
    orders = cfg.get("orders")
    if not isinstance(orders, list) or not orders:
        raise ConfigError("'orders' must be a nonempty list")
    rows = [[float(g), frac_moment(spec, float(g), t)] for g in orders]
    meta = []
    if spec.stable.alpha == 2:
        meta.append(("variance", format_cell(variance_closed_form(spec, t))))
    return Table(["order", "moment"], rows, meta)


def cmd_tails(cfg, seed, workers) -> Table:
    spec = build_process(cfg)
    t = _get(cfg, "t", required=True)
    n = _get(cfg, "samples", int, required=True)
    levels = cfg.get("levels", [0.999, 0.9995, 0.9999])
    theory, _ = tail_constant(spec, t)
    draws = monte_carlo(spec, t, n, seed, workers)
    probes = quantile_probes(draws, levels)
    est = empirical_tail(draws, spec.stable.alpha, probes)
    rows = [[lv, x, v, s, theory] for lv, x, v, s in zip(levels, est.probes, est.values, est.stderr)]
    return Table(["level", "probe", "estimate", "stderr", "theory"], rows)


def cmd_verify(cfg, seed, workers) -> Table:
    samples = _get(cfg, "samples", int, default=0)
    if samples and seed is None:
        raise ConfigError("a seed is required when 'samples' > 0")
    rows = audit.run_all(samples=samples, seed=seed)
    return Table(["check", "computed", "printed", "printed_holds", "note"],
                 [[r.check, r.computed, r.printed, r.printed_holds, r.note] for r in rows])


HANDLERS = {
    "density": cmd_density, "charfn": cmd_charfn, "simulate": cmd_simulate, "solve": cmd_solve,
    "moments": cmd_moments, "tails": cmd_tails, "verify": cmd_verify,
}


def run(command: str, cfg: Dict, seed: Optional[int] = None, workers: Optional[int] = None) -> Table:
    """Execute one command; raises ConfigError, PreconditionError or NumericalError."""
    if command not in HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if "command" in cfg and cfg["command"] != command:
        raise ConfigError(f"config is for {cfg['command']!r}, not {command!r}")
    if seed is None:
        seed = _get(cfg, "seed", int)
    if command in STOCHASTIC and seed is None:
        raise ConfigError(f"{command} needs a seed")
    w = _workers(cfg, workers)
    table = HANDLERS[command](cfg, seed, w)
    resolved = dict(cfg, command=command, seed=seed, workers=w)
    table.meta = [("tool", "fracsub"), ("version", __version__), ("command", command),
                  ("seed", "none" if seed is None else str(seed)), ("workers", str(w)),
                  ("config", json.dumps(resolved, sort_keys=True, separators=(",", ":")))] + table.meta
    return table


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracsub", description="Time-changed stable processes: densities, "
                                 "simulation, fractional equations and audits.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--seed", type=int, help="master seed (overrides the config)")
    ap.add_argument("--out", help="output CSV path (default: stdout)")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
        table = run(args.command, cfg, seed=args.seed)
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as exc:
        print(f"error: precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NumericalError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = table.render()
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write output: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
