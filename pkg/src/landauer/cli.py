"""Command-line front end: sweeps to CSV/JSON, invariant checks, figures.

One subcommand per benchmark scenario plus random-audit, which fuzzes the
exchange identity and the modified bound on randomized instances.  Output
is a flat table, one row per (sweep value, time) pair; --check rescans the
rows and exits nonzero if any invariant fails; --plot renders bound curves
as PNG files next to the table.

Exit codes: 0 success, 1 invariant failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys

import numpy as np

from .bounds import ledger
from .experiments import (
    BUILDERS,
    LeakageError,
    SweepResult,
    SweepRow,
    run_sweep,
)
from .sampling import random_bound_instance

BASE_COLUMNS = (
    "sweep_value", "time", "delta_S", "beta_dQ_E", "weighted_charge_sum",
    "sigma_old", "sigma_mod", "D_initial", "D_final", "I_initial", "I_final",
    "work", "free_energy_delta", "mi_delta", "identity_residual",
)
FINITE_COLUMNS = BASE_COLUMNS + (
    "delta_Q_S", "delta_Q_int", "K_term", "sigma_tau", "relent_drop",
)

IDENTITY_TOL = 1e-8
SIGMA_TOL = 1e-9
FINITE_TOL = 1e-8

_ESTIMATOR_CHOICES = ("spectral", "cold", "hot", "energy")


class ConfigError(Exception):
    """Bad config file or option set; maps to exit code 2."""


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from exc


# Per-subcommand option tables: flag name -> (type tag, scenario kwarg).
# The type tag doubles as the config-file parser.
_COMMON = {
    "estimator": ("estimator", "estimator"),
    "t-max": ("float", "t_max"),
    "points": ("int", "points"),
}
SCENARIO_OPTIONS: dict[str, dict[str, tuple[str, str]]] = {
    "example1": {
        "p": ("floats", None),
        "omega1": ("float", "omega1"),
        "omega2": ("float", "omega2"),
        "j-coupling": ("float", "j_coupling"),
        **_COMMON,
    },
    "example2": {
        "p": ("floats", None),
        "kind": ("kind", "kind"),
        "n-env": ("int", "n_env"),
        "beta-seed": ("float", "beta_seed"),
        "j-prime": ("float", "j_prime"),
        **_COMMON,
    },
    "example3": {
        "p-prime": ("floats", None),
        "beta": ("float", "beta"),
        "epsilon": ("float", "epsilon"),
        **_COMMON,
    },
    "example4": {
        "q": ("floats", None),
        "kind": ("kind", "kind"),
        "beta-seed": ("float", "beta_seed"),
        "alpha-seed": ("float", "alpha_seed"),
        "coupling-ratio": ("float", "coupling_ratio"),
        **_COMMON,
    },
    "example5": {
        "q1": ("floats", None),
        "n-fock": ("int", "n_fock"),
        "beta": ("float", "beta"),
        "kappa-ratio": ("float", "kappa_ratio"),
        "leakage-tol": ("float", "leakage_tol"),
        **_COMMON,
    },
    "random-audit": {
        "seed": ("int", None),
        "samples": ("int", None),
    },
}

# Default sweep grids mirror the studied parameter sets.
DEFAULT_SWEEPS = {
    "example1": [0.0, 0.1, 0.2, 0.3],
    "example2": [0.0, 0.11, 0.22],
    "example3": [0.3, 0.5, 0.8, 1.0],
    "example4": [0.0, 0.2, 0.4],
    "example5": [0.0, 0.25, 0.5, 0.75],
}
SWEEP_FLAG = {
    "example1": "p",
    "example2": "p",
    "example3": "p-prime",
    "example4": "q",
    "example5": "q1",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="landauer",
        description="Entropy-production ledgers and bound sweeps for "
                    "finite system-environment models.")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name, options in SCENARIO_OPTIONS.items():
        p = sub.add_parser(name, help=f"run the {name} sweep"
                           if name != "random-audit"
                           else "fuzz the exchange identity on random instances")
        p.add_argument("--config", help="INI file with [scenario] sections")
        p.add_argument("--output", "-o", help="output table path")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--check", action="store_true",
                       help="rescan rows for invariant violations; exit 1 on any")
        p.add_argument("--plot", action="store_true",
                       help="render bound-curve PNGs next to the output")
        for flag, (kind, _) in options.items():
            dest = flag.replace("-", "_")
            if kind == "floats":
                p.add_argument(f"--{flag}", dest=dest, type=_float_list, default=None)
            elif kind == "float":
                p.add_argument(f"--{flag}", dest=dest, type=float, default=None)
            elif kind == "int":
                p.add_argument(f"--{flag}", dest=dest, type=int, default=None)
            elif kind == "kind":
                p.add_argument(f"--{flag}", dest=dest, choices=("GHZ", "W"), default=None)
            elif kind == "estimator":
                p.add_argument(f"--{flag}", dest=dest, choices=_ESTIMATOR_CHOICES,
                               default=None)
    return parser


def _parse_config_value(kind: str, raw: str, key: str):
    try:
        if kind == "floats":
            return [float(x) for x in raw.split(",") if x.strip() != ""]
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "kind":
            if raw not in ("GHZ", "W"):
                raise ValueError(raw)
            return raw
        if kind == "estimator":
            if raw not in _ESTIMATOR_CHOICES:
                raise ValueError(raw)
            return raw
    except ValueError as exc:
        raise ConfigError(f"malformed value for {key!r}: {raw!r}") from exc
    raise ConfigError(f"unhandled option kind {kind!r}")


def load_config_file(path: str) -> dict[str, dict[str, object]]:
    """Parse and validate an INI override file.

    Every section must name a known subcommand and every key must belong to
    that subcommand's option table; numeric values must be finite.
    """
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    out: dict[str, dict[str, object]] = {}
    for section in cp.sections():
        if section not in SCENARIO_OPTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        table = SCENARIO_OPTIONS[section]
        values: dict[str, object] = {}
        for key, raw in cp[section].items():
            if key not in table:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            parsed = _parse_config_value(table[key][0], raw, key)
            numbers = parsed if isinstance(parsed, list) else [parsed]
            for x in numbers:
                if isinstance(x, float) and not math.isfinite(x):
                    raise ConfigError(f"non-finite value for {key!r}: {raw!r}")
            values[key] = parsed
        out[section] = values
    return out


def resolve_options(args: argparse.Namespace) -> dict[str, object]:
    """Merge option sources with precedence defaults < file < flags."""
    name = args.scenario
    table = SCENARIO_OPTIONS[name]
    merged: dict[str, object] = {}
    if args.config:
        merged.update(load_config_file(args.config).get(name, {}))
    for flag in table:
        flag_value = getattr(args, flag.replace("-", "_"))
        if flag_value is not None:
            merged[flag] = flag_value
    return merged


def _scenario_kwargs(name: str, opts: dict[str, object]) -> dict[str, object]:
    """Merge options into builder kwargs, sweep values included by name."""
    sweep_flag = SWEEP_FLAG[name]
    kwargs = {sweep_flag.replace("-", "_"): opts.get(sweep_flag, DEFAULT_SWEEPS[name])}
    for flag, value in opts.items():
        if flag == sweep_flag:
            continue
        kind, kwarg = SCENARIO_OPTIONS[name][flag]
        if kind == "estimator":
            value = "energy_matched" if value == "energy" else value
        kwargs[kwarg] = value
    return kwargs


def run_audit(seed: int, samples: int) -> SweepResult:
    """Fuzz the exchange identity and modified bound; one row per sample."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(samples):
        rho, u, ens, cut = random_bound_instance(rng)
        led = ledger(rho, u, ens, cut)
        rows.append(SweepRow(float(i), 0.0, led, None, {}))
    return SweepResult(scenario="random-audit", sweep_parameter="sample",
                       estimator="none", rows=rows,
                       params={"seed": int(seed), "samples": int(samples)},
                       has_finite_time=False)


def row_record(row: SweepRow, finite: bool) -> dict[str, float]:
    led = row.bound
    beta = led.beta
    rec = {
        "sweep_value": row.sweep_value,
        "time": row.time,
        "delta_S": led.delta_S,
        "beta_dQ_E": float("nan") if beta is None else beta * led.flows.delta_Q,
        "weighted_charge_sum": led.weighted_flow_sum,
        "sigma_old": led.sigma_old,
        "sigma_mod": led.sigma_mod,
        "D_initial": led.D_initial,
        "D_final": led.D_final,
        "I_initial": led.I_initial,
        "I_final": led.I_final,
        "work": led.work,
        "free_energy_delta": led.free_energy_delta,
        "mi_delta": led.mi_delta,
        "identity_residual": led.identity_residual,
    }
    if finite:
        f = row.finite
        rec.update({
            "delta_Q_S": f.delta_Q_S,
            "delta_Q_int": f.delta_Q_int,
            "K_term": f.K_term,
            "sigma_tau": f.sigma_tau,
            "relent_drop": f.relent_drop,
        })
    return rec


def check_result(result: SweepResult) -> list[str]:
    """Invariant scan over finished rows; returns violation messages."""
    problems = []
    for i, row in enumerate(result.rows):
        led = row.bound
        if abs(led.identity_residual) > IDENTITY_TOL:
            problems.append(f"row {i}: identity residual {led.identity_residual:.3e}")
        if led.sigma_mod < -SIGMA_TOL:
            problems.append(f"row {i}: sigma_mod {led.sigma_mod:.3e} below bound")
        if row.finite is not None and row.finite.k_defined:
            gap = abs(row.finite.sigma_tau - row.finite.relent_drop)
            if gap > FINITE_TOL:
                problems.append(f"row {i}: finite-time identity gap {gap:.3e}")
            if row.finite.relent_drop < -SIGMA_TOL:
                problems.append(
                    f"row {i}: relative-entropy drop {row.finite.relent_drop:.3e}")
    return problems


def emit(result: SweepResult, path: str, fmt: str) -> None:
    columns = FINITE_COLUMNS if result.has_finite_time else BASE_COLUMNS
    records = [row_record(r, result.has_finite_time) for r in result.rows]
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for rec in records:
                writer.writerow([repr(float(rec[c])) for c in columns])
    else:
        payload = []
        for rec in records:
            clean = {}
            for c in columns:
                x = float(rec[c])
                clean[c] = x if math.isfinite(x) else None
            payload.append(clean)
        with open(path, "w", newline="") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    name = args.scenario
    try:
        opts = resolve_options(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if name == "random-audit":
            seed = int(opts.get("seed", 0))
            samples = int(opts.get("samples", 1000))
            if samples < 1:
                raise ValueError("samples must be positive")
            result = run_audit(seed, samples)
        else:
            result = run_sweep(BUILDERS[name](**_scenario_kwargs(name, opts)))
    except (ArithmeticError, LeakageError) as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    fmt = args.format or "csv"
    path = args.output or f"{name}.{fmt}"
    emit(result, path, fmt)
    print(f"wrote {len(result.rows)} rows to {path}")
    if name == "random-audit":
        worst = max(abs(r.bound.identity_residual) for r in result.rows)
        floor = min(r.bound.sigma_mod for r in result.rows)
        print(f"max |identity residual| = {worst:.3e}, min sigma_mod = {floor:.3e}")

    if args.plot:
        from .plotting import render_figures
        base, _ = os.path.splitext(path)
        for figure_path in render_figures(result, base):
            print(f"wrote {figure_path}")

    if args.check:
        problems = check_result(result)
        if problems:
            for msg in problems:
                print(f"invariant failure: {msg}", file=sys.stderr)
            return 1
        print(f"all {len(result.rows)} rows satisfy the ledger invariants")
    return 0


if __name__ == "__main__":
    sys.exit(main())
