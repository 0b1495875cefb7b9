"""Command-line front end.

One experiment per invocation. Settings come from an optional JSON config
file (``--config``) overridden by flags; the fully resolved configuration can
be written back with ``--emit-config`` and re-read unchanged.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .ccc import DEFAULT_PARAMS, CccParams, ccc_conditional, ccc_matrix
from .dynsys import (
    SYSTEM_NAMES,
    DivergenceError,
    builtin_system,
    integrate,
)
from .etc import etc, symbolize
from .experiments import (
    STABILITY_TRANSIENTS,
    StabilityConfig,
    check_causal_stability,
    classify_sync_variables,
    default_slave_ic,
    ground_truth_sync,
    run_stability,
    sync_table,
)
from .files import atomic_write, read_trajectory_csv, to_json, trajectory_to_csv

EXPERIMENTS = ("simulate", "etc", "ccc", "ccc-matrix", "stability", "sync-check", "classify")
OUTPUT_DIR_ENV = "CAUSYNC_OUTPUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_RUNTIME = 4


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    system: str | None = None
    method: str | None = None
    dt: float | None = None
    n_samples: int | None = None
    transients: int | None = None
    L: int | None = None
    w: int | None = None
    step: int | None = None
    B: int | None = None
    seed: int | None = None
    output: str | None = None
    format: str | None = None
    input: str | None = None
    column: str | None = None
    cause: str | None = None
    effect: str | None = None
    forced: str | None = None
    deltas: tuple[float, ...] | None = None
    k_max: int | None = None
    master_ic: tuple[float, ...] | None = None
    slave_ic: tuple[float, ...] | None = None
    epsilon: float | None = None
    tolerance: float | None = None

    @property
    def ccc_params(self) -> CccParams:
        return CccParams(self.L, self.w, self.step, self.B)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items() if v is not None}


KEYS = tuple(f.name for f in fields(RunConfig))
REQUIRED = ("experiment", "system")
_TUPLE_KEYS = {"deltas", "master_ic", "slave_ic"}
_INT_KEYS = {"n_samples", "transients", "L", "w", "step", "B", "seed", "k_max"}
_FLOAT_KEYS = {"dt", "epsilon", "tolerance"}


def _coerce(key, value):
    try:
        if key in _TUPLE_KEYS:
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip()]
            return tuple(float(v) for v in value)
        if key in _INT_KEYS:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: invalid value {value!r}") from None


def _experiment_defaults(raw: dict) -> dict:
    exp = raw["experiment"]
    name = raw.get("system")
    d: dict = {"format": "json"}
    if name in SYSTEM_NAMES:
        system = builtin_system(name)
        p = DEFAULT_PARAMS[name]
        d.update(L=p.past_len, w=p.current_len, step=p.step, B=p.bins,
                 method=system.default_method, master_ic=system.default_ic)
        if system.kind == "continuous":
            d["dt"] = system.default_step
    else:
        d.update(L=150, w=15, step=80, B=8)
    if exp in ("simulate", "stability", "sync-check"):
        d.update(n_samples=10000, transients=2000)
    elif exp in ("ccc", "ccc-matrix", "classify"):
        d.update(n_samples=8000, transients=2000)
    if exp == "simulate":
        d["format"] = "csv"
    if exp == "stability":
        d.update(deltas=(1.0, 10.0, 100.0), k_max=100, epsilon=1e-6, format="csv")
        if name in SYSTEM_NAMES:
            system = builtin_system(name)
            d.update(forced=system.variable_names[0], slave_ic=default_slave_ic(system),
                     transients=STABILITY_TRANSIENTS.get(name, 2000))
    if exp == "sync-check":
        d["tolerance"] = 1e-3
    if exp == "etc":
        d.pop("method", None)
    return d


def resolve_config(raw: dict) -> RunConfig:
    """Validate a raw key/value mapping and fill every default."""
    unknown = sorted(set(raw) - set(KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    missing = [k for k in REQUIRED if raw.get(k) is None]
    if "experiment" in missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    raw = {k: _coerce(k, v) for k, v in raw.items() if v is not None}
    exp = raw["experiment"]
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment: unknown experiment {exp!r}; choose from {', '.join(EXPERIMENTS)}")
    needs_system = not (exp in ("etc", "ccc", "ccc-matrix") and raw.get("input"))
    if needs_system and raw.get("system") is None:
        raise ConfigError("missing required key(s): system")
    name = raw.get("system")
    allowed = SYSTEM_NAMES + (("all",) if exp in ("sync-check", "classify") else ())
    if name is not None and name not in allowed:
        raise ConfigError(f"system: unknown system {name!r}; choose from {', '.join(allowed)}")
    cfg = RunConfig(**{**_experiment_defaults(raw), **raw})

    if exp == "stability" and cfg.seed is None:
        raise ConfigError("seed: stability runs require --seed (or 'seed' in the config)")
    if cfg.method is not None and cfg.method not in ("euler", "rk4"):
        raise ConfigError(f"method: must be euler or rk4, got {cfg.method!r}")
    if cfg.dt is not None and not cfg.dt > 0:
        raise ConfigError("dt: must be positive")
    if cfg.n_samples is not None and cfg.n_samples < 1:
        raise ConfigError("n_samples: must be >= 1")
    if cfg.transients is not None and cfg.transients < 0:
        raise ConfigError("transients: must be >= 0")
    if cfg.format not in ("csv", "json", "text"):
        raise ConfigError(f"format: must be csv, json or text, got {cfg.format!r}")
    try:
        cfg.ccc_params
    except ValueError as e:
        raise ConfigError(f"L/w/step/B: {e}") from None
    if cfg.k_max is not None and cfg.k_max < 1:
        raise ConfigError("k_max: must be >= 1")
    if cfg.deltas is not None:
        d = np.asarray(cfg.deltas)
        if d.size == 0 or np.any(d < 0) or np.any(np.diff(d) <= 0):
            raise ConfigError("deltas: must be non-negative and strictly increasing")
    if name in SYSTEM_NAMES:
        system = builtin_system(name)
        for key in ("master_ic", "slave_ic"):
            v = getattr(cfg, key)
            if v is not None and len(v) != system.dimension:
                raise ConfigError(f"{key}: expected {system.dimension} values for {name}")
        for key in ("forced", "cause", "effect"):
            v = getattr(cfg, key)
            if v is not None and v not in system.variable_names:
                raise ConfigError(f"{key}: {name} has no variable {v!r}")
    if exp == "ccc" and (cfg.cause is None or cfg.effect is None):
        raise ConfigError("cause/effect: ccc needs both --cause and --effect")
    if exp == "ccc" and cfg.cause == cfg.effect:
        raise ConfigError("cause/effect: must name different variables")
    if exp == "etc" and (cfg.input is None or cfg.column is None):
        raise ConfigError("input/column: etc needs --input CSV and --column")
    return cfg


def load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ConfigError(f"config: cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config: {path} is not valid JSON ({e.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    return data


def emit_config(cfg: RunConfig) -> str:
    return to_json(cfg.to_dict())


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    raw = load_config_file(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if k in KEYS and v is not None}
    if args.experiment_pos:
        flags["experiment"] = args.experiment_pos
    return resolve_config({**raw, **flags})


def parse_config(argv: list[str] | None = None) -> RunConfig:
    return _config_from_args(build_parser().parse_args(argv))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causync", description=__doc__.split("\n")[0])
    p.add_argument("experiment_pos", nargs="?", choices=EXPERIMENTS, metavar="experiment")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="JSON file of config keys; flags override it")
    p.add_argument("--emit-config", action="store_true",
                   help="print the resolved config as JSON and exit")
    p.add_argument("--system", help=f"one of {', '.join(SYSTEM_NAMES)} (or 'all' for sync-check/classify)")
    p.add_argument("--method", choices=("euler", "rk4"))
    p.add_argument("--dt", type=float)
    p.add_argument("--n-samples", dest="n_samples", type=int)
    p.add_argument("--transients", type=int)
    p.add_argument("--L", dest="L", type=int, help="CCC past window length")
    p.add_argument("--w", dest="w", type=int, help="CCC current window length")
    p.add_argument("--step", type=int, help="CCC window step")
    p.add_argument("--B", dest="B", type=int, help="number of bins")
    p.add_argument("--seed", type=int)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("csv", "json", "text"))
    p.add_argument("--input", help="trajectory CSV (header row of variable names)")
    p.add_argument("--column")
    p.add_argument("--cause")
    p.add_argument("--effect")
    p.add_argument("--forced")
    p.add_argument("--deltas", help="comma-separated perturbation scales")
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--master-ic", dest="master_ic")
    p.add_argument("--slave-ic", dest="slave_ic")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--tolerance", type=float)
    return p


@contextlib.contextmanager
def _stage(module: str):
    try:
        yield
    except (DivergenceError, ConfigError):
        raise
    except (ValueError, KeyError, IndexError, OSError) as e:
        raise RuntimeError(f"{module}: {e}") from e


def _master(cfg: RunConfig):
    if cfg.input:
        with _stage("files"):
            return read_trajectory_csv(cfg.input, cfg.dt or 1.0)
    system = builtin_system(cfg.system)
    return integrate(system, cfg.master_ic, cfg.n_samples, cfg.transients, cfg.method, cfg.dt)


def _default_output(cfg: RunConfig, ext: str) -> Path:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    return base / f"{cfg.experiment}_{cfg.system or Path(cfg.input).stem}.{ext}"


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _matrix_csv(m) -> str:
    names = list(m.variable_names)
    lines = ["to\\from," + ",".join(names)]
    for name, row in zip(names, m.values):
        lines.append(name + "," + ",".join(_fmt(v) for v in row))
    lines.append("CCC_net," + ",".join(_fmt(v) for v in m.net()))
    return "\n".join(lines) + "\n"


def execute(cfg: RunConfig) -> tuple[str, str]:
    """Run one experiment; returns (output text, file extension)."""
    exp = cfg.experiment
    fmt = cfg.format
    if exp == "simulate":
        traj = _master(cfg)
        if fmt == "json":
            return to_json({"variables": list(traj.variable_names), "dt": traj.dt,
                            "samples": traj.samples.tolist()}), "json"
        return trajectory_to_csv(traj), "csv"

    if exp == "etc":
        traj = _master(cfg)
        with _stage("etc"):
            if cfg.column not in traj.variable_names:
                raise ValueError(f"column {cfg.column!r} not in {list(traj.variable_names)}")
            seq = symbolize(traj.column(traj.variable_names.index(cfg.column)), cfg.B)
            r = etc(seq)
        return to_json({"column": cfg.column, "bins": cfg.B, "length": len(seq),
                        "iterations": r.iterations, "normalized": r.normalized}), "json"

    if exp == "ccc":
        traj = _master(cfg)
        with _stage("ccc"):
            names = traj.variable_names
            for key in ("cause", "effect"):
                if getattr(cfg, key) not in names:
                    raise ValueError(f"{key} {getattr(cfg, key)!r} not in {list(names)}")
            value = ccc_conditional(names.index(cfg.cause), names.index(cfg.effect), traj,
                                    cfg.ccc_params)
        return to_json({"cause": cfg.cause, "effect": cfg.effect,
                        "conditioned_on": [n for n in names if n not in (cfg.cause, cfg.effect)],
                        "ccc": value}), "json"

    if exp == "ccc-matrix":
        traj = _master(cfg)
        with _stage("ccc"):
            m = ccc_matrix(traj, cfg.ccc_params)
        if fmt == "csv":
            return _matrix_csv(m), "csv"
        return to_json(m.to_dict()), "json"

    if exp == "stability":
        system = builtin_system(cfg.system)
        with _stage("experiments"):
            sc = StabilityConfig(
                system, system.index(cfg.forced), tuple(cfg.master_ic), tuple(cfg.slave_ic),
                tuple(cfg.deltas), cfg.k_max, cfg.seed, cfg.ccc_params, cfg.n_samples,
                cfg.transients, cfg.method, cfg.dt,
            )
            report = run_stability(sc)
            try:
                stable = check_causal_stability(report, cfg.epsilon)
            except ValueError:
                stable = None
        if fmt == "csv":
            return report.to_csv(), "csv"
        return to_json({
            "system": report.system, "forced": cfg.forced, "seed": report.seed,
            "net0": report.net0, "s0_diverged": report.s0_diverged,
            "causally_stable": stable,
            "final_M": {_fmt(d): m for d, m in report.final_M().items()},
            "diverged_slaves": {_fmt(d): v for d, v in report.diverged.items()},
            "nets": {_fmt(d): [None if np.isnan(v) else v for v in arr]
                     for d, arr in report.nets.items()},
        }), "json"

    names = SYSTEM_NAMES if cfg.system == "all" else (cfg.system,)
    if exp == "sync-check":
        rows, detail = {}, {}
        for name in names:
            system = builtin_system(name)
            # per-system integrator settings unless this run targets one system
            kw = {} if cfg.system == "all" else {"method": cfg.method, "dt": cfg.dt}
            results = [ground_truth_sync(system, k, None, cfg.tolerance, cfg.n_samples,
                                         cfg.transients, **kw) for k in range(system.dimension)]
            rows[name] = [r.label for r in results]
            detail[name] = {v: {"sync": r.sync, "diverged": r.diverged,
                                "relative_distance": [d if np.isfinite(d) else None for d in r.distances]}
                            for v, r in zip(system.variable_names, results)}
        if fmt == "text":
            return sync_table(rows), "txt"
        return to_json(detail), "json"

    if exp == "classify":
        rows, detail = {}, {}
        for name in names:
            system = builtin_system(name)
            if cfg.system == "all":
                traj = integrate(system, system.default_ic, cfg.n_samples, cfg.transients)
                params = DEFAULT_PARAMS[name]
            else:
                traj = _master(cfg)
                params = cfg.ccc_params
            with _stage("experiments"):
                c = classify_sync_variables(traj, params, system.self_dependent)
            rows[name] = c.predicted
            detail[name] = c.to_dict()
        if fmt == "text":
            return sync_table(rows), "txt"
        return to_json(detail), "json"

    raise ConfigError(f"experiment: unknown experiment {exp!r}")


def run(cfg: RunConfig) -> int:
    try:
        text, ext = execute(cfg)
        out = Path(cfg.output) if cfg.output else _default_output(cfg, ext)
        atomic_write(out, text)
    except DivergenceError as e:
        print(f"error: dynsys: {e}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except ConfigError as e:
        print(f"error: config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"{cfg.experiment} system={cfg.system or cfg.input} seed={cfg.seed} -> {out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _config_from_args(args)
    except ConfigError as e:
        print(f"error: config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.emit_config:
        sys.stdout.write(emit_config(cfg))
        return EXIT_OK
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
