"""Command-line front end: config loading, experiment dispatch, result files.

Exit codes: 0 when every assertion in the requested experiment holds, 1 when
the experiment ran but at least one assertion failed (the failures land in
failures.json), 2 when the config could not be parsed or validated.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .experiments import CATALOG, RUNNERS, ExperimentConfig, ExperimentOutcome
from .io import write_csv, write_json
from .solver import SCHEMES, SolverConfig

SCHEMA_VERSION = 1
OUT_ENV_VAR = "BURGERS_LAB_OUT"


class ConfigError(ValueError):
    pass


def _load_raw(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_bytes()
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
    else:
        try:
            raw = tomllib.loads(text.decode("utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML config: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a table/object")
    return raw


def _solver_from(spec: dict) -> SolverConfig:
    known = {"nu", "n", "dt", "scheme", "dealias", "cfl_safety", "blowup_linf"}
    unknown = set(spec) - known
    if unknown:
        raise ConfigError(f"unknown solver keys: {sorted(unknown)}")
    if "scheme" in spec and spec["scheme"] not in SCHEMES:
        raise ConfigError(
            f"unknown scheme {spec['scheme']!r}; choose one of {list(SCHEMES)}"
        )
    try:
        return SolverConfig(
            nu=float(spec.get("nu", 0.1)),
            n=int(spec.get("n", 128)),
            dt=float(spec.get("dt", 1e-3)),
            scheme=spec.get("scheme", "imex_if_rk3"),
            dealias=bool(spec.get("dealias", True)),
            cfl_safety=float(spec.get("cfl_safety", 0.5)),
            blowup_linf=float(spec.get("blowup_linf", 1e6)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    raw = _load_raw(Path(path))
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version!r}; this build reads version {SCHEMA_VERSION}"
        )
    experiment = raw.get("experiment")
    if experiment not in RUNNERS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; choose one of {sorted(RUNNERS)}"
        )
    seeds = raw.get("seeds", [0])
    if not isinstance(seeds, list) or not all(isinstance(s, int) for s in seeds):
        raise ConfigError("seeds must be a list of integers")
    for section in ("solver", "flux", "forcing", "initial", "params"):
        if section in raw and not isinstance(raw[section], dict):
            raise ConfigError(f"section {section!r} must be a table/object")
    try:
        return ExperimentConfig(
            experiment=experiment,
            solver=_solver_from(raw.get("solver", {})),
            flux_spec=raw.get("flux", {}),
            forcing_spec=raw.get("forcing", {}),
            initial_spec=raw.get("initial", {}),
            params=raw.get("params", {}),
            seeds=seeds,
            snapshot_stride=int(raw.get("snapshot_stride", 1)),
            out_dir=raw.get("out_dir"),
            schema_version=SCHEMA_VERSION,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def default_config(experiment: str) -> dict:
    """A ready-to-write config table for the named experiment."""
    if experiment not in RUNNERS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    base = {
        "schema_version": SCHEMA_VERSION,
        "experiment": experiment,
        "seeds": [0, 1, 2],
        "solver": {"nu": 0.1, "n": 128, "dt": 1e-3},
        "flux": {"kind": "quadratic"},
    }
    if experiment == "contraction":
        base["solver"] = {"nu": 0.1, "n": 256, "dt": 5e-4}
        base["forcing"] = {"kind": "zero"}
        base["params"] = {"T": 1.0, "amplitude": 1.0}
    elif experiment == "dissipativity":
        base["forcing"] = {"kind": "steady", "profile": {"name": "sine", "amplitude": 1.0}}
        base["params"] = {"T": 12.0}
    elif experiment == "harnack_sweep":
        base["params"] = {"rho_values": [0.0, 1.0, 5.0], "trial_count": 50}
    elif experiment == "pullback":
        base["solver"] = {"nu": 0.05, "n": 128, "dt": 1e-3}
        base["forcing"] = {"kind": "steady", "profile": {"name": "sine", "amplitude": 0.5}}
        base["params"] = {"n_max": 9, "T_view": 1.0}
    elif experiment == "stochastic_sync":
        base["seeds"] = list(range(10))
        base["forcing"] = {"kind": "stochastic", "modes": 8, "decay_p": 3.0, "lambda": 1.0}
        base["params"] = {"T_end": 50.0}
    return base


def _resolve_out_dir(cli_out, cfg: ExperimentConfig) -> Path:
    if cli_out:
        return Path(cli_out)
    if cfg.out_dir:
        return Path(cfg.out_dir)
    env = os.environ.get(OUT_ENV_VAR)
    if env:
        return Path(env)
    return Path("burgers_lab_out")


def _write_outputs(out_dir: Path, cfg: ExperimentConfig, outcome: ExperimentOutcome, stamp: bool) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    report = {
        "schema_version": cfg.schema_version,
        "experiment": cfg.experiment,
        "seeds": list(cfg.seeds),
        "passed": not outcome.failures,
        "failures": list(outcome.failures),
        "report": outcome.report,
    }
    write_json(out_dir / "report.json", report)
    if outcome.failures:
        write_json(out_dir / "failures.json", {"failures": list(outcome.failures)})
    for name, (header, rows) in sorted(outcome.series.items()):
        write_csv(out_dir / f"{name}.csv", header, rows)
    if outcome.plots:
        from .plots import save_line_plot

        for plot in outcome.plots:
            save_line_plot(
                out_dir / f"{plot['name']}.svg",
                plot["x"],
                plot["series"],
                xlabel=plot.get("xlabel", ""),
                ylabel=plot.get("ylabel", ""),
                title=plot.get("title", ""),
                logy=bool(plot.get("logy", False)),
                stamp=stamp,
            )


def _cmd_list() -> int:
    for name in sorted(CATALOG):
        print(CATALOG[name])
    return 0


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        if args.seeds is not None:
            try:
                cfg.seeds = [int(tok) for tok in args.seeds.split(",") if tok.strip()]
            except ValueError as exc:
                raise ConfigError(f"invalid --seeds value {args.seeds!r}") from exc
            if not cfg.seeds:
                raise ConfigError("empty --seeds value")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    runner = RUNNERS[cfg.experiment]
    outcome = runner(cfg, threads=max(1, args.threads))
    out_dir = _resolve_out_dir(args.out, cfg)
    _write_outputs(out_dir, cfg, outcome, stamp=args.stamp)

    if outcome.failures:
        print(f"{cfg.experiment}: FAIL ({len(outcome.failures)} assertion(s))")
        for item in outcome.failures:
            print(f"  - {item}")
        print(f"details in {out_dir / 'failures.json'}")
        return 1
    print(f"{cfg.experiment}: PASS (results in {out_dir})")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="burgers-lab",
        description="stability experiments for periodic viscous conservation laws",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment from a config file")
    run_p.add_argument("config", help="path to a TOML (or JSON) experiment config")
    run_p.add_argument("--out", default=None, help="output directory (overrides config and env)")
    run_p.add_argument("--seeds", default=None, help="comma-separated seed list override")
    run_p.add_argument("--threads", type=int, default=1, help="worker threads for independent seeds")
    run_p.add_argument("--stamp", action="store_true", help="embed timestamps in plot metadata")

    sub.add_parser("list", help="list available experiments and what each one checks")

    args = parser.parse_args(argv)
    if args.command == "list":
        return _cmd_list()
    return _cmd_run(args)
