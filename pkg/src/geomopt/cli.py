"""Command line: ``geomopt <experiment|solve|constants> [--config FILE] [--key value ...]``.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 non-identification
(hoffman_scaling only, when every trial is flagged).
"""

from __future__ import annotations

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError, GeomoptError, NumericalError, SamplingError
from .experiments import (
    ExperimentConfig,
    load_problem,
    run_constants,
    run_hoffman_scaling,
    run_solve,
    run_svm,
    run_trajectory,
)

COMMANDS = ("hoffman_scaling", "trajectory", "svm", "solve", "constants")

EXPERIMENT_KEYS = {
    "n": int, "d": int, "s": int, "trials": int, "seed": int,
    "max_iter": int, "record_every": int, "n_samples": int,
    "rho": float, "eta": float, "eta_multiplier": float, "gradmap_tol": float,
    "noise_sigma": float, "c_cap": float, "separation": float,
    "eta_policy": str, "out": str, "ensemble": str,
    "dims": list, "ensembles": list, "restrictions": list,
    "normalized": bool, "timestamp": bool,
}
SOLVER_KEYS = {"max_iter": int, "gradmap_tol": float, "record_every": int}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="geomopt",
        description="Restricted-geometry experiments for proximal gradient methods",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", default=None, help="TOML config file")
        for key, kind in EXPERIMENT_KEYS.items():
            if kind is bool:
                cmd.add_argument(f"--{key}", action="store_true", default=None)
            elif kind is list:
                cmd.add_argument(f"--{key}", nargs="+", default=None)
            else:
                cmd.add_argument(f"--{key}", type=kind, default=None)
    return parser


def _load_config_file(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc
    for section in data:
        if section not in ("experiment", "problem", "solver"):
            raise ConfigError(f"unknown config section [{section}]")
    return data

def _merge_experiment(cfg: ExperimentConfig, section: dict, where) -> ExperimentConfig:
    for key, value in section.items():
        if key == "experiment":
            continue
        if key == "ensemble":
            key, value = "ensembles", [value]
        if key == "dims":
            value = [int(v) for v in value]
        if not hasattr(cfg, key) or key not in EXPERIMENT_KEYS and key != "ensembles":
            raise ConfigError(f"unknown key {key!r} in {where}")
        setattr(cfg, key, value)
    return cfg


def _config_from_args(args) -> tuple[ExperimentConfig, dict]:
    command = args.command
    if command == "hoffman_scaling":
        cfg = ExperimentConfig.hoffman_scaling_defaults()
    elif command == "trajectory":
        cfg = ExperimentConfig.trajectory_defaults()
    else:
        cfg = ExperimentConfig(experiment=command, n=40, trials=1)
    cfg.experiment = command
    data = _load_config_file(args.config) if args.config else {}
    if "experiment" in data:
        _merge_experiment(cfg, data["experiment"], "[experiment]")
    if "solver" in data:
        for key in data["solver"]:
            if key not in SOLVER_KEYS:
                raise ConfigError(f"unknown key {key!r} in [solver]")
        for key, value in data["solver"].items():
            setattr(cfg, key, value)
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config") and v is not None}
    _merge_experiment(cfg, overrides, "command line")
    cfg.__post_init__()  # revalidate after merging
    return cfg, data


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg, data = _config_from_args(args)
        if args.command == "hoffman_scaling":
            info = run_hoffman_scaling(cfg)
            print(f"wrote {cfg.out}: {info['total']} rows, {info['flagged']} flagged")
            if info["flagged"] == info["total"]:
                print("error: no trial identified its planted support", file=sys.stderr)
                return 4
        elif args.command == "trajectory":
            info = run_trajectory(cfg)
            print(f"wrote {cfg.out}: {len(info['trajectory'].records)} iterates")
        elif args.command == "svm":
            info = run_svm(cfg)
            print(f"wrote {cfg.out} and {info['constants_path']}; "
                  f"{len(info['support_vectors'])} support vectors")
        elif args.command in ("solve", "constants"):
            if "problem" not in data:
                raise ConfigError(f"{args.command} needs a [problem] section in the config")
            problem, x0 = load_problem(data["problem"])
            if args.command == "solve":
                info = run_solve(cfg, problem, x0)
                print(f"wrote {cfg.out}: {len(info['trajectory'].records)} iterates")
            else:
                info = run_constants(cfg, problem, x0)
                print(f"wrote {cfg.out}: {len(info['reports'])} restriction rows")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, SamplingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except GeomoptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
