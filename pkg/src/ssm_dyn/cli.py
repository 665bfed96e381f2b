"""Command-line front end.

    ssm-dyn run <scenario> [--config FILE] [--t-min --t-max --t-points]
                           [--out DIR] [--full-scale] [--workers N]
    ssm-dyn validate <scenario> [--config FILE]
    ssm-dyn fit <csv> [--points N] [--value distance|leakage|projector_drift]
    ssm-dyn sweep-model <model-file> [--t-min --t-max --t-points] [--out DIR]
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .evolution import (default_t_grid, loglog_fit, read_sweep_csv, run_sweep,
                        write_sweep_csv, write_sweep_json)
from .experiments import (SCENARIOS, ScenarioConfig, default_params,
                          run_scenario, validate_scenario)
from .model_config import ConfigError, load_config, load_model


def _scenario_config(args) -> ScenarioConfig:
    file_cfg: dict[str, list[str]] = {}
    if args.config:
        file_cfg = load_config(args.config)

    def single(key, cast, default):
        values = file_cfg.get(key)
        if values:
            return cast(values[-1])
        return default

    scenario = args.scenario or single("scenario", str, None)
    if scenario is None:
        raise ConfigError("no scenario given on the command line or in the config file")

    params = {}
    for key in default_params(scenario):
        if key in file_cfg:
            raw = file_cfg[key][-1]
            default = default_params(scenario)[key]
            cast = type(default) if not isinstance(default, str) else str
            params[key] = cast(raw)

    return ScenarioConfig(
        scenario=scenario,
        params=params,
        t_min=args.t_min if args.t_min is not None else single("t_min", float, 1e2),
        t_max=args.t_max if args.t_max is not None else single("t_max", float, 1e5),
        t_points=args.t_points if args.t_points is not None else single("t_points", int, 8),
        fit_points=single("fit_points", int, 4),
        out_dir=args.out or single("out", str, None),
        full_scale=getattr(args, "full_scale", False) or single("full_scale", lambda s: s.lower() in ("1", "true", "yes"), False),
        workers=getattr(args, "workers", 1),
    )


def _cmd_run(args) -> int:
    cfg = _scenario_config(args)
    result = run_scenario(cfg)
    summary = {"scenario": result.scenario, "report": result.report}
    if cfg.out_dir:
        summary["out_dir"] = str(cfg.out_dir)
    json.dump(summary, sys.stdout, indent=2, default=_jsonable)
    print()
    return 0


def _cmd_validate(args) -> int:
    cfg = _scenario_config(args)
    report = validate_scenario(cfg)
    json.dump({"scenario": cfg.scenario, "valid": True, "checks": report},
              sys.stdout, indent=2, default=_jsonable)
    print()
    return 0


def _cmd_fit(args) -> int:
    records = read_sweep_csv(args.csv)
    fit = loglog_fit(records, args.points, value=args.value)
    json.dump({"csv": str(args.csv), "value": args.value, "points": fit.points_used,
               "slope": fit.slope, "intercept": fit.intercept,
               "residual": fit.residual}, sys.stdout, indent=2)
    print()
    return 0


def _cmd_sweep_model(args) -> int:
    model = load_model(args.model_file)
    grid = default_t_grid(args.t_min or 1e2, args.t_max or 1e5, args.t_points or 8)
    records = run_sweep(model, grid, workers=args.workers)
    fit = loglog_fit(records, min(4, len(records)))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        name = Path(args.model_file).stem
        write_sweep_csv(records, out / f"{name}.csv")
        write_sweep_json(records, out / f"{name}.json",
                         meta={"model_file": str(args.model_file)})
    json.dump({"model": str(args.model_file), "slope": fit.slope,
               "intercept": fit.intercept,
               "records": [{"T": r.t_scale, "distance": r.distance,
                            "leakage": r.leakage} for r in records]},
              sys.stdout, indent=2)
    print()
    return 0


def _jsonable(obj):
    try:
        return obj.item()
    except AttributeError:
        return str(obj)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssm-dyn",
        description="Steady-state-manifold dynamics: scenario sweeps and fits")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="validate a scenario model and run its sweep")
    run_p.add_argument("scenario", nargs="?", choices=SCENARIOS)
    run_p.add_argument("--config", type=Path, help="key = value configuration file")
    run_p.add_argument("--t-min", type=float, default=None)
    run_p.add_argument("--t-max", type=float, default=None)
    run_p.add_argument("--t-points", type=int, default=None)
    run_p.add_argument("--out", type=Path, default=None, help="output directory")
    run_p.add_argument("--full-scale", action="store_true",
                       help="full-size model (spin-boson: 60 bath modes)")
    run_p.add_argument("--workers", type=int, default=1)
    run_p.set_defaults(func=_cmd_run)

    val_p = sub.add_parser("validate", help="run model assertions only, no sweep")
    val_p.add_argument("scenario", nargs="?", choices=SCENARIOS)
    val_p.add_argument("--config", type=Path)
    val_p.add_argument("--full-scale", action="store_true")
    val_p.set_defaults(func=_cmd_validate, t_min=None, t_max=None, t_points=None, out=None)

    fit_p = sub.add_parser("fit", help="log-log fit of a sweep CSV")
    fit_p.add_argument("csv", type=Path)
    fit_p.add_argument("--points", type=int, default=4)
    fit_p.add_argument("--value", default="distance",
                       choices=("distance", "leakage", "projector_drift"))
    fit_p.set_defaults(func=_cmd_fit)

    model_p = sub.add_parser("sweep-model", help="sweep a custom model file")
    model_p.add_argument("model_file", type=Path)
    model_p.add_argument("--t-min", type=float, default=None)
    model_p.add_argument("--t-max", type=float, default=None)
    model_p.add_argument("--t-points", type=int, default=None)
    model_p.add_argument("--out", type=Path, default=None)
    model_p.add_argument("--workers", type=int, default=1)
    model_p.set_defaults(func=_cmd_sweep_model)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - surface model errors cleanly
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
