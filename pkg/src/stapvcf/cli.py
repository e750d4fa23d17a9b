"""Command-line interface: simulate / run / screen / metrics / convert.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io as dio
from .grassmann import OptimizerConfig
from .pipeline import (BurgParams, PipelineConfig, WindowSpec, compute_thpd,
                       output_power_sweep, run_pipeline)
from .screening import screen
from .sim import ScenarioConfig, TargetSpec, capon_spectrum, simulate_dataset
from .thpd import thpd_from_snapshot

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def config_from_dict(raw: dict) -> PipelineConfig:
    """Builds a PipelineConfig from the (TOML/JSON) config file structure."""
    scenario = ScenarioConfig(**raw.get("scenario", {}))
    targets = [TargetSpec(**t) for t in raw.get("targets", [])]
    window_raw = dict(raw.get("window", {}))
    if "sweep" in window_raw and window_raw["sweep"] is not None:
        window_raw["sweep"] = tuple(window_raw["sweep"])
    window = WindowSpec(**window_raw)
    burg = BurgParams(**raw.get("burg", {}))
    optimizer = OptimizerConfig(**raw.get("optimizer", {}))
    kwargs = {}
    for key in ("estimators", "output_dir", "lsmi_loading", "gip_keep_fraction",
                "subspace_dim", "doppler_points", "scnr_grid_db"):
        if key in raw:
            kwargs[key] = raw[key]
    return PipelineConfig(scenario=scenario, targets=targets, window=window,
                          burg=burg, optimizer=optimizer, **kwargs)


def load_pipeline_config(path: str, output_dir: str | None = None) -> PipelineConfig:
    cfg = config_from_dict(dio.load_config_file(path))
    env_out = os.environ.get("STAPVCF_OUTPUT_DIR")
    if output_dir:
        cfg.output_dir = output_dir
    elif env_out:
        cfg.output_dir = env_out
    return cfg


def _cmd_simulate(args) -> int:
    cfg = load_pipeline_config(args.config, args.output_dir)
    ds = simulate_dataset(cfg.scenario, cfg.targets)
    os.makedirs(cfg.output_dir, exist_ok=True)
    prefix = os.path.join(cfg.output_dir, "dataset")
    dio.save_dataset(ds, prefix)
    grid = np.linspace(-0.5, 0.5, cfg.doppler_points)
    power = capon_spectrum(ds.ideal_clutter_covariance, grid, grid,
                           cfg.scenario.num_pulses, cfg.scenario.num_elements)
    dio.write_capon_csv(os.path.join(cfg.output_dir, "capon.csv"), grid, grid, power)
    print(f"wrote {prefix}.csv, {prefix}.json, capon.csv")
    return 0


def _cmd_run(args) -> int:
    cfg = load_pipeline_config(args.config, args.output_dir)
    _apply_overrides(cfg, args)
    manifest = run_pipeline(cfg)
    print(f"pipeline complete; outputs in {cfg.output_dir} (config {manifest.config_hash[:12]})")
    return 0


def _cmd_screen(args) -> int:
    cfg = load_pipeline_config(args.config, args.output_dir)
    _apply_overrides(cfg, args)
    if args.cells:
        lo, hi = (int(v) for v in args.cells.split(":"))
        cells = list(range(lo, hi + 1))
    else:
        from .pipeline import select_training_window, _default_cut
        cells = select_training_window(cfg.scenario.num_range_cells, _default_cut(cfg),
                                       cfg.window.num_training, cfg.window.num_guard)
    ds = simulate_dataset(cfg.scenario, cfg.targets)
    mats = compute_thpd([ds.snapshots[i] for i in cells], cfg.burg)
    result = screen(mats)
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = os.path.join(cfg.output_dir, "screening.csv")
    dio.write_screening_csv(path, result)
    print(f"wrote {path}; flagged target cells: {result.target_cells}")
    return 0


def _cmd_metrics(args) -> int:
    cfg = load_pipeline_config(args.config, args.output_dir)
    _apply_overrides(cfg, args)
    curves = output_power_sweep(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = os.path.join(cfg.output_dir, "output_power.csv")
    dio.write_curves_csv(path, curves)
    print(f"wrote {path}")
    return 0


def _cmd_convert(args) -> int:
    ds = dio.load_cpi_file(args.input, args.elements, args.pulses)
    dio.save_dataset(ds, args.output)
    print(f"wrote {args.output}.csv and {args.output}.json ({len(ds.snapshots)} snapshots)")
    return 0


def _apply_overrides(cfg: PipelineConfig, args) -> None:
    if getattr(args, "psi1", None) is not None:
        cfg.burg.psi1 = args.psi1
    if getattr(args, "ar_order", None) is not None:
        cfg.burg.order = args.ar_order
    if getattr(args, "subspace_dim", None) is not None:
        cfg.subspace_dim = args.subspace_dim
    if getattr(args, "step_size", None) is not None:
        cfg.optimizer.step_size = args.step_size
    if getattr(args, "max_iters", None) is not None:
        cfg.optimizer.max_iterations = args.max_iters
    if getattr(args, "tol", None) is not None:
        cfg.optimizer.tolerance = args.tol


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stapvcf",
                                     description="Space-time clutter suppression test bench")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="TOML or JSON pipeline config")
        p.add_argument("--output-dir", default=None)
        p.add_argument("--psi1", type=float, default=None)
        p.add_argument("--ar-order", type=int, default=None)
        p.add_argument("--subspace-dim", type=int, default=None)
        p.add_argument("--step-size", type=float, default=None)
        p.add_argument("--max-iters", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("simulate", help="generate a dataset and its Capon spectrum")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("run", help="full suppression pipeline with all metric tables")
    add_common(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("screen", help="Brauer-disc screening table only")
    add_common(p)
    p.add_argument("--cells", default=None, help="inclusive cell range lo:hi")
    p.set_defaults(func=_cmd_screen)

    p = sub.add_parser("metrics", help="per-cell output power sweep")
    add_common(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("convert", help="convert a raw CPI CSV into the dataset format")
    p.add_argument("--input", required=True)
    p.add_argument("--elements", type=int, required=True)
    p.add_argument("--pulses", type=int, required=True)
    p.add_argument("--output", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, IndexError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
