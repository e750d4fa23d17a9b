"""End-to-end orchestration: training-window selection, covariance estimators,
the full suppression pipeline and the metric sweeps behind the result tables."""
from __future__ import annotations

import hashlib
import json
import time
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from . import io as dio
from .grassmann import OptimizerConfig, estimate_ccm, extract_subspace
from .screening import ScreeningResult, screen
from .sim import (ScenarioConfig, SpaceTimeDataset, TargetSpec, capon_spectrum,
                  inject_targets, simulate_dataset)
from .stap import (MetricCurve, StapWeights, apply_filter, beampattern_slices,
                   euclidean_mean_ccm, gip_select, improvement_factor, lsmi,
                   output_scnr, scm, stap_weights)
from .thpd import ThpdCovariance, thpd_from_snapshot

SUPPORTED_ESTIMATORS = ("optimal", "bgvcf", "gvcf", "lsmi", "scm", "gip", "euclidean_mean")


@dataclass
class BurgParams:
    psi1: float = 0.01
    order: int | None = None  # None -> full order (MN - 1)


@dataclass
class WindowSpec:
    num_training: int = 25
    num_guard: int = 2
    cut_index: int | None = None
    sweep: tuple[int, int] | None = None  # inclusive CUT range for power sweeps

    def __post_init__(self):
        if self.num_training < 1:
            raise ValueError("num_training must be >= 1")
        if self.num_guard < 0:
            raise ValueError("num_guard must be >= 0")


@dataclass
class PipelineConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    targets: list[TargetSpec] = field(default_factory=list)
    window: WindowSpec = field(default_factory=WindowSpec)
    burg: BurgParams = field(default_factory=BurgParams)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    estimators: list[str] = field(default_factory=lambda: ["bgvcf", "lsmi"])
    output_dir: str = "out"
    lsmi_loading: float = 10.0
    gip_keep_fraction: float = 0.8
    subspace_dim: int | None = None  # None -> Brennan clutter-rank estimate
    doppler_points: int = 81
    scnr_grid_db: list[float] = field(default_factory=lambda: list(np.arange(-10.0, 30.0, 5.0)))

    def __post_init__(self):
        for name in self.estimators:
            if name not in SUPPORTED_ESTIMATORS:
                raise ValueError(f"unknown estimator '{name}'; supported: {SUPPORTED_ESTIMATORS}")

    @property
    def effective_subspace_dim(self) -> int:
        s = self.subspace_dim if self.subspace_dim is not None else self.scenario.brennan_rank
        return min(max(s, 1), self.scenario.dof)


@dataclass
class RunManifest:
    config_hash: str
    seed: int
    started_at: float
    finished_at: float
    outputs: dict[str, str]
    timings: dict[str, float]


def select_training_window(num_cells: int, cut_index: int, num_training: int,
                           num_guard: int) -> list[int]:
    """Indices of the num_training cells nearest the CUT, excluding the CUT and
    its guard cells, symmetric where possible and one-sided at the edges."""
    if not (0 <= cut_index < num_cells):
        raise ValueError("cut_index outside the dataset")
    excluded = set(range(max(0, cut_index - num_guard), min(num_cells, cut_index + num_guard + 1)))
    candidates = [i for i in range(num_cells) if i not in excluded]
    if len(candidates) < num_training:
        raise ValueError("training window exceeds the dataset bounds")
    candidates.sort(key=lambda i: (abs(i - cut_index), i))
    return sorted(candidates[:num_training])


def compute_thpd(snapshots, burg: BurgParams) -> list[ThpdCovariance]:
    """One Toeplitz Hermitian PD covariance per snapshot."""
    return [thpd_from_snapshot(s.data, psi1=burg.psi1, order=burg.order, cell_index=s.cell_index)
            for s in snapshots]


def _vcf_estimate(thpd_mats: list[ThpdCovariance], cfg: PipelineConfig):
    s = cfg.effective_subspace_dim
    points = [extract_subspace(m, s) for m in thpd_mats]
    return estimate_ccm(points, cfg.optimizer)


def estimate_covariance(name: str, train_snapshots, thpd_mats: list[ThpdCovariance],
                        cfg: PipelineConfig, ideal: np.ndarray | None = None):
    """Dispatches one estimator label; returns (R_hat, extras).

    extras may contain 'screening' (ScreeningResult) and 'trace' (objective values).
    """
    extras: dict = {}
    if name == "optimal":
        if ideal is None:
            raise ValueError("optimal estimator requires the ideal covariance")
        return ideal, extras
    if name == "bgvcf":
        result = screen(thpd_mats)
        extras["screening"] = result
        keep = set(result.clutter_cells)
        mats = [m for m in thpd_mats if m.cell_index in keep]
        est = _vcf_estimate(mats, cfg)
        extras["trace"] = est.objective_trace
        extras["converged"] = est.converged
        return est.covariance, extras
    if name == "gvcf":
        est = _vcf_estimate(thpd_mats, cfg)
        extras["trace"] = est.objective_trace
        extras["converged"] = est.converged
        return est.covariance, extras
    if name == "lsmi":
        return lsmi(train_snapshots, cfg.lsmi_loading), extras
    if name == "scm":
        return scm(train_snapshots), extras
    if name == "gip":
        kept = gip_select(train_snapshots, keep_fraction=cfg.gip_keep_fraction)
        return lsmi(kept, cfg.lsmi_loading), extras
    if name == "euclidean_mean":
        return euclidean_mean_ccm(thpd_mats), extras
    raise ValueError(f"unknown estimator '{name}'")


def _target_steering(cfg: PipelineConfig) -> tuple[float, float]:
    if cfg.targets:
        t = cfg.targets[0]
        return t.normalized_doppler, t.normalized_spatial
    return 0.25, 0.0


def _default_cut(cfg: PipelineConfig) -> int:
    if cfg.window.cut_index is not None:
        return cfg.window.cut_index
    if cfg.targets:
        return cfg.targets[0].range_cells[0]
    return cfg.scenario.num_range_cells // 2


def scaled_targets(targets: list[TargetSpec], input_scnr_db: float,
                   per_element_power: float) -> list[TargetSpec]:
    """Copies of the targets with amplitudes set to the requested input SCNR
    (target per-element power over clutter-plus-noise per-element power)."""
    amp = float(np.sqrt(10.0 ** (input_scnr_db / 10.0) * per_element_power))
    return [TargetSpec(range_cells=list(t.range_cells),
                       normalized_doppler=t.normalized_doppler,
                       normalized_spatial=t.normalized_spatial,
                       amplitude=amp) for t in targets]


def output_scnr_curves(cfg: PipelineConfig, estimators: list[str] | None = None,
                       input_scnr_grid=None) -> list[MetricCurve]:
    """Output SCNR versus input SCNR: at each sweep point the targets are
    rescaled, the full estimation pipeline is re-run on the training window of
    the CUT, and the filter is scored against the ideal covariance."""
    estimators = estimators if estimators is not None else cfg.estimators
    grid = np.asarray(input_scnr_grid if input_scnr_grid is not None else cfg.scnr_grid_db,
                      dtype=float)
    base = simulate_dataset(cfg.scenario)
    R_ideal = base.ideal_clutter_covariance
    per_elem = float(np.trace(R_ideal).real) / cfg.scenario.dof
    cut = _default_cut(cfg)
    f_d, f_s = _target_steering(cfg)
    v = cfg.scenario.steering(f_d, f_s)
    train_idx = select_training_window(cfg.scenario.num_range_cells, cut,
                                       cfg.window.num_training, cfg.window.num_guard)
    values = {name: [] for name in estimators}
    for scnr_db in grid:
        targets = scaled_targets(cfg.targets, scnr_db, per_elem)
        ds = inject_targets(base, targets) if targets else base
        train = [ds.snapshots[i] for i in train_idx]
        mats = compute_thpd(train, cfg.burg)
        amp = targets[0].resolve_amplitude(cfg.scenario.noise_variance) if targets else 1.0
        signal = amp * v
        for name in estimators:
            R_hat, _ = estimate_covariance(name, train, mats, cfg, ideal=R_ideal)
            w = stap_weights(R_hat, v, name)
            values[name].append(output_scnr(w, signal, R_ideal))
    return [MetricCurve(abscissa=grid, values=np.asarray(values[name]),
                        estimator_name=name, metric_kind="output-SCNR")
            for name in estimators]


def output_power_sweep(cfg: PipelineConfig, dataset: SpaceTimeDataset | None = None,
                       estimators: list[str] | None = None) -> list[MetricCurve]:
    """Filter output power |y|^2 (dB) per CUT over the configured sweep range,
    with the sliding training window re-selected per cell."""
    if cfg.window.sweep is None:
        raise ValueError("window.sweep must be set for a power sweep")
    estimators = estimators if estimators is not None else cfg.estimators
    ds = dataset if dataset is not None else simulate_dataset(cfg.scenario, cfg.targets)
    lo, hi = cfg.window.sweep
    f_d, f_s = _target_steering(cfg)
    v = cfg.scenario.steering(f_d, f_s)
    cells = np.arange(lo, hi + 1)
    values = {name: [] for name in estimators}
    for cut in cells:
        train_idx = select_training_window(cfg.scenario.num_range_cells, int(cut),
                                           cfg.window.num_training, cfg.window.num_guard)
        train = [ds.snapshots[i] for i in train_idx]
        mats = compute_thpd(train, cfg.burg)
        for name in estimators:
            R_hat, _ = estimate_covariance(name, train, mats, cfg,
                                           ideal=ds.ideal_clutter_covariance)
            w = stap_weights(R_hat, v, name)
            y = apply_filter(w, ds.snapshots[int(cut)])
            p = abs(y) ** 2
            values[name].append(10.0 * np.log10(p) if p > 0 else -300.0)
    return [MetricCurve(abscissa=cells.astype(float), values=np.asarray(values[name]),
                        estimator_name=name, metric_kind="output-power")
            for name in estimators]


def config_hash(cfg: PipelineConfig) -> str:
    payload = json.dumps(asdict(cfg), sort_keys=True, default=_json_default)
    return hashlib.sha256(payload.encode()).hexdigest()


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj)}")


def run_pipeline(cfg: PipelineConfig, dataset: SpaceTimeDataset | None = None) -> RunManifest:
    """Simulate (or take) a dataset, estimate the covariance with every
    requested estimator, filter the CUT, and emit all metric tables."""
    from pathlib import Path

    started = time.time()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs: dict[str, str] = {}
    timings: dict[str, float] = {}

    t0 = time.time()
    ds = dataset if dataset is not None else simulate_dataset(cfg.scenario, cfg.targets)
    timings["simulate"] = time.time() - t0
    R_ideal = ds.ideal_clutter_covariance
    cut = _default_cut(cfg)
    f_d, f_s = _target_steering(cfg)
    v = cfg.scenario.steering(f_d, f_s)
    train_idx = select_training_window(cfg.scenario.num_range_cells, cut,
                                       cfg.window.num_training, cfg.window.num_guard)
    train = [ds.snapshots[i] for i in train_idx]

    t0 = time.time()
    mats = compute_thpd(train, cfg.burg)
    timings["thpd"] = time.time() - t0

    # Screening table (always emitted; it backs the disc plots).
    t0 = time.time()
    screening = screen(mats)
    outputs["screening"] = str(out / "screening.csv")
    dio.write_screening_csv(outputs["screening"], screening)
    timings["screening"] = time.time() - t0

    doppler_grid = np.linspace(-0.5, 0.5, cfg.doppler_points)
    spatial_grid = np.linspace(-0.5, 0.5, cfg.doppler_points)
    M, N = cfg.scenario.num_pulses, cfg.scenario.num_elements

    if_curves: list[MetricCurve] = []
    bp_dop: list[MetricCurve] = []
    bp_spa: list[MetricCurve] = []
    traces: dict[str, np.ndarray] = {}
    results_rows = []
    for name in cfg.estimators:
        t0 = time.time()
        R_hat, extras = estimate_covariance(name, train, mats, cfg, ideal=R_ideal)
        w = stap_weights(R_hat, v, name)
        y = apply_filter(w, ds.snapshots[cut])
        results_rows.append((name, cut, y))
        if "trace" in extras:
            traces[name] = np.asarray(extras["trace"])
        if R_ideal is not None:
            if_curves.append(improvement_factor(R_hat, R_ideal, doppler_grid, f_s, M, N, name))
        bp_dop.append(beampattern_slices(w, doppler_grid, "doppler", f_s, M, N))
        bp_spa.append(beampattern_slices(w, spatial_grid, "spatial", f_d, M, N))
        timings[f"estimator:{name}"] = time.time() - t0
    if R_ideal is not None:
        w_opt = stap_weights(R_ideal, v, "optimal")
        if_curves.append(improvement_factor(R_ideal, R_ideal, doppler_grid, f_s, M, N, "optimal"))
        bp_dop.append(beampattern_slices(w_opt, doppler_grid, "doppler", f_s, M, N))
        bp_spa.append(beampattern_slices(w_opt, spatial_grid, "spatial", f_d, M, N))

    if if_curves:
        outputs["if_curve"] = str(out / "if_curve.csv")
        dio.write_curves_csv(outputs["if_curve"], if_curves)
    outputs["beampattern_doppler"] = str(out / "beampattern_doppler.csv")
    dio.write_curves_csv(outputs["beampattern_doppler"], bp_dop)
    outputs["beampattern_spatial"] = str(out / "beampattern_spatial.csv")
    dio.write_curves_csv(outputs["beampattern_spatial"], bp_spa)
    outputs["filter_output"] = str(out / "filter_output.csv")
    dio.write_filter_output_csv(outputs["filter_output"], results_rows)
    if traces:
        outputs["convergence"] = str(out / "convergence.csv")
        dio.write_convergence_csv(outputs["convergence"], traces)

    if R_ideal is not None and cfg.targets:
        t0 = time.time()
        scnr = output_scnr_curves(cfg)
        outputs["scnr_curve"] = str(out / "scnr_curve.csv")
        dio.write_curves_csv(outputs["scnr_curve"], scnr)
        timings["scnr_sweep"] = time.time() - t0

    manifest = RunManifest(config_hash=config_hash(cfg), seed=cfg.scenario.rng_seed,
                           started_at=started, finished_at=time.time(),
                           outputs=outputs, timings=timings)
    dio.write_manifest(str(out / "manifest.json"), manifest)
    return manifest
