"""Serialization: dataset CSV + JSON sidecar, metric CSV tables, config files.

All CSV files use plain ASCII with repr-formatted floats so identical runs
produce byte-identical outputs.  Layouts are documented in docs/formats.md.
"""
from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .sim import ScenarioConfig, SpaceTimeDataset, SpaceTimeSnapshot, TargetSpec


def _fmt(x: float) -> str:
    return repr(float(x))


def save_dataset(dataset: SpaceTimeDataset, prefix: str) -> tuple[str, str]:
    """Writes prefix.csv (one row per cell, interleaved re/im) and prefix.json."""
    csv_path, json_path = f"{prefix}.csv", f"{prefix}.json"
    with open(csv_path, "w") as fh:
        for snap in dataset.snapshots:
            inter = np.empty(2 * snap.data.size)
            inter[0::2] = snap.data.real
            inter[1::2] = snap.data.imag
            fh.write(",".join(_fmt(x) for x in inter) + "\n")
    meta = {
        "config": dataclasses.asdict(dataset.config),
        "targets": [dataclasses.asdict(t) for t in dataset.targets],
    }
    for t in meta["targets"]:
        if isinstance(t["amplitude"], complex):
            t["amplitude"] = [t["amplitude"].real, t["amplitude"].imag]
    with open(json_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def load_dataset(prefix: str) -> SpaceTimeDataset:
    """Round-trips a dataset written by save_dataset (ideal covariance is not
    serialized; regenerate from the config seed when oracle metrics are needed)."""
    with open(f"{prefix}.json") as fh:
        meta = json.load(fh)
    config = ScenarioConfig(**meta["config"])
    targets = []
    for t in meta["targets"]:
        amp = t["amplitude"]
        if isinstance(amp, list):
            amp = complex(amp[0], amp[1])
        targets.append(TargetSpec(range_cells=t["range_cells"],
                                  normalized_doppler=t["normalized_doppler"],
                                  normalized_spatial=t["normalized_spatial"],
                                  amplitude=amp, snr_db=t["snr_db"]))
    snaps = _read_snapshot_csv(f"{prefix}.csv", config.dof)
    if len(snaps) != config.num_range_cells:
        raise ValueError(f"{prefix}.csv holds {len(snaps)} cells, config says "
                         f"{config.num_range_cells}")
    return SpaceTimeDataset(config=config, snapshots=snaps, targets=targets)


def _read_snapshot_csv(path: str, mn: int) -> list[SpaceTimeSnapshot]:
    snaps = []
    with open(path) as fh:
        for row, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            vals = np.array([float(v) for v in line.split(",")])
            if vals.size != 2 * mn:
                raise ValueError(f"{path}: row {row} has {vals.size} values, "
                                 f"expected {2 * mn} (2*MN)")
            snaps.append(SpaceTimeSnapshot(row, vals[0::2] + 1j * vals[1::2]))
    return snaps


def load_cpi_file(path: str, M: int, N: int) -> SpaceTimeDataset:
    """Loads an interleaved-complex CSV of CPI snapshots with M elements and
    N pulses per cell; builds a minimal scenario around it."""
    mn = M * N
    snaps = _read_snapshot_csv(path, mn)
    if not snaps:
        raise ValueError(f"{path}: no snapshots found")
    config = ScenarioConfig(num_elements=M, num_pulses=N, num_range_cells=len(snaps),
                            texture_sigma_db=0.0)
    return SpaceTimeDataset(config=config, snapshots=snaps, targets=[])


# ---------------------------------------------------------------------------
# Metric tables


def write_curves_csv(path: str, curves) -> None:
    with open(path, "w") as fh:
        fh.write("metric_kind,estimator,abscissa,value_db\n")
        for c in curves:
            for x, y in zip(c.abscissa, c.values):
                fh.write(f"{c.metric_kind},{c.estimator_name},{_fmt(x)},{_fmt(y)}\n")


def write_screening_csv(path: str, result) -> None:
    with open(path, "w") as fh:
        fh.write("cell_index,center,radius,threshold,is_clutter\n")
        for s in result.summaries:
            fh.write(f"{s.cell_index},{_fmt(s.center)},{_fmt(s.radius)},"
                     f"{_fmt(s.threshold_used)},{int(s.is_clutter)}\n")


def write_convergence_csv(path: str, traces: dict) -> None:
    with open(path, "w") as fh:
        fh.write("estimator,iteration,objective\n")
        for name in sorted(traces):
            for i, val in enumerate(traces[name]):
                fh.write(f"{name},{i},{_fmt(val)}\n")


def write_filter_output_csv(path: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write("estimator,cell_index,output_real,output_imag\n")
        for name, cell, y in rows:
            fh.write(f"{name},{cell},{_fmt(y.real)},{_fmt(y.imag)}\n")


def write_capon_csv(path: str, doppler_grid, spatial_grid, power) -> None:
    power = np.asarray(power)
    with open(path, "w") as fh:
        fh.write("doppler,spatial,power_db\n")
        for i, fd in enumerate(doppler_grid):
            for j, fs in enumerate(spatial_grid):
                fh.write(f"{_fmt(fd)},{_fmt(fs)},{_fmt(10.0 * np.log10(power[i, j]))}\n")


def write_manifest(path: str, manifest) -> None:
    payload = dataclasses.asdict(manifest)
    payload["outputs"]["manifest"] = path
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Config files (TOML or JSON)


def load_config_file(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(path)
    if p.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    with open(p) as fh:
        return json.load(fh)
