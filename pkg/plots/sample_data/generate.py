"""Regenerates the sample CSVs from an actual stapvcf pipeline run.

Run from the repository root with the stapvcf package installed:

    python3 plots/sample_data/generate.py

The screening table comes from the 50-cell window (cells 15-64) of the
simulated scenario with two three-cell targets injected, so the disc figure
shows six out-of-boundary cells.
"""
from __future__ import annotations

import pathlib
import shutil
import tempfile

import numpy as np

import stapvcf as sv
from stapvcf import io as dio
from stapvcf.pipeline import PipelineConfig, WindowSpec, output_power_sweep

HERE = pathlib.Path(__file__).parent


def fig_targets(snr_db: float = 85.0) -> list[sv.TargetSpec]:
    return [sv.TargetSpec(range_cells=[30, 31, 32], normalized_doppler=0.25,
                          normalized_spatial=0.0, snr_db=snr_db),
            sv.TargetSpec(range_cells=[39, 40, 41], normalized_doppler=-0.1,
                          normalized_spatial=0.0, snr_db=snr_db)]


def main() -> None:
    scenario = sv.table1_scenario(seed=0)
    targets = fig_targets()
    ds = sv.simulate_dataset(scenario, targets)

    # Screening over the fixed 50-cell block surrounding both targets.
    mats = [sv.thpd_from_snapshot(ds.snapshots[i].data, cell_index=i)
            for i in range(15, 65)]
    dio.write_screening_csv(str(HERE / "screening.csv"), sv.screen(mats))

    # Capon spectrum of the ideal clutter-plus-noise covariance.
    grid = np.linspace(-0.5, 0.5, 41)
    power = sv.capon_spectrum(ds.ideal_clutter_covariance, grid, grid,
                              scenario.num_pulses, scenario.num_elements)
    dio.write_capon_csv(str(HERE / "capon.csv"), grid, grid, power)

    # Full pipeline run for the curve and convergence tables.
    tmp = tempfile.mkdtemp()
    cfg = PipelineConfig(scenario=scenario, targets=targets,
                         window=WindowSpec(num_training=25, num_guard=2,
                                           cut_index=31),
                         estimators=["bgvcf", "lsmi"],
                         scnr_grid_db=[-10.0, 0.0, 10.0, 20.0],
                         doppler_points=41,
                         output_dir=tmp)
    sv.run_pipeline(cfg, dataset=ds)
    for name in ("if_curve.csv", "beampattern_doppler.csv",
                 "beampattern_spatial.csv", "scnr_curve.csv",
                 "convergence.csv"):
        shutil.copy(pathlib.Path(tmp) / name, HERE / name)
    shutil.rmtree(tmp)

    # Output power across the target block, lsmi only to keep this quick.
    sweep_cfg = PipelineConfig(scenario=scenario, targets=targets,
                               window=WindowSpec(num_training=25, num_guard=2,
                                                 sweep=(25, 45)),
                               estimators=["lsmi"])
    dio.write_curves_csv(str(HERE / "output_power.csv"),
                         output_power_sweep(sweep_cfg, dataset=ds))
    print(f"sample CSVs written to {HERE}")


if __name__ == "__main__":
    main()
