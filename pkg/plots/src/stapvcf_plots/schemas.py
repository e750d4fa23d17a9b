"""CSV schema definitions and readers for the result tables.

This package never recomputes pipeline math: every number in a figure comes
straight out of a CSV produced by the `stapvcf` CLI.  Each documented schema
is accepted by exactly one figure kind (the three curve kinds share a header
and are told apart by the metric_kind column).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

CURVE_HEADER = ["metric_kind", "estimator", "abscissa", "value_db"]
SCREENING_HEADER = ["cell_index", "center", "radius", "threshold", "is_clutter"]
CAPON_HEADER = ["doppler", "spatial", "power_db"]
CONVERGENCE_HEADER = ["estimator", "iteration", "objective"]

# figure_kind -> metric_kind values accepted in a curve table.
CURVE_KINDS = {
    "if_curve": {"IF"},
    "scnr_curve": {"output-SCNR"},
    "power": {"output-power"},
    "beampattern": {"beampattern-doppler", "beampattern-spatial"},
}

FIGURE_KINDS = ("capon", "brauer", "beampattern", "if_curve", "scnr_curve",
                "power", "convergence")


class SchemaError(ValueError):
    """Input CSV does not match the schema of the requested figure kind."""


@dataclass
class Curve:
    estimator: str
    metric_kind: str
    x: list[float]
    y: list[float]


def _read_rows(path: str, expected_header: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None:
            raise SchemaError(f"{path}: empty file")
        for col in expected_header:
            if col not in header:
                raise SchemaError(f"{path}: missing column '{col}' "
                                  f"(expected {','.join(expected_header)})")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_curves(path: str, figure_kind: str) -> list[Curve]:
    allowed = CURVE_KINDS[figure_kind]
    rows = _read_rows(path, CURVE_HEADER)
    curves: dict[tuple[str, str], Curve] = {}
    for row in rows:
        kind = row["metric_kind"]
        if kind not in allowed:
            raise SchemaError(f"{path}: metric_kind '{kind}' does not belong to a "
                              f"'{figure_kind}' figure (accepted: {sorted(allowed)})")
        key = (row["estimator"], kind)
        curve = curves.setdefault(key, Curve(row["estimator"], kind, [], []))
        curve.x.append(float(row["abscissa"]))
        curve.y.append(float(row["value_db"]))
    return list(curves.values())


def read_screening(path: str) -> list[dict]:
    rows = _read_rows(path, SCREENING_HEADER)
    return [{"cell_index": int(r["cell_index"]), "center": float(r["center"]),
             "radius": float(r["radius"]), "threshold": float(r["threshold"]),
             "is_clutter": bool(int(r["is_clutter"]))} for r in rows]


def read_capon(path: str):
    rows = _read_rows(path, CAPON_HEADER)
    doppler = sorted({float(r["doppler"]) for r in rows})
    spatial = sorted({float(r["spatial"]) for r in rows})
    index = {(float(r["doppler"]), float(r["spatial"])): float(r["power_db"])
             for r in rows}
    if len(index) != len(doppler) * len(spatial):
        raise SchemaError(f"{path}: grid is not complete "
                          f"({len(index)} points for {len(doppler)}x{len(spatial)})")
    grid = [[index[(fd, fs)] for fs in spatial] for fd in doppler]
    return doppler, spatial, grid


def read_convergence(path: str) -> list[Curve]:
    rows = _read_rows(path, CONVERGENCE_HEADER)
    curves: dict[str, Curve] = {}
    for row in rows:
        curve = curves.setdefault(row["estimator"],
                                  Curve(row["estimator"], "convergence", [], []))
        curve.x.append(float(row["iteration"]))
        curve.y.append(float(row["objective"]))
    return list(curves.values())
