"""Deterministic file writers for the CLI and tests.

Floats are written with shortest round-trip formatting, so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

from .disorder import DisorderResult
from .momentum import BandPoint
from .recover import AxisField
from .topology import PhaseCell


def _f(x: float) -> str:
    return repr(float(x))


def write_distribution_csv(path: str | Path, dist: dict[int, float]) -> None:
    """Site/probability rows, skipping sites with exactly zero probability."""
    lines = ["site,probability"]
    for site in sorted(dist):
        if dist[site] != 0.0:
            lines.append(f"{site},{_f(dist[site])}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_band_csv(path: str | Path, points: list[BandPoint]) -> None:
    lines = ["k,E,nx,ny,nz"]
    for bp in points:
        lines.append(
            f"{_f(bp.k)},{_f(bp.energy)},{_f(bp.axis[0])},{_f(bp.axis[1])},{_f(bp.axis[2])}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_axis_csv(path: str | Path, field: AxisField) -> None:
    lines = ["k,nx,ny,nz,flag"]
    for k, axis, flag in zip(field.k, field.axes, field.flags):
        lines.append(f"{_f(k)},{_f(axis[0])},{_f(axis[1])},{_f(axis[2])},{flag}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_phase_csv(path: str | Path, cells: list[PhaseCell]) -> None:
    lines = ["theta1_deg,theta2_deg,nu_prime,nu_dprime,two_nu0,two_nupi,flags"]
    for c in cells:
        vals = [c.nu_prime, c.nu_double_prime, c.two_nu0, c.two_nu_pi]
        field = ",".join("" if v is None else str(v) for v in vals)
        lines.append(f"{_f(c.theta1_deg)},{_f(c.theta2_deg)},{field},{c.flag}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_disorder_csv(path: str | Path, result: DisorderResult) -> None:
    cfg = result.config
    import math

    lines = [
        "delta_deg,T,samples,readable_fraction,modal_winding,mean_divergence_rad",
        ",".join(
            [
                _f(math.degrees(cfg.delta_theta1)),
                str(cfg.steps),
                str(cfg.samples),
                _f(result.readable_fraction),
                "" if result.modal_winding is None else str(result.modal_winding),
                _f(result.mean_divergence),
            ]
        ),
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path: str | Path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
