"""Winding numbers from ordered axis samples, frame invariants and phase scans."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GapClosure, NonInteger, ProjectionDegenerate
from .momentum import band_axes, chiral_axis, momentum_grid
from .walk import CoinAngles, Frame

PROJECTION_FLOOR = 0.05
INCREMENT_CAP = math.pi / 2
INTEGER_TOL = 0.05
MIN_SAMPLES = 8


@dataclass(frozen=True)
class InvariantReport:
    """Windings of both shifted frames and their Floquet combination.

    ``nu0 = (nu' + nu'')/2`` and ``nu_pi = (nu' - nu'')/2`` are exact
    rationals with denominator at most 2; ``parity_mismatch`` flags the
    half-integer case where the two windings differ in parity.
    """

    nu_prime: int
    nu_double_prime: int
    nu0: Fraction
    nu_pi: Fraction
    parity_mismatch: bool

    @classmethod
    def from_windings(cls, nu_prime: int, nu_double_prime: int) -> "InvariantReport":
        return cls(
            nu_prime=nu_prime,
            nu_double_prime=nu_double_prime,
            nu0=Fraction(nu_prime + nu_double_prime, 2),
            nu_pi=Fraction(nu_prime - nu_double_prime, 2),
            parity_mismatch=(nu_prime - nu_double_prime) % 2 != 0,
        )


def _plane_basis(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right-handed orthonormal pair (e1, e2) with e1 x e2 = axis."""
    ref = np.array([0.0, 0.0, 1.0]) if abs(axis[2]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(ref, axis)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(axis, e1)


def winding_number(axes: np.ndarray, chiral: np.ndarray) -> int:
    """Signed revolutions of the axis samples about the chiral axis.

    The samples are treated as one period of a closed loop over [-pi, pi):
    each axis is projected onto the plane perpendicular to ``chiral`` and the
    wrapped angle increments are accumulated around the full loop, including
    the leg from the last sample back to the first.

    Raises ProjectionDegenerate when a projection falls below 0.05 and
    NonInteger when an increment reaches pi/2 or the loop total strays from
    an integer number of turns.
    """
    axes = np.asarray(axes, dtype=float)
    if axes.ndim != 2 or axes.shape[1] != 3 or axes.shape[0] < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} axis samples of dimension 3")
    e1, e2 = _plane_basis(np.asarray(chiral, dtype=float))
    u, v = axes @ e1, axes @ e2
    r = np.hypot(u, v)
    if np.min(r) < PROJECTION_FLOOR:
        j = int(np.argmin(r))
        raise ProjectionDegenerate(
            f"sample {j} lies within {PROJECTION_FLOOR} of the chiral axis (|proj| = {r[j]:.4f})"
        )
    ang = np.arctan2(v, u)
    inc = np.diff(np.append(ang, ang[0]))
    inc = (inc + np.pi) % (2 * np.pi) - np.pi
    worst = float(np.max(np.abs(inc)))
    if worst >= INCREMENT_CAP:
        raise NonInteger(f"angle increment {worst:.3f} rad reaches the pi/2 cap")
    turns = float(np.sum(inc)) / (2 * np.pi)
    w = round(turns)
    if abs(turns - w) >= INTEGER_TOL:
        raise NonInteger(f"accumulated winding {turns:.4f} is not close to an integer")
    return int(w)


def nu_prime_closed_form(angles: CoinAngles) -> int | None:
    """Closed-form first-frame winding: sign(theta1) inside the non-trivial
    region sin^2(theta1) > sin^2(theta2), 0 outside, None on the boundary."""
    gap = math.sin(angles.theta1) ** 2 - math.sin(angles.theta2) ** 2
    if abs(gap) < 1e-12:
        return None
    if gap < 0:
        return 0
    return 1 if angles.theta1 > 0 else -1


def frame_winding(frame: Frame, angles: CoinAngles, points: int = 401) -> int:
    """Winding of the analytic axis field of one frame about its chiral axis."""
    _, axes = band_axes(frame, angles, momentum_grid(points))
    return winding_number(axes, chiral_axis(frame, angles))


def analytic_invariants(angles: CoinAngles, points: int = 401) -> InvariantReport:
    """Windings of both shifted frames from analytic axis fields."""
    nu_p = frame_winding(Frame.PRIME, angles, points)
    nu_pp = frame_winding(Frame.DOUBLE_PRIME, angles, points)
    return InvariantReport.from_windings(nu_p, nu_pp)


@dataclass(frozen=True)
class PhaseCell:
    """One phase-diagram cell; invariant fields are None on marked cells."""

    theta1_deg: float
    theta2_deg: float
    nu_prime: int | None
    nu_double_prime: int | None
    two_nu0: int | None
    two_nu_pi: int | None
    flag: str  # "ok" | "boundary" | "gap"


def _boundary_distance_deg(theta1_deg: float, theta2_deg: float) -> float:
    """Angular distance (degrees) to the nearest gap-closing line
    theta1 = +/-theta2 (mod 180)."""
    d = []
    for combo in (theta1_deg - theta2_deg, theta1_deg + theta2_deg):
        m = math.fmod(abs(combo), 180.0)
        d.append(min(m, 180.0 - m))
    return min(d)


def phase_scan(
    theta1_deg: np.ndarray, theta2_deg: np.ndarray, points: int = 401, margin_deg: float = 0.5
) -> list[PhaseCell]:
    """Invariant table over a rectangular grid of rotation angles (degrees).

    Cells closer than ``margin_deg`` to a gap-closing line are marked
    ``boundary``; cells where the numerical bands close anyway are marked
    ``gap``.  Both are reported, never errors.
    """
    rows = []
    for t1 in np.asarray(theta1_deg, dtype=float):
        for t2 in np.asarray(theta2_deg, dtype=float):
            if _boundary_distance_deg(t1, t2) < margin_deg:
                rows.append(PhaseCell(t1, t2, None, None, None, None, "boundary"))
                continue
            try:
                report = analytic_invariants(CoinAngles.from_degrees(t1, t2), points)
            except GapClosure:
                rows.append(PhaseCell(t1, t2, None, None, None, None, "gap"))
                continue
            rows.append(
                PhaseCell(
                    t1,
                    t2,
                    report.nu_prime,
                    report.nu_double_prime,
                    int(2 * report.nu0),
                    int(2 * report.nu_pi),
                    "ok",
                )
            )
    return rows


def midpoint_grid_deg(cells: int) -> np.ndarray:
    """Cell-centred angle grid over (-180, 180) degrees."""
    edges = np.linspace(-180.0, 180.0, cells + 1)
    return (edges[:-1] + edges[1:]) / 2
