"""Dynamics-based eigenvector recovery.

For each quasi-momentum the spinor trajectory of a localized walker is
confined to a circle perpendicular to the band rotation axis, so the plane
through three trajectory points (steps 0, 1 and T) recovers the axis up to
sign; a continuity pass then orients the whole field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Collinear, FlatBand
from .momentum import bloch_vector, chiral_axis, momentum_grid, momentum_spinors
from .topology import winding_number
from .walk import CoinAngles, Frame, Protocol, WalkerState, evolve_step

COLLINEAR_TOL = 1e-6
STATIONARY_TOL = 1e-6
FALLBACK_STEPS = (-1, -2)  # relative to T, then absolute 3, 2


def plane_normal(s0: np.ndarray, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """Unit normal of the circle through three Bloch points, sign unspecified.

    Raises Collinear when |(s1 - s0) x (s2 - s0)| < 1e-6.
    """
    raw = np.cross(np.asarray(s1) - np.asarray(s0), np.asarray(s2) - np.asarray(s0))
    mag = np.linalg.norm(raw)
    if mag < COLLINEAR_TOL:
        raise Collinear(f"trajectory points are collinear (|cross| = {mag:.2e})")
    return raw / mag


def chiral_spinor(frame: Frame, angles: CoinAngles) -> np.ndarray:
    """Spinor whose Bloch vector points along the frame's chiral axis.

    Every band axis is perpendicular to it, so trajectories started here are
    great circles: the best-conditioned choice for plane recovery.
    """
    ax, ay, az = chiral_axis(frame, angles)
    theta = math.acos(max(-1.0, min(1.0, az)))
    phi = math.atan2(ay, ax)
    return np.array([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * phi)], dtype=complex)


@dataclass(frozen=True)
class AxisField:
    """Oriented axis samples over a momentum grid, with per-k provenance."""

    k: np.ndarray  # (M,)
    axes: np.ndarray  # (M, 3)
    flags: tuple[str, ...]  # "ok" | "interpolated"
    frame: Frame
    angles: CoinAngles
    t_steps: int


def _orient_first(axis: np.ndarray) -> np.ndarray:
    """Sign convention at the first grid point: z >= 0, ties broken by x then y."""
    for c in (axis[2], axis[0], axis[1]):
        if c > 1e-12:
            return axis
        if c < -1e-12:
            return -axis
    return axis


def _slerp(a: np.ndarray, b: np.ndarray, f: float) -> np.ndarray:
    omega = math.acos(max(-1.0, min(1.0, float(np.dot(a, b)))))
    if omega < 1e-9:
        v = (1 - f) * a + f * b
    else:
        v = (math.sin((1 - f) * omega) * a + math.sin(f * omega) * b) / math.sin(omega)
    return v / np.linalg.norm(v)


def recover_axes(
    frame: Frame,
    angles: CoinAngles,
    t_steps: int,
    kpoints: int | None = None,
    initial: np.ndarray | None = None,
    theta1_sequence: np.ndarray | None = None,
) -> AxisField:
    """Recover the oriented axis field from walks of 0, 1 and ``t_steps`` periods.

    ``kpoints`` defaults to the walk's natural support 2 T + 1.  ``initial``
    defaults to the frame's chiral-axis spinor.  ``theta1_sequence`` replaces
    the first rotation angle step by step (dynamic disorder); length T.

    Momenta whose step-T point resonates with the earlier points fall back to
    T' in {T-1, T-2, 3, 2}; if every candidate fails, the axis is filled by
    spherical interpolation from the nearest recovered neighbours and flagged
    ``interpolated``.  A stationary 1-step point (gap closure, or an initial
    spinor equal to a band eigenvector) raises Collinear outright; a flat
    band raises FlatBand.
    """
    if t_steps < 2:
        raise ValueError("t_steps must be >= 2")
    if abs(math.cos(angles.theta1) * math.cos(angles.theta2)) < 1e-12:
        raise FlatBand(
            "energy band is flat (a rotation angle is at +/-pi/2): dynamics resolve no axes"
        )
    if theta1_sequence is not None and len(theta1_sequence) != t_steps:
        raise ValueError("theta1_sequence must have one entry per step")

    if initial is None:
        initial = chiral_spinor(frame, angles)
    ks = momentum_grid(kpoints if kpoints is not None else 2 * t_steps + 1)
    M = len(ks)

    protocol = Protocol.split_step(frame)
    states: list[WalkerState] = [WalkerState.delta(initial)]
    for j in range(t_steps):
        step_angles = (
            angles
            if theta1_sequence is None
            else CoinAngles(float(theta1_sequence[j]), angles.theta2)
        )
        states.append(evolve_step(states[-1], protocol, step_angles))

    bloch = {}

    def bloch_at(t: int) -> np.ndarray:
        if t not in bloch:
            spinors, _ = momentum_spinors(states[t], ks)
            bloch[t] = np.array([bloch_vector(s) for s in spinors])
        return bloch[t]

    s0, s1 = bloch_at(0), bloch_at(1)
    candidates = [t_steps] + [t_steps + d for d in FALLBACK_STEPS] + [3, 2]
    candidates = [t for t in dict.fromkeys(candidates) if 2 <= t <= t_steps]

    axes = np.zeros((M, 3))
    ok = np.zeros(M, dtype=bool)
    for j in range(M):
        if np.linalg.norm(s1[j] - s0[j]) < STATIONARY_TOL:
            raise Collinear(
                f"1-step trajectory is stationary at k = {ks[j]:.6f}: "
                "gap closure or eigenstate initial spinor"
            )
        for t in candidates:
            try:
                axes[j] = plane_normal(s0[j], s1[j], bloch_at(t)[j])
            except Collinear:
                continue
            ok[j] = True
            break

    if not np.any(ok):
        raise Collinear("no momentum produced a usable trajectory plane")

    # orient the recovered points: fix the first, then continue by maximal overlap
    order = np.nonzero(ok)[0]
    axes[order[0]] = _orient_first(axes[order[0]])
    for prev, cur in zip(order[:-1], order[1:]):
        if np.dot(axes[cur], axes[prev]) < 0:
            axes[cur] = -axes[cur]

    # fill failed momenta from oriented neighbours (circular grid)
    flags = ["ok" if o else "interpolated" for o in ok]
    for j in np.nonzero(~ok)[0]:
        lo = j
        while not ok[lo % M]:
            lo -= 1
        hi = j
        while not ok[hi % M]:
            hi += 1
        f = (j - lo) / (hi - lo)
        axes[j] = _slerp(axes[lo % M], axes[hi % M], f)

    return AxisField(
        k=ks, axes=axes, flags=tuple(flags), frame=frame, angles=angles, t_steps=t_steps
    )


def recovered_winding(
    frame: Frame,
    angles: CoinAngles,
    t_steps: int,
    kpoints: int | None = None,
    initial: np.ndarray | None = None,
    theta1_sequence: np.ndarray | None = None,
) -> int:
    """Winding of the dynamics-recovered axis field about the frame's chiral axis."""
    field = recover_axes(frame, angles, t_steps, kpoints, initial, theta1_sequence)
    return winding_number(field.axes, chiral_axis(frame, angles))
