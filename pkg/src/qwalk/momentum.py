"""Quasi-momentum representation: transforms, band structure and Bloch geometry.

Forward transform convention: phi(k) = sum_x exp(-i k x) psi(x), so the
H-moving shift acquires the phase diag(exp(-ik), 1) and the V-moving shift
diag(1, exp(+ik)).  The quasienergy branch is E in [0, pi] (principal arccos);
the rotation axis n(k) follows from U(k) = cos E - i sin E (n . sigma).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Collinear, GapClosure
from .walk import CoinAngles, Frame, WalkerState, coin_matrix

GAP_TOL = 1e-8
_CHIRAL_PROBES = (0.7, 2.1)


@dataclass(frozen=True)
class MomentumState:
    """Per-k normalized spinors with weights on a uniform grid over [-pi, pi)."""

    k: np.ndarray  # (M,)
    spinors: np.ndarray  # (M, 2) unit spinors
    weights: np.ndarray  # (M,), sums to 1 for a normalized source state


@dataclass(frozen=True)
class BandPoint:
    """Quasienergy and unit rotation axis of the walk operator at one momentum."""

    k: float
    energy: float
    axis: np.ndarray  # (3,)


def momentum_grid(points: int) -> np.ndarray:
    """Uniform quasi-momentum grid of the given size over [-pi, pi)."""
    if points < 1:
        raise ValueError("grid size must be >= 1")
    return -np.pi + 2 * np.pi * np.arange(points) / points


def momentum_spinors(state: WalkerState, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sample phi(k) = sum_x e^{-ikx} psi(x) at arbitrary momenta.

    Returns (spinors, weights): unit spinors and |phi(k)|^2 / len(ks).
    Unlike :func:`to_momentum` this places no invertibility requirement on
    the number of samples.
    """
    ks = np.asarray(ks, dtype=float)
    phases = np.exp(-1j * np.outer(ks, state.sites))
    phi = phases @ state.amps  # (M, 2)
    mag = np.linalg.norm(phi, axis=1)
    spinors = np.where(mag[:, None] > 0, phi / np.where(mag == 0, 1, mag)[:, None],
                       np.array([1.0, 0.0], dtype=complex))
    weights = mag**2 / len(ks)
    return spinors, weights


def to_momentum(state: WalkerState, points: int) -> MomentumState:
    """Discrete Fourier transform of each spin component onto a uniform grid.

    Requires ``points >= state.length`` so that :func:`from_momentum` recovers
    the state exactly (zero padding beyond the support).
    """
    if points < state.length:
        raise ValueError(f"grid size {points} is smaller than state support {state.length}")
    ks = momentum_grid(points)
    spinors, weights = momentum_spinors(state, ks)
    return MomentumState(k=ks, spinors=spinors, weights=weights)


def from_momentum(mstate: MomentumState, offset: int, length: int) -> WalkerState:
    """Invert :func:`to_momentum` onto the window [offset, offset + length)."""
    M = len(mstate.k)
    if length > M:
        raise ValueError("window longer than the momentum grid")
    phi = mstate.spinors * np.sqrt(mstate.weights * M)[:, None]
    x = np.arange(offset, offset + length)
    phases = np.exp(1j * np.outer(x, mstate.k))
    amps = phases @ phi / M
    return WalkerState(offset, amps)


def _rotations(angles: CoinAngles) -> dict[str, np.ndarray]:
    return {
        "r1": coin_matrix(angles.theta1),
        "r2": coin_matrix(angles.theta2),
        "h1": coin_matrix(angles.theta1 / 2),
        "h2": coin_matrix(angles.theta2 / 2),
    }


def walk_unitaries(frame: Frame, angles: CoinAngles, ks: np.ndarray) -> np.ndarray:
    """The frame's 2x2 walk operator at each momentum, shape (M, 2, 2)."""
    ks = np.asarray(ks, dtype=float)
    M = len(ks)
    tp = np.zeros((M, 2, 2), dtype=complex)
    tm = np.zeros((M, 2, 2), dtype=complex)
    tp[:, 0, 0] = np.exp(-1j * ks)
    tp[:, 1, 1] = 1.0
    tm[:, 0, 0] = 1.0
    tm[:, 1, 1] = np.exp(1j * ks)
    r = _rotations(angles)
    if frame is Frame.STANDARD:
        return tm @ r["r2"] @ tp @ r["r1"]
    if frame is Frame.PRIME:
        return r["h1"] @ tm @ r["r2"] @ tp @ r["h1"]
    if frame is Frame.DOUBLE_PRIME:
        return r["h2"] @ tp @ r["r1"] @ tm @ r["h2"]
    raise ValueError(f"unknown frame {frame!r}")


def walk_unitary_k(frame: Frame, angles: CoinAngles, k: float) -> np.ndarray:
    """The frame's 2x2 walk operator at one momentum."""
    return walk_unitaries(frame, angles, np.array([k]))[0]


def band_axes(frame: Frame, angles: CoinAngles, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Quasienergies E(k) in [0, pi] and unit axes n(k) over a momentum array.

    Raises GapClosure if |sin E| < GAP_TOL anywhere on the array (axis
    extraction is numerically undefined there, including flat bands).
    """
    U = walk_unitaries(frame, angles, ks)
    cos_e = np.clip(np.real(U[:, 0, 0] + U[:, 1, 1]) / 2, -1.0, 1.0)
    energy = np.arccos(cos_e)
    sin_e = np.sin(energy)
    bad = np.abs(sin_e) < GAP_TOL
    if np.any(bad):
        k_bad = float(np.asarray(ks)[np.argmax(bad)])
        raise GapClosure(f"gap closed at k = {k_bad:.6f} (|sin E| < {GAP_TOL})")
    m = 1j * (U - cos_e[:, None, None] * np.eye(2)) / sin_e[:, None, None]
    axes = np.stack([np.real(m[:, 0, 1]), -np.imag(m[:, 0, 1]), np.real(m[:, 0, 0])], axis=1)
    axes /= np.linalg.norm(axes, axis=1)[:, None]
    return energy, axes


def band_point(frame: Frame, angles: CoinAngles, k: float) -> BandPoint:
    """Band data at one momentum, on the E >= 0 branch."""
    energy, axes = band_axes(frame, angles, np.array([k]))
    return BandPoint(k=float(k), energy=float(energy[0]), axis=axes[0])


def band_structure(frame: Frame, angles: CoinAngles, points: int = 201) -> list[BandPoint]:
    """Band data over a uniform grid of the given size."""
    ks = momentum_grid(points)
    energy, axes = band_axes(frame, angles, ks)
    return [BandPoint(float(k), float(e), a) for k, e, a in zip(ks, energy, axes)]


def _orient_axis(axis: np.ndarray) -> np.ndarray:
    """Fix the overall sign: x-component >= 0, ties broken by y then z."""
    for c in axis:
        if c > 1e-12:
            return axis
        if c < -1e-12:
            return -axis
    return axis


def chiral_axis(frame: Frame, angles: CoinAngles, sweep_points: int = 201) -> np.ndarray:
    """Unit normal of the plane containing every rotation axis n(k).

    Computed as the normalized cross product of the axes at two generic probe
    momenta, then verified against the whole grid: |n(k) . axis| < 1e-8 must
    hold everywhere.  In the shifted frames this is the x axis; in the
    standard frame it depends on theta1.
    """
    na = band_point(frame, angles, _CHIRAL_PROBES[0]).axis
    nb = band_point(frame, angles, _CHIRAL_PROBES[1]).axis
    raw = np.cross(na, nb)
    mag = np.linalg.norm(raw)
    if mag < 1e-10:
        raise Collinear(f"probe axes nearly parallel (|cross| = {mag:.2e})")
    axis = _orient_axis(raw / mag)
    _, axes = band_axes(frame, angles, momentum_grid(sweep_points))
    worst = float(np.max(np.abs(axes @ axis)))
    if worst >= 1e-8:
        raise RuntimeError(f"axis field is not planar: max |n(k).axis| = {worst:.2e}")
    return axis


def bloch_vector(spinor: np.ndarray) -> np.ndarray:
    """Pauli expectation (<sx>, <sy>, <sz>) of a normalized spinor."""
    s = np.asarray(spinor, dtype=complex).reshape(2)
    n = float(np.real(np.conj(s) @ s))
    if n < 1e-12:
        raise ValueError("zero spinor has no Bloch vector")
    a, b = s
    return np.array(
        [
            2 * np.real(np.conj(a) * b) / n,
            2 * np.imag(np.conj(a) * b) / n,
            (abs(a) ** 2 - abs(b) ** 2) / n,
        ]
    )
