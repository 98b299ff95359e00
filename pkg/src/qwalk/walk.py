"""Lattice wave-functions, coins, shifts and walk protocols on a 1D line.

A walker state is a two-component complex amplitude field over a contiguous
window of integer sites.  The spin basis is (H, V) with sigma_z |H> = |H>;
the coin rotates the spin, the conditional shifts move H right and V left.
All operations are pure: they return new states and never mutate inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-9

# spin basis kets
KET_H = np.array([1.0, 0.0], dtype=complex)
KET_V = np.array([0.0, 1.0], dtype=complex)
KET_D = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)  # sigma_x = +1
KET_A = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2)
KET_L = np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2)  # sigma_y = +1
KET_R = np.array([1.0, -1.0j], dtype=complex) / math.sqrt(2)  # sigma_y = -1

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


class Frame(enum.Enum):
    """Choice of where the Floquet period starts for the split-step walk."""

    STANDARD = "standard"
    PRIME = "prime"
    DOUBLE_PRIME = "dprime"


def _wrap_angle(theta: float) -> float:
    """Wrap into (-pi, pi]."""
    t = math.fmod(theta + math.pi, 2 * math.pi)
    if t <= 0:
        t += 2 * math.pi
    return t - math.pi


@dataclass(frozen=True)
class CoinAngles:
    """The two rotation angles of the split-step protocol, in radians."""

    theta1: float
    theta2: float

    def __post_init__(self):
        for name in ("theta1", "theta2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, _wrap_angle(float(v)))

    @classmethod
    def from_degrees(cls, theta1: float, theta2: float) -> "CoinAngles":
        return cls(math.radians(theta1), math.radians(theta2))


@dataclass(frozen=True)
class Protocol:
    """Walk protocol: one coin + symmetric shift, or a split-step frame."""

    kind: str  # "simple" | "split_step"
    frame: Frame | None = None
    coin: np.ndarray | None = None

    @classmethod
    def simple(cls, coin: np.ndarray) -> "Protocol":
        coin = np.asarray(coin, dtype=complex)
        if coin.shape != (2, 2):
            raise ValueError("coin must be a 2x2 matrix")
        if not np.allclose(coin @ coin.conj().T, np.eye(2), atol=1e-12):
            raise ValueError("coin must be unitary")
        return cls(kind="simple", coin=coin)

    @classmethod
    def split_step(cls, frame: Frame = Frame.STANDARD) -> "Protocol":
        return cls(kind="split_step", frame=frame)

    @classmethod
    def hadamard(cls) -> "Protocol":
        return cls.simple(hadamard_coin())


@dataclass(frozen=True)
class WalkerState:
    """Normalized two-component amplitudes over a contiguous site window.

    ``amps[i]`` holds the (H, V) amplitude pair of site ``offset + i``.
    """

    offset: int
    amps: np.ndarray  # (L, 2) complex

    def __post_init__(self):
        amps = np.ascontiguousarray(np.asarray(self.amps, dtype=complex))
        if amps.ndim != 2 or amps.shape[1] != 2 or amps.shape[0] < 1:
            raise ValueError("amps must have shape (L, 2) with L >= 1")
        object.__setattr__(self, "amps", amps)
        n = self.norm()
        if abs(n - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {n!r} deviates from 1 beyond {NORM_TOL}")

    @classmethod
    def delta(cls, spinor: np.ndarray, site: int = 0) -> "WalkerState":
        """Walker localized on one site with the given normalized spinor."""
        return cls(offset=site, amps=np.asarray(spinor, dtype=complex).reshape(1, 2))

    @property
    def length(self) -> int:
        return self.amps.shape[0]

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.length)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def trimmed(self) -> "WalkerState":
        """Drop exactly-zero rows at both window edges (keeps at least one site)."""
        nz = np.nonzero(np.any(self.amps != 0, axis=1))[0]
        if len(nz) == 0:
            return self
        lo, hi = int(nz[0]), int(nz[-1]) + 1
        return WalkerState(self.offset + lo, self.amps[lo:hi])

    def to_json(self) -> dict:
        return {
            "offset": int(self.offset),
            "amps": [
                [float(a[0].real), float(a[0].imag), float(a[1].real), float(a[1].imag)]
                for a in self.amps
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WalkerState":
        rows = np.asarray(obj["amps"], dtype=float)
        amps = rows[:, 0] + 1j * rows[:, 1], rows[:, 2] + 1j * rows[:, 3]
        return cls(offset=int(obj["offset"]), amps=np.stack(amps, axis=1))


def coin_matrix(theta: float) -> np.ndarray:
    """Spin rotation exp(-i theta sigma_y) = [[cos, -sin], [sin, cos]]."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def hadamard_coin() -> np.ndarray:
    """The balanced coin (1/sqrt2) [[1, 1], [1, -1]]."""
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2)


def apply_shift(state: WalkerState, direction: str) -> WalkerState:
    """Spin-conditioned translation.

    ``plus`` moves every H amplitude one site right; ``minus`` moves every V
    amplitude one site left.  The unaffected component stays put and the
    window grows by one site where needed.
    """
    amps = state.amps
    L = amps.shape[0]
    out = np.zeros((L + 1, 2), dtype=complex)
    if direction == "plus":
        out[1:, 0] = amps[:, 0]
        out[:L, 1] = amps[:, 1]
        offset = state.offset
    elif direction == "minus":
        out[:L, 1] = amps[:, 1]
        out[1:, 0] = amps[:, 0]
        offset = state.offset - 1
    else:
        raise ValueError(f"direction must be 'plus' or 'minus', got {direction!r}")
    return WalkerState(offset, out).trimmed()


def _apply_coin(state: WalkerState, coin: np.ndarray) -> WalkerState:
    return WalkerState(state.offset, state.amps @ coin.T)


def evolve_step(state: WalkerState, protocol: Protocol, angles: CoinAngles) -> WalkerState:
    """One walk period, applying the protocol's operator sequence right-to-left."""
    if protocol.kind == "simple":
        s = _apply_coin(state, protocol.coin)
        s = apply_shift(s, "plus")
        return apply_shift(s, "minus")
    t1, t2 = angles.theta1, angles.theta2
    frame = protocol.frame
    if frame is Frame.STANDARD:
        seq = [coin_matrix(t1), "plus", coin_matrix(t2), "minus"]
    elif frame is Frame.PRIME:
        half = coin_matrix(t1 / 2)
        seq = [half, "plus", coin_matrix(t2), "minus", half]
    elif frame is Frame.DOUBLE_PRIME:
        half = coin_matrix(t2 / 2)
        seq = [half, "minus", coin_matrix(t1), "plus", half]
    else:
        raise ValueError(f"unknown frame {frame!r}")
    s = state
    for op in seq:
        s = apply_shift(s, op) if isinstance(op, str) else _apply_coin(s, op)
    return s


def evolve(state: WalkerState, protocol: Protocol, angles: CoinAngles, t: int) -> WalkerState:
    """Apply ``t`` walk periods; ``t = 0`` returns the input unchanged."""
    if t < 0:
        raise ValueError("step count must be non-negative")
    s = state
    for _ in range(t):
        s = evolve_step(s, protocol, angles)
    return s


def position_distribution(state: WalkerState) -> dict[int, float]:
    """Site -> probability map P(x) = |aH(x)|^2 + |aV(x)|^2."""
    p = np.sum(np.abs(state.amps) ** 2, axis=1)
    return {int(x): float(v) for x, v in zip(state.sites, p)}


def normalized_moment(dist: dict[int, float], t: int, order: int) -> float:
    """Ballistically normalized moment  sum_x x^m P(x) / t^m  for m in {1, 2}."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    total = sum((x**order) * p for x, p in dist.items())
    return total / t**order


def analytic_moments(angles: CoinAngles, psi0: np.ndarray) -> tuple[float, float]:
    """Closed-form long-time normalized moments (M1, M2).

    Evaluates the half-angle closed forms: both carry the common factor
    1 - max(|sin(theta1/2)|, |sin(theta2/2)|); M1 additionally weights the
    initial spinor by <psi0| sigma_x + tan(theta1/2) sigma_z |psi0>.  The
    tan(theta1/2) pole makes |theta1| = pi invalid input.

    These forms agree with long-time simulation on the |tan(theta1/2)| = 1
    family under the half-angle reading of the rotation angles; see the
    moment-consistency tests for the validation protocol.
    """
    t1, t2 = angles.theta1, angles.theta2
    if abs(abs(t1) - math.pi) < 1e-12:
        raise ValueError("theta1 = +/-pi is a pole of tan(theta1/2)")
    psi0 = np.asarray(psi0, dtype=complex)
    tan_half = math.tan(t1 / 2)
    bracket = 1.0 - max(abs(math.sin(t1 / 2)), abs(math.sin(t2 / 2)))
    op = SIGMA_X + tan_half * SIGMA_Z
    w = float(np.real(np.conj(psi0) @ (op @ psi0)))
    m2 = tan_half**2 * bracket
    m1 = tan_half * bracket * w
    return m1, m2


def similarity(p_exp: dict[int, float], p_th: dict[int, float]) -> float:
    """Classical overlap S = [sum_x sqrt(P_th P_exp)]^2 of two distributions."""
    for name, p in (("p_exp", p_exp), ("p_th", p_th)):
        vals = np.array(list(p.values()), dtype=float)
        if np.any(vals < 0):
            raise ValueError(f"{name} has negative entries")
        if abs(vals.sum() - 1.0) > 1e-6:
            raise ValueError(f"{name} is not normalized: sum = {vals.sum()!r}")
    s = 0.0
    for x in set(p_exp) | set(p_th):
        s += math.sqrt(p_exp.get(x, 0.0) * p_th.get(x, 0.0))
    return min(s * s, 1.0)


def state_fidelity(state_a: WalkerState, state_b: WalkerState) -> float:
    """Squared overlap |<a|b>|^2, global-phase invariant, windows aligned by site."""
    lo = min(state_a.offset, state_b.offset)
    hi = max(state_a.offset + state_a.length, state_b.offset + state_b.length)
    a = np.zeros((hi - lo, 2), dtype=complex)
    b = np.zeros_like(a)
    a[state_a.offset - lo : state_a.offset - lo + state_a.length] = state_a.amps
    b[state_b.offset - lo : state_b.offset - lo + state_b.length] = state_b.amps
    return min(float(abs(np.sum(np.conj(a) * b)) ** 2), 1.0)
