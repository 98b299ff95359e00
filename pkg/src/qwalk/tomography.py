"""Synthetic projective measurements and pure-state reconstruction.

Each collection measures three analyzer settings per site: Z keeps both H
and V outcomes, X keeps the diagonal outcome, Y keeps the right-circular
outcome, giving the per-site count quadruple (nH, nV, nR, nD).  The direct
collection measures the state as is; the shifted collection first moves all
H amplitudes one site back (spin echo) so neighbouring-site relative phases
become locally measurable.  Reconstruction minimises a Gaussian count
likelihood over a pure-state site parametrization by simulated annealing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernel
from .errors import NonConvergence
from .walk import WalkerState

COUNT_FLOOR = 0.5  # expected-count floor applied in likelihood denominators


@dataclass(frozen=True)
class SiteParametrization:
    """Pure-state ansatz: site x carries amplitude p e^{-i phi} times the
    spinor cos(theta/2)|H> + e^{i delta} sin(theta/2)|V>.

    The phase of the first site is gauge (held at 0), and the magnitudes
    satisfy sum p^2 = 1, leaving 4 L - 2 free parameters for L sites.
    """

    offset: int
    p: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        arrays = {}
        for name in ("p", "phi", "theta", "delta"):
            arrays[name] = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=float))
            object.__setattr__(self, name, arrays[name])
        n = len(arrays["p"])
        if any(len(a) != n for a in arrays.values()) or n < 1:
            raise ValueError("parameter arrays must share one length >= 1")
        if abs(float(np.sum(arrays["p"] ** 2)) - 1.0) > 1e-9:
            raise ValueError("site magnitudes must satisfy sum p^2 = 1")
        if abs(arrays["phi"][0]) > 1e-12:
            raise ValueError("the first site phase is gauge and must be 0")

    @property
    def sites(self) -> int:
        return len(self.p)

    @property
    def free_parameter_count(self) -> int:
        return 4 * self.sites - 2

    def to_state(self) -> WalkerState:
        c = self.p * np.exp(-1j * self.phi)
        amps = np.stack(
            [c * np.cos(self.theta / 2), c * np.exp(1j * self.delta) * np.sin(self.theta / 2)],
            axis=1,
        )
        return WalkerState(self.offset, amps)

    @classmethod
    def from_state(cls, state: WalkerState) -> "SiteParametrization":
        a_h, a_v = state.amps[:, 0], state.amps[:, 1]
        p = np.sqrt(np.abs(a_h) ** 2 + np.abs(a_v) ** 2)
        theta = 2 * np.arctan2(np.abs(a_v), np.abs(a_h))
        phi = np.where(p > 0, -np.angle(np.where(a_h != 0, a_h, 1.0)), 0.0)
        # sites with no H amplitude carry their phase on the V component
        only_v = (np.abs(a_h) == 0) & (p > 0)
        phi[only_v] = -np.angle(a_v[only_v])
        delta = np.angle(a_v * np.exp(1j * phi))
        delta = np.where(np.abs(a_v) > 0, np.mod(delta, 2 * np.pi), 0.0)
        gauge = phi[0]
        phi = np.mod(phi - gauge, 2 * np.pi)
        phi[0] = 0.0
        return cls(state.offset, p, phi, theta, delta)


@dataclass(frozen=True)
class CountTable:
    """Per-site nonnegative counts for the outcomes (H, V, R, D).

    Sampled data are integer-valued; noise-free expected-count tables may be
    fractional, so the storage is float.
    """

    offset: int
    counts: np.ndarray  # (L, 4) float64

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.counts, dtype=np.float64))
        if c.ndim != 2 or c.shape[1] != 4:
            raise ValueError("counts must have shape (L, 4)")
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", c)

    def to_json(self) -> dict:
        ints = self.counts.astype(np.int64)
        exact = np.array_equal(ints, self.counts)
        return {
            "offset": int(self.offset),
            "counts": (ints if exact else self.counts).tolist(),
        }


@dataclass(frozen=True)
class CountSet:
    """Direct and spin-echo-shifted count collections with their shot budget.

    The shifted table covers one site fewer than the direct table: its last
    window site has no left neighbour to interfere with.
    """

    direct: CountTable
    shifted: CountTable
    shots: int
    seed: int

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.shifted.offset != self.direct.offset:
            raise ValueError("shifted window must start at the direct window's first site")
        if len(self.shifted.counts) != len(self.direct.counts) - 1:
            raise ValueError("shifted window must cover one site fewer than the direct window")

    @property
    def cells(self) -> int:
        return 4 * len(self.direct.counts) + 4 * len(self.shifted.counts)

    def to_json(self) -> dict:
        return {
            "shots": int(self.shots),
            "seed": int(self.seed),
            "direct": self.direct.to_json(),
            "shifted": self.shifted.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CountSet":
        return cls(
            direct=CountTable(int(obj["direct"]["offset"]), np.asarray(obj["direct"]["counts"])),
            shifted=CountTable(
                int(obj["shifted"]["offset"]), np.asarray(obj["shifted"]["counts"]).reshape(-1, 4)
            ),
            shots=int(obj["shots"]),
            seed=int(obj["seed"]),
        )


@dataclass(frozen=True)
class AnnealConfig:
    """Annealing schedule; t0 = 0 sets the start temperature to L(init)/10."""

    t0: float = 0.0
    alpha: float = 0.995
    iterations: int = 200_000
    restarts: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.t0 < 0:
            raise ValueError("t0 must be >= 0")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.iterations < 1 or self.restarts < 1:
            raise ValueError("iterations and restarts must be positive")


def spin_echo_shift(state: WalkerState) -> WalkerState:
    """Move every H amplitude one site back; V amplitudes stay put."""
    amps = state.amps
    n = len(amps)
    out = np.zeros((n + 1, 2), dtype=complex)
    out[:n, 0] = amps[:, 0]
    out[1:, 1] = amps[:, 1]
    return WalkerState(state.offset - 1, out).trimmed()


def _basis_probs(a_h: np.ndarray, a_v: np.ndarray) -> np.ndarray:
    """Stack of projective probabilities (|H|^2, |V|^2, |<R|.>|^2, |<D|.>|^2)."""
    return np.stack(
        [
            np.abs(a_h) ** 2,
            np.abs(a_v) ** 2,
            np.abs(a_h + 1j * a_v) ** 2 / 2,
            np.abs(a_h + a_v) ** 2 / 2,
        ],
        axis=1,
    )


def _sample_setting(rng: np.random.Generator, probs: np.ndarray, shots: int) -> np.ndarray:
    """Multinomial draw over the given outcome probabilities; the remaining
    probability mass (discarded analyzer port / out-of-window sites) is an
    explicit extra category that is thrown away."""
    flat = probs.reshape(-1)
    rest = max(0.0, 1.0 - float(flat.sum()))
    pvals = np.append(flat, rest)
    draw = rng.multinomial(shots, pvals / pvals.sum())
    return draw[:-1].reshape(probs.shape)


def expected_counts(state: WalkerState, shots: int) -> tuple[np.ndarray, np.ndarray]:
    """Noise-free expected count tables (direct, shifted) for a state."""
    direct = shots * _basis_probs(state.amps[:, 0], state.amps[:, 1])
    shifted = shots * _basis_probs(state.amps[1:, 0], state.amps[:-1, 1])
    return direct, shifted


def simulate_counts(state: WalkerState, shots_per_setting: int, seed: int) -> CountSet:
    """Sample both count collections from a state, deterministically per seed.

    Each of the six analyzer settings (Z, X, Y for each collection) draws one
    multinomial of ``shots_per_setting`` shots over (site, outcome); the X and
    Y settings keep only the D and R outcomes.
    """
    if shots_per_setting < 1:
        raise ValueError("shots_per_setting must be >= 1")
    state = state.trimmed()
    rng = np.random.default_rng(seed)
    n = state.length

    q = _basis_probs(state.amps[:, 0], state.amps[:, 1])
    n_z = _sample_setting(rng, q[:, :2], shots_per_setting)
    n_d = _sample_setting(rng, q[:, 3], shots_per_setting)
    n_r = _sample_setting(rng, q[:, 2], shots_per_setting)
    direct = np.stack([n_z[:, 0], n_z[:, 1], n_r, n_d], axis=1)

    # shifted collection: local spinor at x pairs H(x+1) with V(x)
    qs = _basis_probs(state.amps[1:, 0], state.amps[:-1, 1])
    s_z = _sample_setting(rng, qs[:, :2], shots_per_setting)
    s_d = _sample_setting(rng, qs[:, 3], shots_per_setting)
    s_r = _sample_setting(rng, qs[:, 2], shots_per_setting)
    shifted = np.stack([s_z[:, 0], s_z[:, 1], s_r, s_d], axis=1)

    return CountSet(
        direct=CountTable(state.offset, direct),
        shifted=CountTable(state.offset, shifted.reshape(-1, 4)),
        shots=shots_per_setting,
        seed=seed,
    )


def likelihood(params: SiteParametrization, counts: CountSet) -> float:
    """Gaussian count mismatch  sum [m - n]^2 / (2 max(m, 0.5))  over all cells.

    Model counts m come from the parametrized state (and from its spin-echo
    transform for the shifted collection), scaled by the shot budget; the
    0.5 floor only guards the denominators at empty sites.
    """
    if params.offset != counts.direct.offset or params.sites != len(counts.direct.counts):
        raise ValueError("parametrization window does not match the count window")
    state = params.to_state()
    m_direct, m_shifted = expected_counts(state, counts.shots)

    def gauss(model: np.ndarray, observed: np.ndarray) -> float:
        den = np.maximum(model, COUNT_FLOOR)
        return float(np.sum((model - observed) ** 2 / (2 * den)))

    return gauss(m_direct, counts.direct.counts) + gauss(m_shifted, counts.shifted.counts)


def _initial_guess(counts: CountSet) -> SiteParametrization:
    """Moment-based starting point: magnitudes and spinor angles from the
    direct counts, site phases chained from the shifted interference."""
    shots = counts.shots
    d = counts.direct.counts.astype(float)
    n = len(d)
    tot = d[:, 0] + d[:, 1]
    pop = tot / shots
    p = np.sqrt(pop)
    norm = np.sqrt(np.sum(p**2))
    p = p / norm if norm > 0 else np.full(n, 1 / math.sqrt(n))

    frac_h = np.where(tot > 0, d[:, 0] / np.maximum(tot, 1), 0.5)
    theta = 2 * np.arccos(np.sqrt(np.clip(frac_h, 0.0, 1.0)))
    safe_pop = np.maximum(pop, 1e-12)
    sx = np.where(tot > 0, 2 * d[:, 3] / shots / safe_pop - 1, 0.0)
    sy = np.where(tot > 0, 1 - 2 * d[:, 2] / shots / safe_pop, 0.0)
    delta = np.where(tot > 0, np.mod(np.arctan2(sy, sx), 2 * np.pi), 0.0)

    s = counts.shifted.counts.astype(float)
    phi = np.zeros(n)
    if n > 1:
        tot_s = s[:, 0] + s[:, 1]
        pop_s = np.maximum(tot_s / shots, 1e-12)
        sxs = np.where(tot_s > 0, 2 * s[:, 3] / shots / pop_s - 1, 1.0)
        sys_ = np.where(tot_s > 0, 1 - 2 * s[:, 2] / shots / pop_s, 0.0)
        gamma = np.arctan2(sys_, sxs)
        for i in range(n - 1):
            phi[i + 1] = phi[i] + gamma[i] - delta[i]
        phi = np.mod(phi, 2 * np.pi)
        phi[0] = 0.0
    return SiteParametrization(counts.direct.offset, p, phi, theta, delta)


def reconstruct(
    counts: CountSet, anneal: AnnealConfig | None = None
) -> tuple[WalkerState, float]:
    """Find the pure state minimising the likelihood by Metropolis annealing.

    Runs ``anneal.restarts`` independent chains (the first from the
    moment-based initializer, the rest from jittered copies) with a geometric
    temperature schedule, keeping the lowest likelihood; ties resolve to the
    earlier restart.  Deterministic for a fixed config.

    Raises NonConvergence when even the best fit exceeds five units per
    measured cell, which no statistically plausible pure-state fit does.
    """
    anneal = anneal or AnnealConfig()
    init = _initial_guess(counts)
    direct = counts.direct.counts.astype(np.float64)
    shifted = counts.shifted.counts.astype(np.float64).reshape(-1, 4)
    l_init = likelihood(init, counts)
    t0 = anneal.t0 if anneal.t0 > 0 else l_init / 10

    best = None
    for r in range(anneal.restarts):
        rng = np.random.default_rng([anneal.seed, r])
        if r == 0:
            start = init
        else:
            p = np.abs(init.p + rng.normal(0, 0.05, init.sites))
            p /= np.sqrt(np.sum(p**2))
            start = replace(
                init,
                p=p,
                phi=np.mod(init.phi + np.append(0, rng.normal(0, 0.3, init.sites - 1)), 2 * np.pi),
                theta=init.theta + rng.normal(0, 0.3, init.sites),
                delta=init.delta + rng.normal(0, 0.3, init.sites),
            )
        kernel_seed = int(np.random.SeedSequence([anneal.seed, r]).generate_state(1)[0])
        out = _kernel.anneal_kernel(
            start.p,
            start.phi,
            start.theta,
            start.delta,
            direct,
            shifted,
            float(counts.shots),
            float(t0),
            float(anneal.alpha),
            int(anneal.iterations),
            kernel_seed,
        )
        if best is None or out[-1] < best[-1]:
            best = out

    bp, bphi, bth, bde, l_best = best
    if l_best > 5 * counts.cells:
        raise NonConvergence(
            f"best likelihood {l_best:.1f} exceeds the plausibility bound {5 * counts.cells}"
        )
    c = bp * np.exp(-1j * bphi)
    amps = np.stack([c * np.cos(bth / 2), c * np.exp(1j * bde) * np.sin(bth / 2)], axis=1)
    norm = np.sqrt(np.sum(np.abs(amps) ** 2))
    state = WalkerState(counts.direct.offset, amps / norm)
    return state, float(l_best)
