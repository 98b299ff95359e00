"""Dynamic-disorder Monte Carlo: per-step coin-angle noise and its effect on
eigenvector recovery and winding readout."""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import QwalkError
from .momentum import chiral_axis
from .recover import AxisField, recover_axes
from .topology import winding_number
from .walk import CoinAngles, Frame


@dataclass(frozen=True)
class DisorderConfig:
    """Ensemble description: the first rotation angle is redrawn every step
    uniformly within +/- delta_theta1 of its mean; the second stays fixed.

    ``kpoints`` is the recovery grid; None selects steps + 1 momenta, the
    resolution a walk of that depth can support experimentally.
    """

    mean_angles: CoinAngles
    delta_theta1: float
    frame: Frame
    steps: int
    samples: int
    seed: int
    kpoints: int | None = None

    def __post_init__(self):
        if self.delta_theta1 < 0:
            raise ValueError("delta_theta1 must be >= 0")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        lo = self.mean_angles.theta1 - self.delta_theta1
        hi = self.mean_angles.theta1 + self.delta_theta1
        if lo <= -math.pi or hi > math.pi:
            raise ValueError("theta1 +/- delta_theta1 must stay within (-pi, pi]")


def sample_angle_sequence(config: DisorderConfig, sample_index: int = 0) -> np.ndarray:
    """The per-step theta1 draws of one ensemble member.

    Streams derive from (seed, sample_index), so members are reproducible in
    any execution order.
    """
    rng = np.random.default_rng([config.seed, sample_index])
    return config.mean_angles.theta1 + config.delta_theta1 * rng.uniform(-1, 1, config.steps)


@dataclass(frozen=True)
class DisorderResult:
    """Per-sample recovery outcomes plus ensemble summary metrics.

    ``windings[i]`` is None when sample i was unreadable; ``failures[i]``
    then names the error class.  ``mean_divergence`` averages, over samples
    and momenta, the angle between each recovered axis and the clean chiral
    plane.
    """

    config: DisorderConfig
    axis_fields: tuple[AxisField | None, ...]
    windings: tuple[int | None, ...]
    failures: tuple[str | None, ...]
    mean_divergence: float
    readable_fraction: float
    modal_winding: int | None


def _thread_budget() -> int:
    raw = os.environ.get("QWALK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def disorder_ensemble(config: DisorderConfig) -> DisorderResult:
    """Recover axes and windings for every ensemble member.

    Per-sample recovery or winding errors are recorded, never raised; the
    readable fraction counts samples whose winding reads as a clean integer.
    """
    clean_axis = chiral_axis(config.frame, config.mean_angles)
    kpoints = config.kpoints if config.kpoints is not None else config.steps + 1

    def one(i: int):
        seq = sample_angle_sequence(config, i)
        try:
            field = recover_axes(
                config.frame,
                config.mean_angles,
                config.steps,
                kpoints=kpoints,
                theta1_sequence=seq,
            )
        except QwalkError as err:
            return None, None, type(err).__name__
        try:
            w = winding_number(field.axes, clean_axis)
        except QwalkError as err:
            return field, None, type(err).__name__
        return field, w, None

    workers = min(_thread_budget(), config.samples)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, range(config.samples)))
    else:
        outcomes = [one(i) for i in range(config.samples)]

    fields = tuple(o[0] for o in outcomes)
    windings = tuple(o[1] for o in outcomes)
    failures = tuple(o[2] for o in outcomes)

    divergences = [
        float(np.mean(np.abs(np.arcsin(np.clip(f.axes @ clean_axis, -1.0, 1.0)))))
        for f in fields
        if f is not None
    ]
    readable = [w for w in windings if w is not None]
    modal = None
    if readable:
        top = Counter(readable).most_common()
        best_count = top[0][1]
        modal = min(w for w, c in top if c == best_count)
    return DisorderResult(
        config=config,
        axis_fields=fields,
        windings=windings,
        failures=failures,
        mean_divergence=float(np.mean(divergences)) if divergences else float("nan"),
        readable_fraction=len(readable) / config.samples,
        modal_winding=modal,
    )
