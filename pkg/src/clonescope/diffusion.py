"""Cosine-schedule Gaussian sampling chain for hyperparameter search.

The chain perturbs a point in the unit cube step by step; the schedule
weight follows the squared cosine of the elapsed fraction of the total
step count, so the very first step is almost pure noise and the final
step leaves the point unchanged.  The product form of the per-step
retain factors gives a closed-form marginal, so any intermediate step
can be sampled directly from the start point.

Outputs are intentionally not clamped; clamping into valid
hyperparameter ranges happens at denormalisation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DiffusionSchedule:
    """Per-step noise weights for steps t = 1..total_steps.

    ``noise[t-1]`` scales the injected Gaussian at step t,
    ``retain[t-1]`` = 1 - noise scales the carried-over point, and
    ``retain_cum[t-1]`` is the running product of retain factors, which
    is nonincreasing in t.
    """

    total_steps: int
    noise: np.ndarray
    retain: np.ndarray
    retain_cum: np.ndarray

    @classmethod
    def cosine(cls, total_steps: int) -> "DiffusionSchedule":
        if total_steps < 1:
            raise ValueError("total_steps must be at least 1")
        steps = np.arange(1, total_steps + 1, dtype=np.float64)
        noise = np.cos(0.5 * math.pi * steps / total_steps) ** 2
        retain = 1.0 - noise
        return cls(
            total_steps=total_steps,
            noise=noise,
            retain=retain,
            retain_cum=np.cumprod(retain),
        )

    def _check_step(self, t: int) -> None:
        if not 1 <= t <= self.total_steps:
            raise ValueError(f"step {t} outside 1..{self.total_steps}")

    def noise_at(self, t: int) -> float:
        self._check_step(t)
        return float(self.noise[t - 1])

    def retain_at(self, t: int) -> float:
        self._check_step(t)
        return float(self.retain[t - 1])

    def retain_cum_at(self, t: int) -> float:
        self._check_step(t)
        return float(self.retain_cum[t - 1])


def forward_step(
    v_prev: np.ndarray,
    t: int,
    schedule: DiffusionSchedule,
    noise: np.ndarray,
) -> np.ndarray:
    """One step of the chain: scale the point down and add scaled noise."""
    retain = schedule.retain_at(t)
    level = schedule.noise_at(t)
    return math.sqrt(retain) * np.asarray(v_prev) + math.sqrt(level) * np.asarray(noise)


def marginal_sample(
    v0: np.ndarray,
    t: int,
    schedule: DiffusionSchedule,
    noise: np.ndarray,
) -> np.ndarray:
    """Sample step t directly from the start point via the closed-form marginal."""
    retained = schedule.retain_cum_at(t)
    return math.sqrt(retained) * np.asarray(v0) + math.sqrt(1.0 - retained) * np.asarray(noise)
