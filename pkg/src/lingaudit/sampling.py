"""Seeded sampling for pairwise metric estimation.

Each (seed, trial, purpose) triple keys an independent counter-based
random stream, so adding a new metric or running trials in a different
order never perturbs the samples drawn for existing metrics.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class SamplingPlan:
    """How many sentences to sample, how many times, and under which seed."""

    sample_size: int = 1000
    trials: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sample_size < 2:
            raise ValueError("sample_size must be at least 2")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True, slots=True)
class MetricValue:
    """A sampled estimate: mean over pairs, spread over trials."""

    mean: float
    std: float
    trials: int
    sample_size: int
    note: str | None = None


def stream_key(seed: int, trial: int, purpose: str) -> int:
    """Derive a 128-bit Philox key from the (seed, trial, purpose) triple."""
    material = f"lingaudit:{seed}:{trial}:{purpose}".encode("utf-8")
    digest = hashlib.blake2b(material, digest_size=16).digest()
    return int.from_bytes(digest, "little")


def rng_for(seed: int, trial: int, purpose: str) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stream_key(seed, trial, purpose)))


def draw_sample(
    population: int, plan: SamplingPlan, trial: int, purpose: str
) -> np.ndarray:
    """Draw ``min(plan.sample_size, population)`` distinct indices, sorted.

    Uses Floyd's algorithm so the work is proportional to the sample, not
    the population.  ``trial`` must be in ``range(plan.trials)``.
    """
    if population < 1:
        raise ValueError("population must be positive")
    if not (0 <= trial < plan.trials):
        raise ValueError(f"trial {trial} outside range(0, {plan.trials})")
    k = min(plan.sample_size, population)
    if k == population:
        return np.arange(population, dtype=np.int64)
    rng = rng_for(plan.seed, trial, purpose)
    chosen: set[int] = set()
    for j in range(population - k, population):
        candidate = int(rng.integers(0, j + 1))
        chosen.add(j if candidate in chosen else candidate)
    return np.array(sorted(chosen), dtype=np.int64)
