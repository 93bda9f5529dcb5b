"""Synthetic interval datasets: a linear one-predictor design and a nonlinear two-predictor design.

Normal noise ``N(mean, var)`` is parameterised by variance. Random numbers come
from numpy's PCG64 generator (``default_rng(seed)``); normals use numpy's
ziggurat sampler, so datasets are reproducible for a given numpy release.
Half-ranges that come out non-positive have only their noise term redrawn.
"""
from __future__ import annotations

import numpy as np

from .interval import IntervalDataset

MIN_SAMPLES = 10


def _check_n(n):
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n}")


def _positive_with_noise(rng, base, draw):
    """Return ``base + noise`` with the noise redrawn wherever the sum is not positive."""
    noise = draw(base.shape)
    bad = base + noise <= 0
    while bad.any():
        noise[bad] = draw(int(bad.sum()))
        bad = base + noise <= 0
    return base + noise


def gen_scenario1(n: int = 300, seed: int = 0) -> IntervalDataset:
    """One predictor with a linear center relation and linear half-ranges."""
    _check_n(n)
    rng = np.random.default_rng(seed)
    sd = np.sqrt(1.5)
    x_c = rng.normal(0.0, np.sqrt(3.0), n)
    y_c = 4.0 + x_c + rng.normal(0.0, sd, n)
    x_r = _positive_with_noise(rng, 2.0 - 0.1 * x_c, lambda size: rng.normal(0.0, sd, size))
    y_r = _positive_with_noise(rng, 1.0 + 0.1 * y_c, lambda size: rng.normal(0.0, sd, size))
    return IntervalDataset.from_center_range(
        x_c[:, None], x_r[:, None], y_c, y_r, predictor_names=["x1"], target_name="y"
    )


def gen_scenario2(n: int = 300, seed: int = 0) -> IntervalDataset:
    """Two predictors; exponential and quadratic relations for both center and half-range."""
    _check_n(n)
    rng = np.random.default_rng(seed)
    x1_c = rng.uniform(-1.0, 1.0, n)
    x2_c = rng.uniform(1.0, 3.0, n)
    x1_r = rng.uniform(0.5, 1.0, n)
    x2_r = rng.uniform(1.0, 1.5, n)
    y_c = 5.0 * np.exp(-x1_c ** 2) + x2_c ** 2 + rng.normal(0.0, 1.0, n)
    y_r = _positive_with_noise(
        rng, np.exp(-2.0 * x1_r ** 2) + 0.5 * x2_r ** 2,
        lambda size: rng.normal(0.0, np.sqrt(0.2), size),
    )
    return IntervalDataset.from_center_range(
        np.column_stack([x1_c, x2_c]), np.column_stack([x1_r, x2_r]), y_c, y_r,
        predictor_names=["x1", "x2"], target_name="y",
    )


SCENARIOS = {1: gen_scenario1, 2: gen_scenario2}


def generate(scenario: int, n: int = 300, seed: int = 0) -> IntervalDataset:
    try:
        gen = SCENARIOS[int(scenario)]
    except (KeyError, ValueError):
        raise ValueError(f"unknown scenario {scenario!r}; expected 1 or 2") from None
    return gen(n, seed)
