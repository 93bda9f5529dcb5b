"""Randomized finite-difference checks of the analytic network gradients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nn
from .nn import TrainConfig

LAMBDAS = (0.0, 1.0, 10.0)
CROSSING_MODES = ("none", "mixed", "all")
# keep every row at least this far from the yL_hat == yU_hat kink
KINK_MARGIN = 1e-3


@dataclass(frozen=True)
class GradCheckCase:
    p: int
    hidden_units: int
    n_rows: int
    lam: float
    crossing: str
    crossed_rows: int
    max_rel_error: float


def random_params(rng, p, J):
    return nn.RannParams(
        rng.normal(0.0, 1.0, (J, 2 * p)), rng.normal(0.0, 0.5, J),
        rng.normal(0.0, 1.0, J), rng.normal(0.0, 1.0, J), 0.0, 0.0,
    )


def engineer_crossing(params, X, cfg, mode):
    """Shift the lower-head bias so that no, about half, or all rows are crossed.

    Returns ``None`` when some row would sit within ``KINK_MARGIN`` of the kink.
    """
    tr = nn.forward(params, X, cfg)
    gap = np.sort(tr.yL_hat - tr.yU_hat)
    if mode == "none":
        shift = -gap[-1] - 0.5
    elif mode == "all":
        shift = -gap[0] + 0.5
    else:
        k = len(gap) // 2
        if gap[k] - gap[k - 1] < 2 * KINK_MARGIN:
            return None
        shift = -0.5 * (gap[k - 1] + gap[k])
    shifted = nn.RannParams(params.hidden_weights, params.hidden_biases, params.out_weights_L,
                            params.out_weights_U, params.out_bias_L + shift, params.out_bias_U)
    final_gap = nn.forward(shifted, X, cfg)
    if np.min(np.abs(final_gap.yL_hat - final_gap.yU_hat)) < KINK_MARGIN:
        return None
    return shifted


def run_suite(n_cases: int = 27, seed: int = 0, eps: float = 1e-5) -> list[GradCheckCase]:
    """Check ``n_cases`` random networks, cycling through every penalty weight and crossing mode."""
    rng = np.random.default_rng(seed)
    cases = []
    i = 0
    while len(cases) < n_cases:
        lam = LAMBDAS[i % len(LAMBDAS)]
        mode = CROSSING_MODES[(i // len(LAMBDAS)) % len(CROSSING_MODES)]
        p = int(rng.integers(1, 4))
        J = int(rng.integers(2, 6))
        n = int(rng.integers(4, 9))
        cfg = TrainConfig(hidden_units=J, lam=lam)
        X = rng.normal(0.0, 1.0, (n, 2 * p))
        y_lo = rng.normal(0.0, 1.0, n)
        y_hi = y_lo + rng.uniform(0.0, 2.0, n)
        params = engineer_crossing(random_params(rng, p, J), X, cfg, mode)
        if params is None:
            continue
        tr = nn.forward(params, X, cfg)
        err = nn.check_gradients(params, X, y_lo, y_hi, lam, cfg, eps)
        cases.append(GradCheckCase(p, J, n, lam, mode, int(np.sum(tr.yL_hat > tr.yU_hat)), err))
        i += 1
    return cases
