"""Interval prediction scores: bound RMSEs, mean Hausdorff distance, coverage rate.

``truth`` and ``pred`` arguments are anything with ``.lower``/``.upper`` arrays
(``IntervalArray``, ``PredictedIntervals``) or a ``(lower, upper)`` pair.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .errors import LengthMismatch
from .interval import Interval

log = logging.getLogger(__name__)

METRIC_NAMES = ("mhd", "rmse_l", "rmse_u", "cr")


def _bounds(obj):
    if hasattr(obj, "lower") and hasattr(obj, "upper"):
        lo, hi = obj.lower, obj.upper
    else:
        lo, hi = obj
    return np.asarray(lo, dtype=float).ravel(), np.asarray(hi, dtype=float).ravel()


def _pair(truth, pred):
    tl, tu = _bounds(truth)
    pl, pu = _bounds(pred)
    if len(tl) != len(pl):
        raise LengthMismatch(f"{len(tl)} truths vs {len(pl)} predictions")
    if len(tl) == 0:
        raise LengthMismatch("no samples to score")
    return tl, tu, pl, pu


def rmse_bounds(truth, pred) -> tuple[float, float]:
    tl, tu, pl, pu = _pair(truth, pred)
    return float(np.sqrt(np.mean((tl - pl) ** 2))), float(np.sqrt(np.mean((tu - pu) ** 2)))


def hausdorff_interval(a: Interval, b: Interval) -> float:
    """Hausdorff distance between two closed intervals.

    For nonempty closed intervals the sup-inf definition reduces to the
    larger of the two endpoint gaps.
    """
    return max(abs(a.lower - b.lower), abs(a.upper - b.upper))


def hausdorff_distances(truth, pred) -> np.ndarray:
    """Per-sample distances; crossed predictions are read as the interval their bounds span."""
    tl, tu, pl, pu = _pair(truth, pred)
    lo = np.minimum(pl, pu)
    hi = np.maximum(pl, pu)
    return np.maximum(np.abs(tl - lo), np.abs(tu - hi))


def mhd(truth, pred) -> float:
    return float(np.mean(hausdorff_distances(truth, pred)))


def overlap_ratios(truth, pred) -> np.ndarray:
    """``width(truth & pred) / width(truth)`` per sample; NaN where the truth is degenerate."""
    tl, tu, pl, pu = _pair(truth, pred)
    width = tu - tl
    overlap = np.maximum(0.0, np.minimum(tu, pu) - np.maximum(tl, pl))
    overlap[pl > pu] = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(width > 0, overlap / np.where(width > 0, width, 1.0), np.nan)


def coverage_rate(truth, pred) -> float:
    """Mean overlap ratio over samples whose true interval has positive width.

    Returns NaN if every true interval is degenerate.
    """
    ratios = overlap_ratios(truth, pred)
    valid = ~np.isnan(ratios)
    skipped = int(np.count_nonzero(~valid))
    if skipped:
        log.warning("coverage rate: %d zero-width true interval(s) excluded", skipped)
    if not valid.any():
        return float("nan")
    return float(np.mean(ratios[valid]))


@dataclass(frozen=True)
class MetricsReport:
    mhd: float
    rmse_l: float
    rmse_u: float
    cr: float
    n: int
    crossed_count: int
    zero_width_truth: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(truth, pred) -> MetricsReport:
    tl, tu, pl, pu = _pair(truth, pred)
    rl, ru = rmse_bounds((tl, tu), (pl, pu))
    return MetricsReport(
        mhd=mhd((tl, tu), (pl, pu)),
        rmse_l=rl,
        rmse_u=ru,
        cr=coverage_rate((tl, tu), (pl, pu)),
        n=len(tl),
        crossed_count=int(np.count_nonzero(pl > pu)),
        zero_width_truth=int(np.count_nonzero(tu - tl <= 0)),
    )
