"""Interval-valued regression benchmarks: a regularized two-head network and classical baselines."""

from .interval import (
    CenterRange,
    Interval,
    IntervalArray,
    IntervalDataset,
    PredictedInterval,
    PredictedIntervals,
    SplitSpec,
    from_center_range,
    load_csv,
    make_interval,
    save_csv,
    split,
    to_center_range,
)
from .metrics import MetricsReport, coverage_rate, evaluate, hausdorff_interval, mhd, rmse_bounds
from .models import predict, train_ccrm, train_ikrcr, train_imlp, train_rann
from .nn import TrainConfig
from .nnls import nnls
from .simgen import gen_scenario1, gen_scenario2

__version__ = "0.1.0"
