"""Interval regressors with a shared ``predict`` contract.

* ``train_rann``  - bound-input network with a non-crossing penalty
* ``train_imlp``  - center/range network with absolute-valued range weights
* ``train_ccrm``  - OLS on centers, non-negative least squares on half-ranges
* ``train_ikrcr`` - Gaussian-kernel Nadaraya-Watson on centers and half-ranges

Neural models and IKRCR work on standardized inputs; predictions are always
returned in the original units.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import nn
from .errors import BandwidthInvalid, DimensionMismatch, NonFiniteUpdate, RankDeficient, TrainingDiverged
from .interval import IntervalDataset, PredictedIntervals
from .nnls import nnls
from .nn import AdamState, TrainConfig, _ParamBlocks, adam_step, glorot_uniform


def _safe_std(a, axis=0):
    s = np.std(a, axis=axis)
    return np.where(s > 0, s, 1.0)


def _query_bounds(X, p):
    if isinstance(X, IntervalDataset):
        lo, hi = X.X_lower, X.X_upper
    else:
        lo, hi = X
    lo = np.atleast_2d(np.asarray(lo, dtype=float))
    hi = np.atleast_2d(np.asarray(hi, dtype=float))
    if lo.shape != hi.shape:
        raise DimensionMismatch("query lower/upper arrays differ in shape")
    if lo.shape[1] != p:
        raise DimensionMismatch(f"query has {lo.shape[1]} predictors, model was trained on {p}")
    return lo, hi


def _interleave(lo, hi):
    out = np.empty((lo.shape[0], 2 * lo.shape[1]))
    out[:, 0::2] = lo
    out[:, 1::2] = hi
    return out


@dataclass(frozen=True)
class TargetScaler:
    """One affine map applied to both target bounds, so bound order is preserved."""

    mean: float
    scale: float

    @classmethod
    def fit(cls, y_lower, y_upper):
        both = np.concatenate([y_lower, y_upper])
        return cls(float(np.mean(both)), float(_safe_std(both)))

    def transform(self, y):
        return (np.asarray(y) - self.mean) / self.scale

    def inverse(self, y):
        return np.asarray(y) * self.scale + self.mean


@dataclass(frozen=True)
class BoundScaler:
    """Per-column z-score of the interleaved bound inputs plus a shared target map."""

    mean: np.ndarray
    scale: np.ndarray
    target: TargetScaler

    @classmethod
    def fit(cls, train: IntervalDataset):
        B = train.bounds_matrix()
        return cls(B.mean(axis=0), _safe_std(B), TargetScaler.fit(train.y_lower, train.y_upper))

    def inputs(self, lo, hi):
        return (_interleave(lo, hi) - self.mean) / self.scale


@dataclass(frozen=True)
class CenterRangeScaler:
    """Interval-affine standardization: ``x -> (x - m) / s`` applied to whole intervals.

    Centers are z-scored and half-ranges divided by the same ``s``, which keeps
    them non-negative.
    """

    center_mean: np.ndarray
    scale: np.ndarray
    target: TargetScaler

    @classmethod
    def fit(cls, train: IntervalDataset):
        Xc = train.X_center
        return cls(Xc.mean(axis=0), _safe_std(Xc), TargetScaler.fit(train.y_lower, train.y_upper))

    def inputs(self, lo, hi):
        c = 0.5 * (lo + hi)
        r = 0.5 * (hi - lo)
        return (c - self.center_mean) / self.scale, r / self.scale


@dataclass(frozen=True)
class _Fitted:
    config: object = field(default=None, kw_only=True)
    final_loss: float | None = field(default=None, kw_only=True)
    epochs_run: int = field(default=0, kw_only=True)
    n_predictors: int = field(default=0, kw_only=True)

    def predict(self, X) -> PredictedIntervals:
        lo, hi = _query_bounds(X, self.n_predictors)
        return self._predict(lo, hi)


# ---------------------------------------------------------------- RANN


@dataclass(frozen=True)
class RannModel(_Fitted):
    params: nn.RannParams
    scaler: BoundScaler
    kind = "rann"

    def _predict(self, lo, hi):
        tr = nn.forward(self.params, self.scaler.inputs(lo, hi), self.config)
        t = self.scaler.target
        return PredictedIntervals(t.inverse(tr.yL_hat), t.inverse(tr.yU_hat))


def train_rann(train: IntervalDataset, cfg: TrainConfig = TrainConfig()) -> RannModel:
    """Fit the regularized network by full-batch Adam on the penalized squared-error loss."""
    if train.n_samples == 0:
        raise ValueError("empty training set")
    scaler = BoundScaler.fit(train)
    X = scaler.inputs(train.X_lower, train.X_upper)
    yl = scaler.target.transform(train.y_lower)
    yu = scaler.target.transform(train.y_upper)
    params = nn.init_params(train.n_predictors, cfg.hidden_units, cfg.seed)
    try:
        params, _, final = nn.train(params, X, yl, yu, cfg)
    except NonFiniteUpdate as exc:
        raise TrainingDiverged(str(exc)) from exc
    return RannModel(params, scaler, config=cfg, final_loss=final, epochs_run=cfg.epochs,
                     n_predictors=train.n_predictors)


# ---------------------------------------------------------------- iMLP


@dataclass(frozen=True)
class ImlpParams(_ParamBlocks):
    hidden_weights: np.ndarray  # (J, p), shared by center and range paths
    hidden_biases: np.ndarray  # (J,)
    out_weights: np.ndarray  # (J,)
    out_bias: float


def init_imlp_params(p: int, J: int, seed: int) -> ImlpParams:
    rng = np.random.default_rng(seed)
    return ImlpParams(
        glorot_uniform(rng, p, J, (J, p)), np.zeros(J), glorot_uniform(rng, J, 1, J), 0.0
    )


def imlp_forward(params: ImlpParams, Xc, Xr):
    """Center/range propagation; returns ``(yc_hat, yr_hat, cache)``."""
    W = params.hidden_weights
    hc = Xc @ W.T + params.hidden_biases
    hr = Xr @ np.abs(W).T
    a = np.tanh(hc + hr)
    s = np.tanh(hc - hr)
    Hc = 0.5 * (a + s)
    Hr = 0.5 * (a - s)
    yc = Hc @ params.out_weights + params.out_bias
    yr = Hr @ np.abs(params.out_weights)
    return yc, yr, (a, s, Hc, Hr)


def imlp_loss(params: ImlpParams, Xc, Xr, y_lower, y_upper) -> float:
    yc, yr, _ = imlp_forward(params, Xc, Xr)
    return nn.penalized_loss(yc - yr, yc + yr, y_lower, y_upper, 0.0)


def imlp_gradients(params: ImlpParams, Xc, Xr, y_lower, y_upper) -> ImlpParams:
    """Backprop through the bound-reconstructed squared error; ``d|w|/dw = sign(w)``, ``sign(0) = 0``."""
    n = Xc.shape[0]
    yc, yr, (a, s, Hc, Hr) = imlp_forward(params, Xc, Xr)
    dL = ((yc - yr) - y_lower) / n
    dU = ((yc + yr) - y_upper) / n
    dyc = dL + dU
    dyr = dU - dL

    wo = params.out_weights
    g_wo = Hc.T @ dyc + np.sign(wo) * (Hr.T @ dyr)
    g_bo = float(np.sum(dyc))
    dHc = np.outer(dyc, wo)
    dHr = np.outer(dyr, np.abs(wo))
    da = 0.5 * (dHc + dHr) * (1.0 - a * a)
    ds = 0.5 * (dHc - dHr) * (1.0 - s * s)
    dhc = da + ds
    dhr = da - ds
    W = params.hidden_weights
    g_W = dhc.T @ Xc + np.sign(W) * (dhr.T @ Xr)
    g_b = dhc.sum(axis=0)
    return ImlpParams(g_W, g_b, g_wo, g_bo)


@dataclass(frozen=True)
class ImlpModel(_Fitted):
    params: ImlpParams
    scaler: CenterRangeScaler
    kind = "imlp"

    def _predict(self, lo, hi):
        Xc, Xr = self.scaler.inputs(lo, hi)
        yc, yr, _ = imlp_forward(self.params, Xc, Xr)
        t = self.scaler.target
        return PredictedIntervals(t.inverse(yc - yr), t.inverse(yc + yr))


def train_imlp(train: IntervalDataset,
               cfg: TrainConfig = TrainConfig(hidden_activation="tanh", lam=0.0)) -> ImlpModel:
    """Fit the iMLP by full-batch Adam. The hidden activation is always tanh; ``cfg.lam`` is unused."""
    if train.n_samples == 0:
        raise ValueError("empty training set")
    scaler = CenterRangeScaler.fit(train)
    Xc, Xr = scaler.inputs(train.X_lower, train.X_upper)
    yl = scaler.target.transform(train.y_lower)
    yu = scaler.target.transform(train.y_upper)
    params = init_imlp_params(train.n_predictors, cfg.hidden_units, cfg.seed)
    state = AdamState.fresh(params)
    try:
        for _ in range(cfg.epochs):
            g = imlp_gradients(params, Xc, Xr, yl, yu)
            params, state = adam_step(params, g, state, cfg.learning_rate)
    except NonFiniteUpdate as exc:
        raise TrainingDiverged(str(exc)) from exc
    return ImlpModel(params, scaler, config=cfg, final_loss=imlp_loss(params, Xc, Xr, yl, yu),
                     epochs_run=cfg.epochs, n_predictors=train.n_predictors)


# ---------------------------------------------------------------- CCRM


def _design(X):
    return np.column_stack([np.ones(X.shape[0]), X])


@dataclass(frozen=True)
class CcrmModel(_Fitted):
    center_coefs: np.ndarray  # (p + 1,), intercept first
    range_coefs: np.ndarray  # (p + 1,), all >= 0
    kind = "ccrm"

    def _predict(self, lo, hi):
        yc = _design(0.5 * (lo + hi)) @ self.center_coefs
        yr = _design(0.5 * (hi - lo)) @ self.range_coefs
        return PredictedIntervals(yc - yr, yc + yr)


def train_ccrm(train: IntervalDataset) -> CcrmModel:
    """OLS for the centers; NNLS with every coefficient (intercept included) constrained ``>= 0`` for the ranges."""
    n, p = train.n_samples, train.n_predictors
    Ac = _design(train.X_center)
    if n <= p + 1 or np.linalg.matrix_rank(Ac) < p + 1:
        raise RankDeficient(f"center design matrix ({n} x {p + 1}) is not of full column rank")
    beta_c = np.linalg.lstsq(Ac, train.y_center, rcond=None)[0]
    beta_r = nnls(_design(train.X_range), train.y_range)
    return CcrmModel(beta_c, beta_r, n_predictors=p)


# ---------------------------------------------------------------- IKRCR


def kernel_weights(query, points, h: float) -> np.ndarray:
    """Normalized Gaussian kernel weights, shape ``(n_query, n_points)``; rows sum to 1.

    The exponent is shifted by its row maximum before exponentiating, so the
    weights stay defined when every raw kernel value underflows.
    """
    d2 = np.sum((query[:, None, :] - points[None, :, :]) ** 2, axis=2)
    expo = -d2 / (2.0 * h * h)
    expo -= expo.max(axis=1, keepdims=True)
    w = np.exp(expo)
    return w / w.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class IkrcrModel(_Fitted):
    X_center: np.ndarray  # standardized training center vectors
    X_range: np.ndarray  # standardized training range vectors
    y_center: np.ndarray
    y_range: np.ndarray
    center_mean: np.ndarray
    center_scale: np.ndarray
    range_scale: np.ndarray
    bandwidth: float
    kind = "ikrcr"

    def weights(self, lo, hi):
        qc = (0.5 * (lo + hi) - self.center_mean) / self.center_scale
        qr = 0.5 * (hi - lo) / self.range_scale
        return kernel_weights(qc, self.X_center, self.bandwidth), kernel_weights(qr, self.X_range, self.bandwidth)

    def _predict(self, lo, hi):
        wc, wr = self.weights(lo, hi)
        yc = wc @ self.y_center
        yr = wr @ self.y_range
        return PredictedIntervals(yc - yr, yc + yr)


def train_ikrcr(train: IntervalDataset, h: float = 0.1, standardize: bool = True) -> IkrcrModel:
    """Store the training set; center and range views are each scaled to unit variance per column."""
    if not (np.isfinite(h) and h > 0):
        raise BandwidthInvalid(f"bandwidth must be a positive finite number, got {h}")
    if train.n_samples == 0:
        raise ValueError("empty training set")
    Xc, Xr = train.X_center, train.X_range
    p = train.n_predictors
    if standardize:
        c_mean, c_scale, r_scale = Xc.mean(axis=0), _safe_std(Xc), _safe_std(Xr)
    else:
        c_mean, c_scale, r_scale = np.zeros(p), np.ones(p), np.ones(p)
    return IkrcrModel(
        (Xc - c_mean) / c_scale, Xr / r_scale, train.y_center.copy(), train.y_range.copy(),
        c_mean, c_scale, r_scale, float(h), config={"bandwidth": float(h)}, n_predictors=p,
    )


FittedModel = Union[RannModel, ImlpModel, CcrmModel, IkrcrModel]


def predict(model: FittedModel, X) -> PredictedIntervals:
    """Predict intervals for an ``IntervalDataset`` or a ``(X_lower, X_upper)`` pair of arrays."""
    return model.predict(X)
