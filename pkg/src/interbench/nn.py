"""Single-hidden-layer network with two output heads (lower and upper bound).

Everything here is full-batch numpy; rows of ``X`` are the interleaved bound
vectors ``[x1_lo, x1_hi, ..., xp_lo, xp_hi]``.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, EmptyBatch, NonFiniteUpdate

ACTIVATIONS = ("sigmoid", "tanh")


def sigmoid(x):
    # split by sign so exp never overflows
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _activation(name: str) -> tuple[Callable, Callable]:
    """Return ``(g, g')`` where ``g'`` is expressed through the activation output."""
    if name == "sigmoid":
        return sigmoid, lambda z: z * (1.0 - z)
    if name == "tanh":
        return np.tanh, lambda z: 1.0 - z * z
    raise ValueError(f"unknown activation {name!r}")


@dataclass(frozen=True)
class TrainConfig:
    """Network and optimizer settings shared by RANN and iMLP training."""

    hidden_units: int = 5
    lam: float = 1.0
    learning_rate: float = 0.001
    epochs: int = 500
    seed: int = 0
    hidden_activation: str = "sigmoid"
    output_activation: str = "identity"

    def __post_init__(self):
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.lam >= 0:
            raise ValueError("lambda must be >= 0")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.hidden_activation not in ACTIVATIONS:
            raise ValueError(f"hidden_activation must be one of {ACTIVATIONS}")
        if self.output_activation != "identity":
            raise ValueError("only the identity output activation is supported")


class _ParamBlocks:
    """Mixin giving a dataclass of arrays flat-vector and elementwise helpers."""

    def blocks(self):
        return [getattr(self, f.name) for f in fields(self)]

    def map(self, fn, *others):
        kw = {}
        for f in fields(self):
            kw[f.name] = fn(getattr(self, f.name), *(getattr(o, f.name) for o in others))
        return type(self)(**kw)

    def flat(self) -> np.ndarray:
        return np.concatenate([np.ravel(b) for b in self.blocks()])

    def from_flat(self, vec):
        vec = np.asarray(vec, dtype=float)
        kw, pos = {}, 0
        for f in fields(self):
            ref = np.asarray(getattr(self, f.name), dtype=float)
            size = ref.size
            chunk = vec[pos:pos + size]
            kw[f.name] = chunk.reshape(ref.shape) if ref.ndim else float(chunk[0])
            pos += size
        if pos != vec.size:
            raise DimensionMismatch(f"flat vector has {vec.size} entries, expected {pos}")
        return type(self)(**kw)

    def zeros_like(self):
        return self.map(lambda b: np.zeros_like(b) if np.ndim(b) else 0.0)

    def same_shape(self, other) -> bool:
        return type(self) is type(other) and all(
            np.shape(a) == np.shape(b) for a, b in zip(self.blocks(), other.blocks())
        )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(b)) for b in self.blocks())


@dataclass(frozen=True)
class RannParams(_ParamBlocks):
    hidden_weights: np.ndarray  # (J, 2p)
    hidden_biases: np.ndarray  # (J,)
    out_weights_L: np.ndarray  # (J,)
    out_weights_U: np.ndarray  # (J,)
    out_bias_L: float
    out_bias_U: float

    @property
    def n_hidden(self) -> int:
        return self.hidden_weights.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.hidden_weights.shape[1]


# Gradients share the parameter layout.
GradientSet = RannParams


@dataclass(frozen=True)
class ForwardTrace:
    hidden_pre: np.ndarray
    hidden_out: np.ndarray
    yL_hat: np.ndarray
    yU_hat: np.ndarray


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_params(p: int, J: int, seed: int) -> RannParams:
    """Glorot-uniform weights, zero biases.

    The hidden layer maps ``2p`` inputs to ``J`` units and the output layer
    maps ``J`` units to the two bound heads.
    """
    if p < 1 or J < 1:
        raise ValueError("p and J must both be >= 1")
    rng = np.random.default_rng(seed)
    W = glorot_uniform(rng, 2 * p, J, (J, 2 * p))
    out = glorot_uniform(rng, J, 2, (2, J))
    return RannParams(W, np.zeros(J), out[0], out[1], 0.0, 0.0)


def forward(params: RannParams, X, cfg: TrainConfig) -> ForwardTrace:
    """Evaluate the network on one row (shape ``(2p,)``) or a batch (shape ``(N, 2p)``)."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X2 = np.atleast_2d(X)
    if X2.shape[1] != params.n_inputs:
        raise DimensionMismatch(f"input has {X2.shape[1]} columns, network expects {params.n_inputs}")
    g, _ = _activation(cfg.hidden_activation)
    pre = X2 @ params.hidden_weights.T + params.hidden_biases
    z = g(pre)
    yL = z @ params.out_weights_L + params.out_bias_L
    yU = z @ params.out_weights_U + params.out_bias_U
    if single:
        return ForwardTrace(pre[0], z[0], yL[0], yU[0])
    return ForwardTrace(pre, z, yL, yU)


def _check_batch(X, y_lower, y_upper):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y_lower = np.asarray(y_lower, dtype=float).ravel()
    y_upper = np.asarray(y_upper, dtype=float).ravel()
    if X.shape[0] == 0:
        raise EmptyBatch("batch has no rows")
    if not (len(y_lower) == len(y_upper) == X.shape[0]):
        raise DimensionMismatch("targets and inputs disagree on the number of rows")
    return X, y_lower, y_upper


def penalized_loss(yL_hat, yU_hat, y_lower, y_upper, lam: float) -> float:
    n = len(y_lower)
    cross = np.maximum(0.0, yL_hat - yU_hat)
    return float(
        (np.sum((y_lower - yL_hat) ** 2) + np.sum((y_upper - yU_hat) ** 2) + lam * np.sum(cross ** 2))
        / (2 * n)
    )


def loss(params: RannParams, X, y_lower, y_upper, lam: float, cfg: TrainConfig) -> float:
    """Squared error on both bounds plus ``lam/2N * sum(max(0, yL_hat - yU_hat)^2)``."""
    X, y_lower, y_upper = _check_batch(X, y_lower, y_upper)
    tr = forward(params, X, cfg)
    return penalized_loss(tr.yL_hat, tr.yU_hat, y_lower, y_upper, lam)


def gradients(params: RannParams, X, y_lower, y_upper, lam: float, cfg: TrainConfig) -> GradientSet:
    X, y_lower, y_upper = _check_batch(X, y_lower, y_upper)
    n = X.shape[0]
    tr = forward(params, X, cfg)
    _, dg = _activation(cfg.hidden_activation)

    cross = np.maximum(0.0, tr.yL_hat - tr.yU_hat)
    # output activation is the identity, so f' = 1
    dL = (-(y_lower - tr.yL_hat) + lam * cross) / n
    dU = (-(y_upper - tr.yU_hat) - lam * cross) / n

    g_wL = tr.hidden_out.T @ dL
    g_wU = tr.hidden_out.T @ dU
    g_bL = float(np.sum(dL))
    g_bU = float(np.sum(dU))

    dz = np.outer(dL, params.out_weights_L) + np.outer(dU, params.out_weights_U)
    dpre = dz * dg(tr.hidden_out)
    g_W = dpre.T @ X
    g_b = dpre.sum(axis=0)
    return RannParams(g_W, g_b, g_wL, g_wU, g_bL, g_bU)


@dataclass(frozen=True)
class AdamState:
    first_moment: _ParamBlocks
    second_moment: _ParamBlocks
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def fresh(cls, params, **kwargs) -> "AdamState":
        return cls(params.zeros_like(), params.zeros_like(), 0, **kwargs)


def adam_step(params, grads, state: AdamState, lr: float):
    """One bias-corrected Adam update; returns ``(new_params, new_state)``.

    Works on any parameter dataclass built on ``_ParamBlocks`` (RANN or iMLP).
    """
    if not (params.same_shape(grads) and params.same_shape(state.first_moment)
            and params.same_shape(state.second_moment)):
        raise DimensionMismatch("parameter, gradient and moment shapes disagree")
    if state.step < 0:
        raise ValueError("Adam step counter must be >= 0")
    b1, b2, eps = state.beta1, state.beta2, state.epsilon
    t = state.step + 1
    m = state.first_moment.map(lambda m_, g: b1 * m_ + (1 - b1) * g, grads)
    v = state.second_moment.map(lambda v_, g: b2 * v_ + (1 - b2) * g * g, grads)
    bc1 = 1.0 - b1 ** t
    bc2 = 1.0 - b2 ** t

    def update(p_, m_, v_):
        new = p_ - lr * (m_ / bc1) / (np.sqrt(v_ / bc2) + eps)
        return float(new) if np.ndim(new) == 0 else new

    new_params = params.map(update, m, v)
    if not new_params.is_finite():
        raise NonFiniteUpdate(f"non-finite parameter after Adam step {t}")
    return new_params, replace(state, first_moment=m, second_moment=v, step=t)


def numeric_gradient(fn, params, eps: float) -> np.ndarray:
    """Central differences of scalar ``fn(params)`` over every flattened parameter."""
    base = params.flat()
    out = np.empty_like(base)
    for i in range(base.size):
        up = base.copy()
        dn = base.copy()
        up[i] += eps
        dn[i] -= eps
        out[i] = (fn(params.from_flat(up)) - fn(params.from_flat(dn))) / (2 * eps)
    return out


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(1e-12, np.abs(analytic) + np.abs(numeric))
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_gradients(params: RannParams, X, y_lower, y_upper, lam: float, cfg: TrainConfig,
                    eps: float = 1e-5) -> float:
    """Max relative error between ``gradients`` and central finite differences of ``loss``."""
    if not eps > 0:
        raise ValueError("eps must be > 0")
    analytic = gradients(params, X, y_lower, y_upper, lam, cfg).flat()
    numeric = numeric_gradient(lambda q: loss(q, X, y_lower, y_upper, lam, cfg), params, eps)
    return relative_error(analytic, numeric)


def train(params: RannParams, X, y_lower, y_upper, cfg: TrainConfig,
          callback: Callable | None = None) -> tuple[RannParams, AdamState, float]:
    """Full-batch Adam for ``cfg.epochs`` steps; returns params, optimizer state and final loss."""
    state = AdamState.fresh(params)
    for epoch in range(cfg.epochs):
        g = gradients(params, X, y_lower, y_upper, cfg.lam, cfg)
        params, state = adam_step(params, g, state, cfg.learning_rate)
        if callback is not None:
            callback(epoch, params)
    return params, state, loss(params, X, y_lower, y_upper, cfg.lam, cfg)
