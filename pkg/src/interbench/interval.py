"""Interval types, the center/half-range transform, CSV ingestion and splitting.

Bounds are stored column-wise as float arrays; the scalar ``Interval`` type is
used at API edges and for validation messages.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateSplit, InvalidInterval, MissingTarget, ParseError

LOWER_SUFFIX = "_lo"
UPPER_SUFFIX = "_hi"


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise InvalidInterval(f"non-finite bound in [{self.lower}, {self.upper}]")
        if self.lower > self.upper:
            raise InvalidInterval(f"lower {self.lower} > upper {self.upper}")

    @property
    def center(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def half_range(self) -> float:
        return 0.5 * (self.upper - self.lower)


class CenterRange(NamedTuple):
    center: float
    half_range: float


class PredictedInterval(NamedTuple):
    """A model output; unlike ``Interval`` the bounds may be out of order."""

    lower_hat: float
    upper_hat: float

    @property
    def crossed(self) -> bool:
        return self.lower_hat > self.upper_hat


def make_interval(lower: float, upper: float) -> Interval:
    return Interval(float(lower), float(upper))


def to_center_range(interval: Interval) -> CenterRange:
    return CenterRange(interval.center, interval.half_range)


def from_center_range(center: float, half_range: float) -> Interval:
    if not half_range >= 0:
        raise InvalidInterval(f"negative half-range {half_range}")
    return Interval(center - half_range, center + half_range)


@dataclass(frozen=True)
class IntervalArray:
    """A vector of intervals held as two aligned bound arrays."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=float))
        if self.lower.shape != self.upper.shape:
            raise ValueError("lower and upper bound arrays differ in shape")

    def __len__(self):
        return len(self.lower)

    def __iter__(self) -> Iterator[Interval]:
        for lo, hi in zip(self.lower, self.upper):
            yield Interval(float(lo), float(hi))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def half_range(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower)

    @classmethod
    def from_center_range(cls, center, half_range) -> "IntervalArray":
        center = np.asarray(center, dtype=float)
        half_range = np.asarray(half_range, dtype=float)
        return cls(center - half_range, center + half_range)


@dataclass(frozen=True)
class PredictedIntervals(IntervalArray):
    """Model predictions; bounds are allowed to cross."""

    @property
    def crossed(self) -> np.ndarray:
        return self.lower > self.upper

    @property
    def crossed_count(self) -> int:
        return int(np.count_nonzero(self.crossed))

    def __iter__(self) -> Iterator[PredictedInterval]:  # type: ignore[override]
        for lo, hi in zip(self.lower, self.upper):
            yield PredictedInterval(float(lo), float(hi))


def _check_bounds(lower: np.ndarray, upper: np.ndarray, what: str) -> None:
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        bad = np.argwhere(~(np.isfinite(lower) & np.isfinite(upper)))[0]
        raise InvalidInterval(f"non-finite bound in {what}", row=int(bad[0]))
    if np.any(lower > upper):
        bad = np.argwhere(lower > upper)[0]
        raise InvalidInterval(f"{what}: lower > upper", row=int(bad[0]))


@dataclass(frozen=True)
class IntervalDataset:
    """``n`` samples of ``p`` interval predictors and one interval target.

    Parameters
    ----------
    X_lower, X_upper : ndarray of shape (n, p)
        Predictor bounds.
    y_lower, y_upper : ndarray of shape (n,)
        Target bounds.
    predictor_names : list of str
        One label per predictor column.
    target_name : str
    """

    X_lower: np.ndarray
    X_upper: np.ndarray
    y_lower: np.ndarray
    y_upper: np.ndarray
    predictor_names: Sequence[str] = field(default=())
    target_name: str = "y"

    def __post_init__(self):
        X_lower = np.atleast_2d(np.asarray(self.X_lower, dtype=float))
        X_upper = np.atleast_2d(np.asarray(self.X_upper, dtype=float))
        y_lower = np.asarray(self.y_lower, dtype=float).ravel()
        y_upper = np.asarray(self.y_upper, dtype=float).ravel()
        if X_lower.shape != X_upper.shape:
            raise ValueError("X_lower and X_upper differ in shape")
        if y_lower.shape != y_upper.shape or len(y_lower) != X_lower.shape[0]:
            raise ValueError("target length does not match the number of rows")
        _check_bounds(X_lower, X_upper, "predictors")
        _check_bounds(y_lower, y_upper, "target")
        names = list(self.predictor_names) or [f"x{j + 1}" for j in range(X_lower.shape[1])]
        if len(names) != X_lower.shape[1]:
            raise ValueError("predictor_names length does not match p")
        for arr in (X_lower, X_upper, y_lower, y_upper):
            arr.setflags(write=False)
        object.__setattr__(self, "X_lower", X_lower)
        object.__setattr__(self, "X_upper", X_upper)
        object.__setattr__(self, "y_lower", y_lower)
        object.__setattr__(self, "y_upper", y_upper)
        object.__setattr__(self, "predictor_names", tuple(names))

    @classmethod
    def from_center_range(cls, X_center, X_range, y_center, y_range, **kwargs) -> "IntervalDataset":
        X_center = np.atleast_2d(np.asarray(X_center, dtype=float))
        X_range = np.atleast_2d(np.asarray(X_range, dtype=float))
        y_center = np.asarray(y_center, dtype=float)
        y_range = np.asarray(y_range, dtype=float)
        if np.any(X_range < 0) or np.any(y_range < 0):
            raise InvalidInterval("negative half-range")
        return cls(X_center - X_range, X_center + X_range, y_center - y_range, y_center + y_range, **kwargs)

    @property
    def n_samples(self) -> int:
        return self.X_lower.shape[0]

    @property
    def n_predictors(self) -> int:
        return self.X_lower.shape[1]

    def __len__(self):
        return self.n_samples

    @property
    def y(self) -> IntervalArray:
        return IntervalArray(self.y_lower, self.y_upper)

    def X(self, i: int, j: int) -> Interval:
        return Interval(float(self.X_lower[i, j]), float(self.X_upper[i, j]))

    @property
    def X_center(self) -> np.ndarray:
        return 0.5 * (self.X_lower + self.X_upper)

    @property
    def X_range(self) -> np.ndarray:
        return 0.5 * (self.X_upper - self.X_lower)

    @property
    def y_center(self) -> np.ndarray:
        return 0.5 * (self.y_lower + self.y_upper)

    @property
    def y_range(self) -> np.ndarray:
        return 0.5 * (self.y_upper - self.y_lower)

    def bounds_matrix(self) -> np.ndarray:
        """Interleaved ``[x1_lo, x1_hi, x2_lo, x2_hi, ...]`` rows, shape (n, 2p)."""
        out = np.empty((self.n_samples, 2 * self.n_predictors))
        out[:, 0::2] = self.X_lower
        out[:, 1::2] = self.X_upper
        return out

    def subset(self, rows) -> "IntervalDataset":
        rows = np.asarray(rows, dtype=int)
        return IntervalDataset(
            self.X_lower[rows], self.X_upper[rows], self.y_lower[rows], self.y_upper[rows],
            predictor_names=self.predictor_names, target_name=self.target_name,
        )

    def equals(self, other: "IntervalDataset") -> bool:
        return (
            self.predictor_names == other.predictor_names
            and self.target_name == other.target_name
            and np.array_equal(self.X_lower, other.X_lower)
            and np.array_equal(self.X_upper, other.X_upper)
            and np.array_equal(self.y_lower, other.y_lower)
            and np.array_equal(self.y_upper, other.y_upper)
        )


def _parse_float(text: str, row: int, column: str) -> float:
    if text is None or text.strip() == "":
        raise ParseError(f"row {row}: missing value in column {column!r}")
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"row {row}: malformed number {text!r} in column {column!r}") from None
    if not math.isfinite(value):
        raise InvalidInterval(f"non-finite value in column {column!r}", row=row)
    return value


def load_csv(path, target_column: str) -> IntervalDataset:
    """Read an interval dataset stored as ``<name>_lo,<name>_hi`` column pairs.

    Row indices in error messages count data rows from 0 (the header is not a row).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: empty file, no header row") from None
        records = [r for r in reader if r]

    names: list[str] = []
    for col in header:
        if col.endswith(LOWER_SUFFIX):
            base = col[: -len(LOWER_SUFFIX)]
        elif col.endswith(UPPER_SUFFIX):
            base = col[: -len(UPPER_SUFFIX)]
        else:
            raise ParseError(f"column {col!r} is not a {LOWER_SUFFIX}/{UPPER_SUFFIX} bound column")
        if base not in names:
            names.append(base)
    index = {col: i for i, col in enumerate(header)}
    if len(index) != len(header):
        raise ParseError("duplicate column names in header")
    for base in names:
        for col in (base + LOWER_SUFFIX, base + UPPER_SUFFIX):
            if col not in index:
                raise ParseError(f"interval {base!r} lacks its pair column {col!r}")
    if target_column not in names:
        raise MissingTarget(f"target {target_column!r} not among intervals {names}")
    predictors = [b for b in names if b != target_column]

    n = len(records)
    p = len(predictors)
    X_lower = np.empty((n, p))
    X_upper = np.empty((n, p))
    y_lower = np.empty(n)
    y_upper = np.empty(n)
    for i, rec in enumerate(records):
        if len(rec) != len(header):
            raise ParseError(f"row {i}: expected {len(header)} fields, got {len(rec)}")

        def get(col):
            return _parse_float(rec[index[col]], i, col)

        for j, base in enumerate(predictors):
            lo, hi = get(base + LOWER_SUFFIX), get(base + UPPER_SUFFIX)
            if lo > hi:
                raise InvalidInterval(f"{base}: lower {lo} > upper {hi}", row=i)
            X_lower[i, j], X_upper[i, j] = lo, hi
        lo, hi = get(target_column + LOWER_SUFFIX), get(target_column + UPPER_SUFFIX)
        if lo > hi:
            raise InvalidInterval(f"{target_column}: lower {lo} > upper {hi}", row=i)
        y_lower[i], y_upper[i] = lo, hi

    return IntervalDataset(X_lower, X_upper, y_lower, y_upper,
                           predictor_names=predictors, target_name=target_column)


def save_csv(dataset: IntervalDataset, path) -> None:
    """Write ``dataset`` in the pair-column schema; floats use ``repr`` so a reload is exact."""
    header = []
    for name in dataset.predictor_names:
        header += [name + LOWER_SUFFIX, name + UPPER_SUFFIX]
    header += [dataset.target_name + LOWER_SUFFIX, dataset.target_name + UPPER_SUFFIX]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(dataset.n_samples):
            row = []
            for j in range(dataset.n_predictors):
                row += [repr(float(dataset.X_lower[i, j])), repr(float(dataset.X_upper[i, j]))]
            row += [repr(float(dataset.y_lower[i])), repr(float(dataset.y_upper[i]))]
            writer.writerow(row)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    mode: str = "random"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise DegenerateSplit(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if self.mode not in ("random", "sequential"):
            raise ValueError(f"unknown split mode {self.mode!r}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def split_indices(n: int, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    n_train = int(round(spec.train_fraction * n))
    if n_train < 1 or n_train > n - 1:
        raise DegenerateSplit(f"{n} rows at fraction {spec.train_fraction} leaves an empty side")
    if spec.mode == "sequential":
        order = np.arange(n)
    else:
        order = np.random.default_rng(spec.seed).permutation(n)
    return np.sort(order[:n_train]), np.sort(order[n_train:])


def split(dataset: IntervalDataset, spec: SplitSpec) -> tuple[IntervalDataset, IntervalDataset]:
    """Train/test split; random mode is a seeded permutation, sequential takes the leading rows."""
    train_rows, test_rows = split_indices(dataset.n_samples, spec)
    return dataset.subset(train_rows), dataset.subset(test_rows)
