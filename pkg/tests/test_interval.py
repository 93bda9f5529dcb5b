import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from interbench.errors import DegenerateSplit, InvalidInterval, MissingTarget, ParseError
from interbench.interval import (
    Interval,
    IntervalDataset,
    PredictedInterval,
    SplitSpec,
    from_center_range,
    load_csv,
    make_interval,
    save_csv,
    split,
    to_center_range,
)


def test_make_interval():
    assert make_interval(0, 1) == Interval(0.0, 1.0)
    assert make_interval(2, 2) == Interval(2.0, 2.0)
    with pytest.raises(InvalidInterval):
        make_interval(1, 0)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_make_interval_rejects_non_finite(bad):
    with pytest.raises(InvalidInterval):
        make_interval(bad, 1.0)
    with pytest.raises(InvalidInterval):
        make_interval(0.0, bad)


@pytest.mark.parametrize(
    "lo, hi, center, half_range",
    [(0, 2, 1, 1), (5, 5, 5, 0), (-3, 1, -1, 2)],
)
def test_to_center_range(lo, hi, center, half_range):
    assert to_center_range(make_interval(lo, hi)) == (center, half_range)


def test_from_center_range():
    assert from_center_range(1, 1) == Interval(0, 2)
    assert from_center_range(5, 0) == Interval(5, 5)
    with pytest.raises(InvalidInterval):
        from_center_range(0, -0.1)


# 1e-12 absolute is only representable while a few ulps stay below it
moderate = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)


@given(moderate, moderate)
def test_center_range_round_trip(a, b):
    iv = make_interval(min(a, b), max(a, b))
    back = from_center_range(*to_center_range(iv))
    assert abs(back.lower - iv.lower) <= 1e-12
    assert abs(back.upper - iv.upper) <= 1e-12


def test_predicted_interval_crossed_flag():
    assert PredictedInterval(1.0, 0.0).crossed
    assert not PredictedInterval(0.0, 1.0).crossed
    assert not PredictedInterval(1.0, 1.0).crossed


def test_dataset_rejects_bad_cells():
    with pytest.raises(InvalidInterval):
        IntervalDataset([[0.0]], [[1.0]], [2.0], [1.0])
    with pytest.raises(InvalidInterval):
        IntervalDataset([[2.0]], [[1.0]], [0.0], [1.0])


def test_dataset_views():
    d = IntervalDataset([[0.0, 1.0]], [[2.0, 5.0]], [-1.0], [3.0])
    assert d.n_samples == 1 and d.n_predictors == 2
    np.testing.assert_array_equal(d.X_center, [[1.0, 3.0]])
    np.testing.assert_array_equal(d.X_range, [[1.0, 2.0]])
    np.testing.assert_array_equal(d.bounds_matrix(), [[0.0, 2.0, 1.0, 5.0]])
    assert d.X(0, 1) == Interval(1.0, 5.0)
    assert list(d.y) == [Interval(-1.0, 3.0)]


def _write(tmp_path, text):
    path = tmp_path / "data.csv"
    path.write_text(text)
    return path


def test_load_csv_basic(tmp_path):
    path = _write(tmp_path, "x1_lo,x1_hi,y_lo,y_hi\n0,1,2,3\n1,2,3,4\n-1,0.5,0,0\n")
    d = load_csv(path, "y")
    assert (d.n_samples, d.n_predictors) == (3, 1)
    assert d.predictor_names == ("x1",)
    np.testing.assert_array_equal(d.y_lower, [2, 3, 0])


def test_load_csv_ordering_violation_reports_row(tmp_path):
    path = _write(tmp_path, "x1_lo,x1_hi,y_lo,y_hi\n0,1,2,3\n0,1,5,3\n")
    with pytest.raises(InvalidInterval) as exc:
        load_csv(path, "y")
    assert exc.value.row == 1


def test_load_csv_missing_pair_member(tmp_path):
    path = _write(tmp_path, "x1_lo,y_lo,y_hi\n0,2,3\n")
    with pytest.raises(ParseError, match="x1_hi"):
        load_csv(path, "y")


@pytest.mark.parametrize("row", ["0,abc,2,3", "0,,2,3", "0,1,2"])
def test_load_csv_malformed(tmp_path, row):
    path = _write(tmp_path, f"x1_lo,x1_hi,y_lo,y_hi\n{row}\n")
    with pytest.raises(ParseError):
        load_csv(path, "y")


def test_load_csv_missing_target(tmp_path):
    path = _write(tmp_path, "x1_lo,x1_hi,y_lo,y_hi\n0,1,2,3\n")
    with pytest.raises(MissingTarget):
        load_csv(path, "z")


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    c = rng.normal(size=(20, 3))
    r = rng.uniform(0, 2, size=(20, 3))
    d = IntervalDataset.from_center_range(c, r, rng.normal(size=20), rng.uniform(0, 1, 20),
                                          predictor_names=["a", "b", "c"], target_name="t")
    save_csv(d, tmp_path / "a.csv")
    once = load_csv(tmp_path / "a.csv", "t")
    save_csv(once, tmp_path / "b.csv")
    twice = load_csv(tmp_path / "b.csv", "t")
    assert once.equals(d) and twice.equals(d)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def _dataset(n):
    x = np.arange(n, dtype=float)[:, None]
    return IntervalDataset(x, x + 1, np.arange(n, dtype=float), np.arange(n, dtype=float) + 1)


def test_random_split_cardinality():
    d = _dataset(10)
    train, test = split(d, SplitSpec(0.8, "random", 7))
    assert (train.n_samples, test.n_samples) == (8, 2)
    rows = set(train.y_lower) | set(test.y_lower)
    assert rows == set(range(10)) and not set(train.y_lower) & set(test.y_lower)


def test_sequential_split():
    train, test = split(_dataset(10), SplitSpec(0.6, "sequential", 0))
    np.testing.assert_array_equal(train.y_lower, np.arange(6))
    np.testing.assert_array_equal(test.y_lower, np.arange(6, 10))


def test_split_degenerate():
    with pytest.raises(DegenerateSplit):
        split(_dataset(2), SplitSpec(0.9, "random", 0))
    with pytest.raises(DegenerateSplit):
        SplitSpec(1.0)


@given(st.integers(2, 200), st.floats(0.05, 0.95), st.integers(0, 2 ** 32))
def test_split_properties(n, frac, seed):
    spec = SplitSpec(frac, "random", seed)
    d = _dataset(n)
    try:
        a_train, a_test = split(d, spec)
    except DegenerateSplit:
        assert round(frac * n) in (0, n)
        return
    b_train, b_test = split(d, spec)
    assert a_train.equals(b_train) and a_test.equals(b_test)
    ids = np.concatenate([a_train.y_lower, a_test.y_lower])
    assert sorted(ids) == list(range(n))
