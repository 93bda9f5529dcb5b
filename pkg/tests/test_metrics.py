import numpy as np
import pytest
from hypothesis import given, strategies as st

from interbench.errors import LengthMismatch
from interbench.interval import Interval, IntervalArray, PredictedIntervals
from interbench.metrics import (
    coverage_rate,
    evaluate,
    hausdorff_distances,
    hausdorff_interval,
    mhd,
    rmse_bounds,
)


def grid_hausdorff(a, b, n=10_001):
    """sup-inf over a dense grid on each interval."""
    pa = np.linspace(a.lower, a.upper, n)
    pb = np.linspace(b.lower, b.upper, n)
    # inf over the other interval is exact: distance to a closed interval
    d_ab = np.maximum(0.0, np.maximum(b.lower - pa, pa - b.upper))
    d_ba = np.maximum(0.0, np.maximum(a.lower - pb, pb - a.upper))
    return max(d_ab.max(), d_ba.max())


def pairwise_grid_hausdorff(a, b, n=2001):
    pa = np.linspace(a.lower, a.upper, n)[:, None]
    pb = np.linspace(b.lower, b.upper, n)[None, :]
    d = np.abs(pa - pb)
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def test_rmse_examples():
    assert rmse_bounds(([0.0], [1.0]), ([0.0], [1.0])) == (0.0, 0.0)
    assert rmse_bounds(([0.0], [1.0]), ([1.0], [3.0])) == (1.0, 2.0)
    rl, _ = rmse_bounds(([0.0, 0.0], [9.0, 9.0]), ([3.0, 4.0], [9.0, 9.0]))
    assert rl == pytest.approx(np.sqrt(25 / 2))


def test_length_checks():
    with pytest.raises(LengthMismatch):
        mhd(([0.0], [1.0]), ([0.0, 1.0], [1.0, 2.0]))
    with pytest.raises(LengthMismatch):
        rmse_bounds(([], []), ([], []))


@pytest.mark.parametrize("a, b, expected", [
    ((0, 2), (1, 3), 1.0),
    ((0, 1), (5, 6), 5.0),
    ((1, 4), (1, 4), 0.0),
])
def test_hausdorff_examples(a, b, expected):
    a, b = Interval(*a), Interval(*b)
    assert hausdorff_interval(a, b) == expected
    assert abs(grid_hausdorff(a, b) - expected) < 1e-3
    assert abs(pairwise_grid_hausdorff(a, b) - expected) < 1e-3


def test_hausdorff_matches_grid_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        lo = rng.uniform(-10, 10, 2)
        w = rng.uniform(0, 5, 2)
        a, b = Interval(lo[0], lo[0] + w[0]), Interval(lo[1], lo[1] + w[1])
        assert abs(hausdorff_interval(a, b) - grid_hausdorff(a, b)) < 1e-3


intervals = st.tuples(
    st.floats(-100, 100), st.floats(0, 50)
).map(lambda t: Interval(t[0], t[0] + t[1]))


@given(intervals, intervals, intervals)
def test_hausdorff_is_a_metric(a, b, c):
    assert hausdorff_interval(a, a) == 0
    assert hausdorff_interval(a, b) == hausdorff_interval(b, a)
    if a != b:
        assert hausdorff_interval(a, b) > 0
    assert hausdorff_interval(a, c) <= hausdorff_interval(a, b) + hausdorff_interval(b, c) + 1e-9


def test_mhd_examples():
    assert mhd(([0.0, 1.0], [1.0, 2.0]), ([0.0, 1.0], [1.0, 2.0])) == 0.0
    assert mhd(([0.0, 0.0], [2.0, 1.0]), ([1.0, 5.0], [3.0, 6.0])) == 3.0


def test_mhd_swaps_crossed_predictions():
    pred = PredictedIntervals([3.0], [1.0])
    assert pred.crossed_count == 1
    np.testing.assert_array_equal(hausdorff_distances(([0.0], [2.0]), pred), [1.0])


def test_coverage_examples():
    truth = IntervalArray([0.0, 1.0], [2.0, 4.0])
    assert coverage_rate(truth, truth) == 1.0
    assert coverage_rate(truth, ([10.0, 20.0], [11.0, 21.0])) == 0.0
    assert coverage_rate(([0.0], [2.0]), ([1.0], [3.0])) == 0.5


def test_coverage_crossed_contributes_zero():
    assert coverage_rate(([0.0], [2.0]), ([2.0], [0.0])) == 0.0
    assert coverage_rate(([0.0], [2.0]), ([1.5], [0.5])) == 0.0


def test_coverage_excludes_zero_width_truth(caplog):
    truth = ([0.0, 5.0], [2.0, 5.0])
    pred = ([1.0, 4.0], [3.0, 6.0])
    assert coverage_rate(truth, pred) == 0.5
    assert "excluded" in caplog.text
    rep = evaluate(IntervalArray(*truth), PredictedIntervals(*pred))
    assert rep.zero_width_truth == 1 and rep.cr == 0.5


bounds = st.lists(st.tuples(st.floats(-50, 50), st.floats(0.01, 20), st.floats(-50, 50), st.floats(-20, 20)),
                  min_size=1, max_size=20)


def _arrays(rows):
    r = np.array(rows)
    truth = IntervalArray(r[:, 0], r[:, 0] + r[:, 1])
    pred = PredictedIntervals(r[:, 2], r[:, 2] + r[:, 3])  # may cross
    return truth, pred


@given(bounds)
def test_coverage_in_unit_interval(rows):
    truth, pred = _arrays(rows)
    assert 0.0 <= coverage_rate(truth, pred) <= 1.0


@given(bounds, st.floats(-100, 100))
def test_coverage_translation_invariant(rows, shift):
    truth, pred = _arrays(rows)
    moved_t = IntervalArray(truth.lower + shift, truth.upper + shift)
    moved_p = PredictedIntervals(pred.lower + shift, pred.upper + shift)
    assert coverage_rate(moved_t, moved_p) == pytest.approx(coverage_rate(truth, pred), abs=1e-6)


@given(bounds, st.floats(0.01, 100))
def test_mhd_and_rmse_scale_equivariant(rows, c):
    truth, pred = _arrays(rows)
    st_ = IntervalArray(truth.lower * c, truth.upper * c)
    sp = PredictedIntervals(pred.lower * c, pred.upper * c)
    assert mhd(st_, sp) == pytest.approx(c * mhd(truth, pred), rel=1e-9, abs=1e-9)
    rl, ru = rmse_bounds(truth, pred)
    srl, sru = rmse_bounds(st_, sp)
    assert srl == pytest.approx(c * rl, rel=1e-9, abs=1e-9)
    assert sru == pytest.approx(c * ru, rel=1e-9, abs=1e-9)


def test_evaluate_report():
    rep = evaluate(IntervalArray([0.0, 0.0], [2.0, 1.0]), PredictedIntervals([1.0, 5.0], [3.0, 6.0]))
    assert rep.mhd == 3.0 and rep.n == 2 and rep.crossed_count == 0
    assert 0 <= rep.cr <= 1
