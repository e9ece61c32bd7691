import math

import pytest

from bqs.core import CompressedTrajectory, fbqs_compress
from bqs.errors import EmptyInput, OutOfRange
from bqs.geometry import Point
from bqs.metrics import (MetricReport, compression_rate, decayed_error,
                         evaluate, max_deviation_error, pruning_power,
                         reconstruct, smooth, time_sync_error)

from conftest import brute_max_deviation


def _traj(*pts):
    return CompressedTrajectory([Point(*p) for p in pts])


def test_compression_rate():
    assert compression_rate(25, 100) == 0.25
    with pytest.raises(EmptyInput):
        compression_rate(0, 0)
    with pytest.raises(ValueError):
        compression_rate(5, 4)


def test_pruning_power():
    assert pruning_power(3, 12) == 0.75
    with pytest.raises(EmptyInput):
        pruning_power(0, 0)
    with pytest.raises(ValueError):
        pruning_power(13, 12)


def test_reconstruct_interpolates_between_keys():
    traj = _traj((1.0, 2.0, 1.0), (5.0, 6.0, 2.0))
    mid = reconstruct(traj, 3.0)
    assert (mid.x, mid.y) == (4.0, 1.5)


def test_reconstruct_exact_at_keys_and_midpoint():
    traj = _traj((0.0, 0.0, 0.0), (10.0, 10.0, 10.0))
    assert reconstruct(traj, 0.0) == traj.keys[0]
    assert reconstruct(traj, 10.0) == traj.keys[-1]
    mid = reconstruct(traj, 5.0)
    assert abs(mid.x - 5.0) < 1e-12 and abs(mid.y - 5.0) < 1e-12


def test_reconstruct_out_of_range():
    traj = _traj((0.0, 0.0, 0.0), (10.0, 10.0, 10.0))
    with pytest.raises(OutOfRange):
        reconstruct(traj, -0.5)
    with pytest.raises(OutOfRange):
        reconstruct(traj, 10.5)
    with pytest.raises(EmptyInput):
        reconstruct(CompressedTrajectory([]), 1.0)


def test_time_sync_error_mean():
    original = [Point(0.0, 0.0, 0.0), Point(1.0, 0.0, 2.0), Point(2.0, 0.0, 0.0)]
    traj = _traj((0.0, 0.0, 0.0), (2.0, 0.0, 0.0))
    errs, mean = time_sync_error(original, traj)
    assert errs == [0.0, 2.0, 0.0]
    assert mean == pytest.approx(2.0 / 3.0)


def test_time_sync_error_outside_span_uses_nearest_key():
    original = [Point(0.0, 0.0, 0.0), Point(5.0, 3.0, 4.0)]
    traj = _traj((0.0, 0.0, 0.0), (1.0, 0.0, 0.0))
    errs, _ = time_sync_error(original, traj)
    assert errs[1] == pytest.approx(5.0)


def test_decayed_error_weights_recent_points():
    assert decayed_error([1.0, 1.0]) == pytest.approx(0.8)
    assert decayed_error([0.0, 0.0, 9.0]) > decayed_error([9.0, 0.0, 0.0])
    with pytest.raises(EmptyInput):
        decayed_error([])


def test_smooth_trailing_window():
    assert smooth([1.0, 2.0, 3.0, 4.0], window=2) == [1.0, 1.5, 2.5, 3.5]
    assert smooth([], window=3) == []
    with pytest.raises(ValueError):
        smooth([1.0], window=0)


def test_max_deviation_matches_oracle(make_jagged):
    pts = make_jagged(seed=140, n=900)
    traj = fbqs_compress(pts, 6.0)
    fast = max_deviation_error(pts, traj)
    slow = brute_max_deviation(pts, traj.keys)
    assert fast == pytest.approx(slow, abs=1e-9)
    assert fast <= 6.0 + 1e-9


def test_evaluate_bundles_consistent_report(make_jagged):
    pts = make_jagged(seed=141, n=700)
    traj = fbqs_compress(pts, 6.0)
    report = evaluate(pts, traj, full_calcs=3, decisions=10, wall_time=0.5)
    assert report.key_count == len(traj.keys)
    assert report.input_count == len(pts)
    assert report.compression_rate == len(traj.keys) / len(pts)
    assert report.pruning_power == 0.7
    assert report.max_deviation <= 6.0 + 1e-9
    assert report.mean_sync_error > 0.0
    assert report.decayed_sync_error > 0.0
    assert report.wall_time == 0.5


def test_metric_report_validation():
    with pytest.raises(ValueError):
        MetricReport(compression_rate=1.5, pruning_power=0.0, max_deviation=0.0,
                     mean_sync_error=0.0, decayed_sync_error=0.0,
                     key_count=1, input_count=1, wall_time=0.0)
    with pytest.raises(ValueError):
        MetricReport(compression_rate=0.5, pruning_power=0.0, max_deviation=0.0,
                     mean_sync_error=0.0, decayed_sync_error=0.0,
                     key_count=5, input_count=4, wall_time=0.0)
