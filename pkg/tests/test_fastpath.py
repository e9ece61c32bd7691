import numpy as np
import pytest

from bqs.core import Mode, compress_with_stats, fbqs_compress, pbqs_compress
from bqs.errors import TimeOrder, ToleranceOrder
from bqs.fastpath import fast_key_indices, warm_up


def _arrays(points):
    return (np.array([p.t for p in points]),
            np.array([p.x for p in points]),
            np.array([p.y for p in points]))


def _assert_matches_machine(points, epsilon, *, epsilon_prev=0.0, r_init=5):
    ts, xs, ys = _arrays(points)
    idx, decisions = fast_key_indices(ts, xs, ys, epsilon,
                                      epsilon_prev=epsilon_prev, r_init=r_init)
    traj, stats, _ = compress_with_stats(points, epsilon, mode=Mode.FAST,
                                         epsilon_prev=epsilon_prev, r_init=r_init)
    assert [points[i].t for i in idx] == traj.timestamps
    assert decisions == stats.decisive_count


@pytest.mark.parametrize("epsilon", [1.5, 5.0, 20.0])
def test_kernel_matches_machine_on_jagged_streams(make_jagged, epsilon):
    for seed in range(8):
        _assert_matches_machine(make_jagged(seed=seed, n=1200), epsilon)


def test_kernel_matches_machine_on_walk(walk):
    for epsilon in (2.0, 10.0, 50.0):
        _assert_matches_machine(walk(0, 4000), epsilon)


def test_kernel_matches_machine_with_prior_tolerance(make_jagged):
    for seed in range(5):
        pts = make_jagged(seed=60 + seed, n=2000)
        keys = fbqs_compress(pts, 2.0).keys
        ts, xs, ys = _arrays(keys)
        idx, _ = fast_key_indices(ts, xs, ys, 5.0, epsilon_prev=2.0)
        machine = pbqs_compress(keys, 2.0, 5.0)
        assert [keys[i].t for i in idx] == machine.timestamps


@pytest.mark.parametrize("r_init", [1, 3, 8])
def test_kernel_matches_machine_across_window_sizes(make_jagged, r_init):
    _assert_matches_machine(make_jagged(seed=77, n=1500), 4.0, r_init=r_init)


def test_tiny_arrays():
    t = np.array([0.0, 1.0, 2.0])
    x = np.array([0.0, 1.0, 2.0])
    y = np.zeros(3)
    idx, _ = fast_key_indices(t, x, y, 1.0)
    assert idx.tolist() == [0, 2]
    idx, _ = fast_key_indices(t[:1], x[:1], y[:1], 1.0)
    assert idx.tolist() == [0]
    idx, _ = fast_key_indices(t[:0], x[:0], y[:0], 1.0)
    assert idx.tolist() == []


def test_validation_errors():
    t = np.arange(4, dtype=float)
    x = np.arange(4, dtype=float)
    y = np.zeros(4)
    with pytest.raises(ValueError):
        fast_key_indices(t, x, y, 0.0)
    with pytest.raises(ValueError):
        fast_key_indices(t, x, y, 1.0, epsilon_prev=-1.0)
    with pytest.raises(ToleranceOrder):
        fast_key_indices(t, x, y, 1.0, epsilon_prev=2.0)
    with pytest.raises(ValueError):
        fast_key_indices(t, x, y, 1.0, r_init=0)
    with pytest.raises(ValueError):
        fast_key_indices(t[:3], x, y, 1.0)
    with pytest.raises(TimeOrder):
        fast_key_indices(np.array([0.0, 2.0, 2.0, 3.0]), x, y, 1.0)


def test_warm_up_is_idempotent():
    warm_up()
    warm_up()
