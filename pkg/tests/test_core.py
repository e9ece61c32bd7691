import numpy as np
import pytest

from bqs.core import (CompressorState, Mode, bqs_compress, bqs_step,
                      compress_with_stats, fbqs_compress, fbqs_step,
                      pbqs_compress)
from bqs.errors import TimeOrder, ToleranceOrder
from bqs.geometry import Point

from conftest import brute_max_deviation


def _line(n, dx=1.0, dy=0.0):
    return [Point(float(i), i * dx, i * dy) for i in range(n)]


# -- construction and validation ------------------------------------------

def test_init_validation():
    with pytest.raises(ValueError):
        CompressorState(0.0)
    with pytest.raises(ValueError):
        CompressorState(-1.0)
    with pytest.raises(ValueError):
        CompressorState(5.0, epsilon_prev=-0.1)
    with pytest.raises(ValueError):
        CompressorState(5.0, r_init=0)
    with pytest.raises(ToleranceOrder):
        CompressorState(2.0, epsilon_prev=3.0)
    with pytest.raises(ToleranceOrder):
        CompressorState(3.0, epsilon_prev=3.0)


def test_step_wrappers_enforce_mode():
    buffered = CompressorState(1.0, mode=Mode.BUFFERED)
    fast = CompressorState(1.0, mode=Mode.FAST)
    with pytest.raises(ValueError):
        fbqs_step(buffered, Point(0, 0, 0))
    with pytest.raises(ValueError):
        bqs_step(fast, Point(0, 0, 0))


def test_time_order_enforced():
    st = CompressorState(1.0)
    st.step(Point(0.0, 0.0, 0.0))
    with pytest.raises(TimeOrder):
        st.step(Point(0.0, 1.0, 0.0))
    with pytest.raises(TimeOrder):
        st.step(Point(-1.0, 1.0, 0.0))


def test_tolerance_order_in_recompression():
    keys = _line(10)
    with pytest.raises(ToleranceOrder):
        pbqs_compress(keys, 5.0, 5.0)
    with pytest.raises(ToleranceOrder):
        pbqs_compress(keys, 5.0, 4.0)


# -- degenerate inputs ------------------------------------------------------

def test_tiny_inputs():
    assert bqs_compress([], 1.0).keys == []
    one = [Point(0.0, 3.0, 4.0)]
    assert bqs_compress(one, 1.0).keys == one
    two = [Point(0.0, 0.0, 0.0), Point(1.0, 5.0, 5.0)]
    assert fbqs_compress(two, 1.0).keys == two


def test_collinear_stream_collapses_to_endpoints():
    pts = _line(500)
    for compress in (bqs_compress, fbqs_compress):
        keys = compress(pts, 1.0).keys
        assert len(keys) == 2
        assert keys[0] == pts[0]
        assert keys[-1] == pts[-1]


# -- output structure --------------------------------------------------------

def test_keys_are_input_points_in_order(make_jagged):
    pts = make_jagged(seed=3, n=1200)
    by_time = {p.t: p for p in pts}
    for compress in (bqs_compress, fbqs_compress):
        keys = compress(pts, 8.0).keys
        assert keys[0] == pts[0]
        assert keys[-1] == pts[-1]
        ts = [k.t for k in keys]
        assert ts == sorted(ts)
        assert len(set(ts)) == len(ts)
        for k in keys:
            assert by_time[k.t] == k


def test_right_angle_corner_is_kept():
    pts = [Point(float(i), float(i), 0.0) for i in range(11)]
    pts += [Point(10.0 + i, 10.0, float(i)) for i in range(1, 11)]
    for compress in (bqs_compress, fbqs_compress):
        keys = compress(pts, 0.5).keys
        assert any(k.x == 10.0 and k.y == 0.0 for k in keys)


# -- the error guarantee -----------------------------------------------------

@pytest.mark.parametrize("epsilon", [2.0, 10.0])
def test_error_bound_on_jagged_streams(make_jagged, epsilon):
    for seed in range(5):
        pts = make_jagged(seed=seed, n=1500)
        for compress in (bqs_compress, fbqs_compress):
            keys = compress(pts, epsilon).keys
            assert brute_max_deviation(pts, keys) <= epsilon + 1e-9


def test_error_bound_on_walk(walk):
    pts = walk(0, 4000)
    for epsilon in (5.0, 25.0):
        for compress in (bqs_compress, fbqs_compress):
            keys = compress(pts, epsilon).keys
            assert brute_max_deviation(pts, keys) <= epsilon + 1e-9


def test_fast_mode_never_keeps_fewer_keys(make_jagged):
    for seed in range(4):
        pts = make_jagged(seed=40 + seed, n=1500)
        for epsilon in (3.0, 12.0):
            assert len(fbqs_compress(pts, epsilon)) >= len(bqs_compress(pts, epsilon))


# -- progressive re-compression ----------------------------------------------

def test_recompression_with_zero_prior_matches_fast(make_jagged):
    pts = make_jagged(seed=9, n=2000)
    assert pbqs_compress(pts, 0.0, 6.0).keys == fbqs_compress(pts, 6.0).keys


def test_recompression_chain_respects_total_budget(make_jagged, walk):
    streams = [make_jagged(seed=11, n=2500), walk(1, 4000)]
    for pts in streams:
        eps1, eps2, eps3 = 2.0, 5.0, 12.5
        k1 = fbqs_compress(pts, eps1)
        k2 = pbqs_compress(k1.keys, eps1, eps2)
        k3 = pbqs_compress(k2.keys, eps2, eps3)
        assert brute_max_deviation(pts, k2.keys) <= eps2 + 1e-9
        assert brute_max_deviation(pts, k3.keys) <= eps3 + 1e-9
        assert len(k3) <= len(k2) <= len(k1)


# -- statistics and memory ---------------------------------------------------

def test_stats_accounting(make_jagged):
    pts = make_jagged(seed=21, n=2000)
    _, fast_stats, _ = compress_with_stats(pts, 5.0, mode=Mode.FAST)
    assert fast_stats.full_calc_count == 0
    assert 0 < fast_stats.decisive_count == fast_stats.total < len(pts)
    _, buf_stats, _ = compress_with_stats(pts, 5.0, mode=Mode.BUFFERED)
    assert buf_stats.decisive_count + buf_stats.full_calc_count == buf_stats.total
    assert buf_stats.full_calc_count > 0
    assert buf_stats.total < len(pts)


def test_fast_mode_footprint_is_bounded(make_jagged):
    pts = make_jagged(seed=30, n=5000)
    _, _, state = compress_with_stats(pts, 4.0, mode=Mode.FAST)
    assert state.peak_footprint <= state.r_init
    _, _, buffered = compress_with_stats(pts, 4.0, mode=Mode.BUFFERED)
    assert buffered.peak_footprint > buffered.r_init


def test_near_origin_points_are_exempt_until_structure_forms():
    st = CompressorState(10.0, mode=Mode.FAST)
    st.step(Point(0.0, 0.0, 0.0))
    rng = np.random.default_rng(0)
    for i in range(1, 40):
        jitter = rng.uniform(-2.0, 2.0, 2)
        dec = st.step(Point(float(i), jitter[0], jitter[1]))
        assert not dec.is_key
        assert st.state_footprint() == 0
    st.step(Point(40.0, 50.0, 0.0))
    assert st.state_footprint() == 1


def test_exempt_shortcut_requires_empty_structure():
    # once points are absorbed, a return to the origin must not bypass the
    # bound check (the detour between could exceed the tolerance)
    pts = [Point(0.0, 0.0, 0.0)]
    pts += [Point(float(i), 20.0 * i, 0.0) for i in range(1, 8)]
    pts += [Point(8.0, 140.0, 60.0), Point(9.0, 1.0, 0.0), Point(10.0, 160.0, 0.0)]
    for compress in (bqs_compress, fbqs_compress):
        keys = compress(pts, 6.0).keys
        assert brute_max_deviation(pts, keys) <= 6.0 + 1e-9
        assert len(keys) > 2
