import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heavypaths.cadlag import CadlagStep, completed_graph, make_step

from conftest import random_step


def test_zero_function():
    x = make_step(0.0, [])
    for t in (0.0, 0.3, 1.0):
        assert x.eval(t) == 0.0


def test_indicator_step():
    x = make_step(0.0, [(0.5, 1.0)])
    assert x.eval(0.25) == 0.0
    assert x.eval(0.5) == 1.0
    assert x.eval(1.0) == 1.0
    assert x.eval_left(0.5) == 0.0


def test_two_jump_evaluation():
    x = make_step(2.0, [(0.25, 1.0), (0.75, 3.0)])
    assert x.eval(0.5) == 1.0
    assert x.eval(0.75) == 3.0
    assert x.eval(1.0) == 3.0
    assert x.eval_left(0.75) == 1.0
    assert x.eval(0.75) == 3.0


def test_rejects_bad_times():
    with pytest.raises(ValueError):
        make_step(0.0, [(0.0, 1.0)])  # jump at 0 forbidden
    with pytest.raises(ValueError):
        make_step(0.0, [(0.5, 1.0), (0.5, 2.0)])
    with pytest.raises(ValueError):
        make_step(0.0, [(1.2, 1.0)])
    with pytest.raises(ValueError):
        x = make_step(0.0, [])
        x.eval(1.5)


def test_zero_height_jumps_dropped():
    x = make_step(1.0, [(0.3, 1.0), (0.6, 2.0)])
    assert len(x.times) == 1
    assert x.times[0] == 0.6


def test_completed_graph_zero_and_indicator():
    g = completed_graph(make_step(0.0, []))
    assert g.segments.tolist() == [[0.0, 0.0, 1.0, 0.0]]
    g = completed_graph(make_step(0.0, [(0.5, 1.0)]))
    assert g.segments.tolist() == [
        [0.0, 0.0, 0.5, 0.0], [0.5, 0.0, 0.5, 1.0], [0.5, 1.0, 1.0, 1.0]]


def test_completed_graph_two_jumps_five_segments():
    # plateau / jump / plateau / jump / plateau, enumerated by hand
    g = completed_graph(make_step(2.0, [(0.25, 1.0), (0.75, 3.0)]))
    assert g.segments.tolist() == [
        [0.0, 2.0, 0.25, 2.0],
        [0.25, 2.0, 0.25, 1.0],
        [0.25, 1.0, 0.75, 1.0],
        [0.75, 1.0, 0.75, 3.0],
        [0.75, 3.0, 1.0, 3.0],
    ]


def test_graph_connectivity_and_time_span(rng):
    for _ in range(50):
        x = random_step(rng)
        segs = completed_graph(x).segments
        assert segs[0, 0] == 0.0
        assert segs[-1, 2] == 1.0
        for a, b in zip(segs[:-1], segs[1:]):
            assert a[2] == b[0] and a[3] == b[1]


def test_graph_membership_roundtrip(rng):
    for _ in range(25):
        x = random_step(rng)
        g = completed_graph(x)
        for t0, v0, t1, v1 in g.segments:
            assert g.contains(t0, v0)
            assert g.contains(t1, v1)
            mid_t, mid_v = (t0 + t1) / 2.0, (v0 + v1) / 2.0
            assert g.contains(mid_t, mid_v)


def test_left_limit_matches_small_eps(rng):
    for _ in range(25):
        x = random_step(rng)
        for t in x.times:
            eps = 1e-6
            if t - eps > 0:
                assert x.eval_left(t) == x.eval(t - eps) or any(
                    t - eps < s < t for s in x.times)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(0.01, 1.0), st.floats(-50, 50)),
                max_size=8),
       st.floats(-10, 10))
def test_serde_roundtrip(jumps, initial):
    jumps = sorted({round(t, 6): v for t, v in jumps}.items())
    x = make_step(initial, jumps)
    y = CadlagStep.from_json(x.to_json())
    assert np.array_equal(x.times, y.times)
    assert np.array_equal(x.values, y.values)
    assert x.initial_value == y.initial_value


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0.01, 1.0), st.floats(-50, 50)), max_size=8))
def test_right_continuity(jumps):
    jumps = sorted({round(t, 6): v for t, v in jumps}.items())
    x = make_step(0.0, jumps)
    for t, v in zip(x.times, x.values):
        assert x.eval(t) == v


def test_csv_sampling():
    x = make_step(0.0, [(0.5, 1.0)])
    out = x.sample_csv(np.array([0.0, 0.25, 0.5, 1.0]))
    lines = out.strip().splitlines()
    assert lines[0] == "t,x"
    assert lines[-1] == "1.0,1.0"
