import numpy as np
import pytest

from heavypaths.cadlag import make_step
from heavypaths.skorokhod import (dist_m1_monotone, dist_m2, dist_m2_oracle,
                                  dist_product, dist_uniform, oracle_gap_bound)

from conftest import random_step


def indicator(s):
    return make_step(0.0, [(s, 1.0)])


ZERO = make_step(0.0, [])


def test_identical_inputs_zero(rng):
    for _ in range(20):
        x = random_step(rng)
        assert dist_m2(x, x).value == 0.0
        assert dist_m2_oracle(x, x) == 0.0
        assert dist_uniform(x, x) == 0.0


def test_indicator_vs_zero():
    assert dist_m2(indicator(0.5), ZERO).value == 1.0
    assert dist_uniform(indicator(0.5), ZERO) == 1.0


def test_jump_shift():
    d = dist_m2(indicator(0.5), indicator(0.6)).value
    assert d == pytest.approx(0.1, abs=1e-12)
    # uniform metric saturates while the graph distance stays small
    assert dist_uniform(indicator(0.5), indicator(0.6)) == 1.0


def test_jump_shift_random_grid(rng):
    for _ in range(100):
        s = rng.uniform(0.05, 0.9)
        delta = rng.uniform(1e-6, min(s, 1.0 - s) * 0.95)
        d = dist_m2(indicator(s), indicator(s + delta)).value
        assert d == pytest.approx(delta, abs=1e-12)


def test_witness_attains_value():
    res = dist_m2(indicator(0.5), ZERO)
    (a, b) = res.witness
    assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == pytest.approx(res.value, abs=1e-12)


def test_monotone_translate():
    y1 = make_step(0.0, [(0.3, 1.0), (0.7, 2.5)])
    y2 = make_step(1.0, [(0.3, 2.0), (0.7, 3.5)])
    assert dist_m1_monotone(y1, y2) == pytest.approx(1.0, abs=1e-12)
    assert dist_m1_monotone(y1, y2) == dist_m2(y1, y2).value


def test_monotone_guard():
    wiggly = make_step(0.0, [(0.4, 1.0), (0.6, 0.5)])
    with pytest.raises(ValueError):
        dist_m1_monotone(wiggly, ZERO)


def test_product_metric():
    x = indicator(0.5)
    assert dist_product([x, x], [x, x]) == 0.0
    a = [indicator(0.5), indicator(0.5)]
    b = [indicator(0.7), ZERO]
    assert dist_product(a, b) == pytest.approx(
        max(dist_m2(a[0], b[0]).value, dist_m2(a[1], b[1]).value))
    assert dist_product([x], [ZERO]) == dist_m2(x, ZERO).value
    with pytest.raises(ValueError):
        dist_product([x], [x, x])


def test_oracle_from_below_with_bound(rng):
    for _ in range(300):
        x1, x2 = random_step(rng), random_step(rng, heavy=True)
        exact = dist_m2(x1, x2).value
        approx = dist_m2_oracle(x1, x2, samples_per_segment=64)
        assert approx <= exact + 1e-12
        assert exact - approx <= oracle_gap_bound(x1, x2, 64)


def test_oracle_high_resolution_example():
    d = dist_m2_oracle(indicator(0.5), ZERO, samples_per_segment=200)
    assert 1.0 - 2.0 / 200 <= d <= 1.0


def test_symmetry_exact(rng):
    for _ in range(200):
        x1, x2 = random_step(rng), random_step(rng)
        assert dist_m2(x1, x2).value == dist_m2(x2, x1).value


def test_triangle_inequality(rng):
    for _ in range(300):
        x1, x2, x3 = (random_step(rng) for _ in range(3))
        d12 = dist_m2(x1, x2).value
        d13 = dist_m2(x1, x3).value
        d23 = dist_m2(x3, x2).value
        assert d12 <= d13 + d23 + 1e-9


def test_identity_of_indiscernibles(rng):
    for _ in range(50):
        x = random_step(rng)
        y = make_step(x.initial_value, list(zip(x.times, x.values)))
        assert dist_m2(x, y).value == 0.0
        if len(x.times):
            z = make_step(x.initial_value + 0.25, list(zip(x.times, x.values)))
            assert dist_m2(x, z).value > 0.0


def test_dominated_by_uniform(rng):
    for _ in range(200):
        x1, x2 = random_step(rng), random_step(rng)
        assert dist_m2(x1, x2).value <= dist_uniform(x1, x2) + 1e-12


def test_backend_parity(rng):
    from heavypaths import _kernels_py
    from heavypaths.cadlag import completed_graph
    try:
        from heavypaths import _kernels
    except ImportError:
        pytest.skip("compiled backend not built")
    for _ in range(100):
        x1, x2 = random_step(rng), random_step(rng)
        g1 = completed_graph(x1).segments
        g2 = completed_graph(x2).segments
        c = _kernels.graph_supinf(g1, g2)[0]
        py = _kernels_py.graph_supinf(g1, g2)[0]
        assert c == pytest.approx(py, rel=1e-12, abs=1e-14)
