import numpy as np
import pytest

from heavypaths import backend
from heavypaths.coefficients import CoefModel, CoefSeq, sample_coefs
from heavypaths.heavy_tail import TailModel, sample_innovations
from heavypaths.linear_process import (PathPair, effective_coefs, paths,
                                       realize, self_normalized)

TAIL = TailModel(alpha=0.8, p=0.7)


def test_identity_coefficients_reproduce_innovations():
    coefs = CoefSeq(np.array([1.0]))
    rz = realize(TAIL, coefs, 500, seed=4)
    z = sample_innovations(TAIL, 500, seed=4)
    assert np.array_equal(rz.x, z)


def test_explicit_convolution_window():
    # window (Z_0, Z_1, Z_2) = (1, 2, 3) with coefs (1, 1): X = (3, 5)
    x = backend.fir_filter(np.array([1.0, 1.0]), np.array([1.0, 2.0, 3.0]))
    assert x.tolist() == [3.0, 5.0]


def test_folded_finite_order_coefficients():
    coefs = CoefSeq(np.array([1.0, 1.0, 1.0]))
    assert effective_coefs(coefs, 1).tolist() == [1.0, 2.0]
    assert effective_coefs(coefs, 0).tolist() == [3.0]
    assert effective_coefs(coefs, None).tolist() == [1.0, 1.0, 1.0]


def test_folded_mode_shares_innovations():
    coefs = CoefSeq(np.array([0.5, 0.3, 0.2]))
    full = realize(TAIL, coefs, 200, seed=8)
    folded = realize(TAIL, coefs, 200, seed=8, order=1)
    assert np.array_equal(full.innovations, folded.innovations)
    # X_i(1) = C_0 Z_i + (C_1 + C_2) Z_{i-1} on the same stream
    z = full.innovations
    manual = 0.5 * z[2:] + 0.5 * z[1:-1]
    assert folded.x == pytest.approx(manual, rel=1e-15)


def test_realization_reproducible():
    coefs = sample_coefs(CoefModel("geometric_random", rho_low=0.4, rho_high=0.6),
                         30, seed=2)
    a = realize(TAIL, coefs, 100, seed=5)
    b = realize(TAIL, coefs, 100, seed=5)
    assert np.array_equal(a.x, b.x)


def test_paths_two_point_example():
    coefs = CoefSeq(np.array([1.0]))
    rz = realize(TAIL, coefs, 2, seed=0)
    a_n = rz.a_n
    rz2 = type(rz)(x=np.array([a_n, -a_n]), innovations=rz.innovations, n=2,
                   a_n=a_n, tail=TAIL, coefs=coefs, seed=0)
    pp = paths(rz2)
    assert pp.v.eval(0.5) == pytest.approx(1.0)
    assert pp.v.eval(1.0) == pytest.approx(0.0, abs=1e-15)
    assert pp.w.eval(1.0) == pytest.approx(2.0)
    assert pp.v.eval(0.0) == 0.0 and pp.w.eval(0.0) == 0.0


def test_w_path_nondecreasing_and_terminal_identity():
    coefs = sample_coefs(CoefModel("geometric_random", rho_low=0.3, rho_high=0.7),
                         40, seed=3)
    rz = realize(TAIL, coefs, 300, seed=6)
    pp = paths(rz)
    assert pp.w.is_nondecreasing()
    # terminal value and zeta_sq come from one accumulation
    assert pp.w.final_value == pp.zeta_sq / rz.a_n ** 2
    assert pp.w.final_value * rz.a_n ** 2 == pytest.approx(pp.zeta_sq, rel=5e-16)
    direct = float(np.sum(np.sort(rz.x ** 2)))
    assert pp.zeta_sq == pytest.approx(direct, rel=1e-12)


def test_self_normalized_example():
    coefs = CoefSeq(np.array([1.0]))
    rz = realize(TAIL, coefs, 2, seed=0)
    rz2 = type(rz)(x=np.array([3.0, 4.0]), innovations=rz.innovations, n=2,
                   a_n=rz.a_n, tail=TAIL, coefs=coefs, seed=0)
    s = self_normalized(rz2)
    assert s.eval(0.5) == pytest.approx(3.0 / 5.0)
    assert s.eval(1.0) == pytest.approx(7.0 / 5.0)


def test_self_normalized_agrees_with_path_ratio():
    coefs = sample_coefs(CoefModel("geometric_random", rho_low=0.3, rho_high=0.7),
                         40, seed=13)
    rz = realize(TAIL, coefs, 400, seed=14)
    s = self_normalized(rz)
    pp = paths(rz)
    ratio = pp.v.eval_grid(s.times) / np.sqrt(pp.w.final_value)
    assert np.allclose(ratio, s.eval_grid(s.times), rtol=1e-12, atol=1e-14)


def test_self_normalized_single_spike():
    coefs = CoefSeq(np.array([1.0]))
    rz = realize(TAIL, coefs, 4, seed=0)
    x = np.zeros(4)
    x[2] = -7.5
    rz2 = type(rz)(x=x, innovations=rz.innovations, n=4, a_n=rz.a_n,
                   tail=TAIL, coefs=coefs, seed=0)
    s = self_normalized(rz2)
    assert s.eval(0.5) == 0.0
    assert s.eval(0.75) == -1.0
    assert s.eval(1.0) == -1.0


def test_self_normalized_scale_invariance():
    coefs = sample_coefs(CoefModel("geometric_random", rho_low=0.3, rho_high=0.7),
                         40, seed=21)
    rz = realize(TAIL, coefs, 250, seed=22)
    s1 = self_normalized(rz)
    for c in (7.0, 1e-6, 3.5e8):
        scaled = type(rz)(x=c * rz.x, innovations=rz.innovations, n=rz.n,
                          a_n=rz.a_n, tail=TAIL, coefs=coefs, seed=22)
        s2 = self_normalized(scaled)
        assert np.allclose(s1.values, s2.values, rtol=1e-12)


def test_degenerate_zeta_raises():
    coefs = CoefSeq(np.array([1.0]))
    rz = realize(TAIL, coefs, 3, seed=0)
    z = type(rz)(x=np.zeros(3), innovations=rz.innovations, n=3, a_n=rz.a_n,
                 tail=TAIL, coefs=coefs, seed=0)
    with pytest.raises(ZeroDivisionError):
        self_normalized(z)


def test_truncation_error_decays_with_order():
    model = CoefModel("geometric_random", a_low=0.5, a_high=2.0,
                      rho_low=0.3, rho_high=0.7)
    sup_v = {q: [] for q in (1, 2, 4, 8, 16)}
    sup_w = {q: [] for q in (1, 2, 4, 8, 16)}
    for seed in range(20):
        coefs = sample_coefs(model, 60, seed=seed)
        full = realize(TAIL, coefs, 2000, seed=seed)
        pv = paths(full)
        for q in sup_v:
            part = realize(TAIL, coefs, 2000, seed=seed, order=q)
            pq = paths(part)
            grid = pv.v.times
            sup_v[q].append(np.max(np.abs(pv.v.eval_grid(grid) - pq.v.eval_grid(grid))))
            sup_w[q].append(np.max(np.abs(pv.w.eval_grid(grid) - pq.w.eval_grid(grid))))
    med_v = [np.median(sup_v[q]) for q in (1, 2, 4, 8, 16)]
    med_w = [np.median(sup_w[q]) for q in (1, 2, 4, 8, 16)]
    assert all(a >= b for a, b in zip(med_v[:-1], med_v[1:]))
    assert all(a >= b for a, b in zip(med_w[:-1], med_w[1:]))
