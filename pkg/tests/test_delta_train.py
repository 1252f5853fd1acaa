import math

import numpy as np
import pytest

from udwtrain.core_model import Bump, Heaviside, TruncatedGaussian, switching_ft, switching_integral
from udwtrain.delta_train import build_train, build_train_window, strength_autocorrelation, train_ft


def test_heaviside_trains():
    t1 = build_train(Heaviside(), 1)
    assert t1.taus.tolist() == [0.5] and t1.etas.tolist() == [1.0]
    t4 = build_train(Heaviside(), 4)
    assert t4.taus.tolist() == [0.125, 0.375, 0.625, 0.875]
    assert t4.etas.tolist() == [0.25] * 4


def test_bump_train():
    t = build_train(Bump(), 2)
    assert t.etas[0] == pytest.approx(math.exp(-4 / 3) / 2, rel=1e-15)
    assert t.etas[1] == pytest.approx(math.exp(-4 / 3) / 2, rel=1e-15)


def test_window_trains():
    a, b = build_train_window(Heaviside(), 2, 0.0, 1.0), build_train(Heaviside(), 2)
    assert np.array_equal(a.taus, b.taus) and np.array_equal(a.etas, b.etas)
    w = build_train_window(Heaviside(), 1, 3.0, 2.0)
    assert w.taus.tolist() == [4.0] and w.etas.tolist() == [2.0]
    g = build_train_window(TruncatedGaussian(1.0), 1, 0.0, 1.0)
    assert g.etas.tolist() == [1.0]


@pytest.mark.parametrize("spec", [Heaviside(), TruncatedGaussian(1.0), Bump()])
@pytest.mark.parametrize("N", [1, 3, 17, 64])
def test_window_equals_plain_exactly(spec, N):
    assert build_train_window(spec, N, 0.0, 1.0) == build_train(spec, N)


def test_lengths_always_n():
    for N in [1, 2, 5, 100]:
        assert len(build_train(Bump(), N)) == N


def test_train_ft_examples():
    t = build_train(TruncatedGaussian(0.5), 7)
    assert train_ft(t, 0.0) == pytest.approx(np.sum(t.etas), rel=1e-15)
    k = np.array([0.0, 1.0, -3.2])
    assert np.allclose(train_ft(build_train(Heaviside(), 1), k), np.exp(-0.5j * k), rtol=1e-15)
    big = build_train(Heaviside(), 1000)
    assert abs(train_ft(big, 5.0) - switching_ft(Heaviside(), 5.0)) < 1e-2


@pytest.mark.parametrize("spec", [TruncatedGaussian(1.0), Bump()])
def test_midpoint_strength_sum(spec):
    exact = switching_integral(spec, 1e-14)
    errs = [abs(np.sum(build_train(spec, N).etas) - exact) for N in (4, 16, 64, 256)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < errs[0] / 16**2  # at least second order


@pytest.mark.parametrize("spec", [Heaviside(), TruncatedGaussian(1.0), Bump()])
@pytest.mark.parametrize("k", [1.0, 5.0, 10.0])
def test_train_ft_converges(spec, k):
    ref = switching_ft(spec, k, 1e-14)
    errs = [abs(train_ft(build_train(spec, N), k) - ref) for N in (16, 32, 64, 128)]
    for a, b in zip(errs, errs[1:]):
        assert b <= a / 2 or b < 1e-13


def test_autocorrelation_matches_double_sum():
    t = build_train(TruncatedGaussian(0.4), 9)
    c = strength_autocorrelation(t)
    N = len(t)
    for D in range(-(N - 1), N):
        direct = sum(t.etas[j] * t.etas[j + D] for j in range(N) if 0 <= j + D < N)
        assert c[D + N - 1] == pytest.approx(direct, rel=1e-14)
