import math

import numpy as np
import pytest

from udwtrain.core_model import Bump, Gaussian, HardSphere, Heaviside, SingleParams, TruncatedGaussian
from udwtrain.errors import DomainError
from udwtrain.single_detector import (
    KernelGaussian,
    kernel_closed_form,
    kernel_gaussian,
    kernel_path,
    kernel_quadrature,
    pe_exact,
    pe_train,
    pe_train_naive,
    pe_train_oracle,
)

from reference_values import KERNEL_1_1, ONE_OVER_4PI2, PE_BUMP, PE_GAUSSIAN_Q1, PE_HEAVISIDE

SWITCHINGS = [Heaviside(), TruncatedGaussian(1.0), Bump()]


def params(sw, gamma=1.0, s=1.0):
    return SingleParams(gamma, Gaussian(s), sw)


def test_kernel_examples():
    for s in [0.3, 1.0, 2.5]:
        assert kernel_gaussian(0.0, s) == pytest.approx(1 / s**2, rel=1e-15)
    u = np.linspace(-2, 2, 41)
    assert np.allclose(kernel_gaussian(-u, 0.7), np.conj(kernel_gaussian(u, 0.7)), rtol=0, atol=1e-15)
    assert kernel_gaussian(1.0, 1.0) == pytest.approx(KERNEL_1_1, abs=1e-13)


@pytest.mark.parametrize("s", [0.25, 1.0, 3.0])
def test_closed_form_matches_quadrature(s):
    for u in [-1.0, -0.33, 0.0, 0.5, 2.0, 7.0]:
        assert kernel_closed_form(u, s) == pytest.approx(kernel_quadrature(u, s, 1e-12 / min(1, s**2)), abs=1e-11 / min(1, s**2))
    assert kernel_path(s) == "closed"


def test_kernel_type():
    assert KernelGaussian(1.0)(1.0) == kernel_gaussian(1.0, 1.0)
    with pytest.raises(DomainError):
        KernelGaussian(0.0)


def test_pe_exact_references():
    assert pe_exact(params(Heaviside())) == pytest.approx(PE_HEAVISIDE, abs=1e-10)
    assert pe_exact(params(TruncatedGaussian(1.0))) == pytest.approx(PE_GAUSSIAN_Q1, abs=1e-10)
    assert pe_exact(params(Bump())) == pytest.approx(PE_BUMP, abs=1e-10)
    assert pe_exact(params(Heaviside()), 1e-12) == pytest.approx(PE_HEAVISIDE, abs=1e-12)


def test_pe_exact_large_gap():
    assert pe_exact(params(Heaviside(), gamma=50.0)) < pe_exact(params(Heaviside())) / 1e3


@pytest.mark.parametrize("sw", SWITCHINGS + [TruncatedGaussian(0.25)])
@pytest.mark.parametrize("gamma,s", [(1.0, 1.0), (3.0, 0.5)])
def test_generic_and_specialized_agree(sw, gamma, s):
    p = params(sw, gamma, s)
    tol = 1e-10
    assert abs(pe_exact(p, tol, "generic") - pe_exact(p, tol)) <= 10 * tol


def test_pe_train_single_delta():
    assert pe_train(params(Heaviside()), 1) == pytest.approx(ONE_OVER_4PI2, rel=1e-14)
    assert pe_train_oracle(params(Heaviside()), 1) == pytest.approx(ONE_OVER_4PI2, rel=1e-9)
    # any s: K(0; s) / 4pi^2
    assert pe_train(params(Heaviside(), s=2.0), 1) == pytest.approx(ONE_OVER_4PI2 / 4, rel=1e-14)


def test_pe_train_two_deltas_by_hand():
    # strengths 1/2 at 1/4 and 3/4: (2 + 2 Re[e^{i/2} K(1/2)]) / 4 / 4pi^2
    hand = (2 + 2 * (np.exp(0.5j) * kernel_closed_form(0.5, 1.0)).real) / 4 * ONE_OVER_4PI2
    assert pe_train(params(Heaviside()), 2) == pytest.approx(hand, rel=1e-14)
    assert pe_train_oracle(params(Heaviside()), 2) == pytest.approx(hand, rel=1e-8)


def test_pe_train_near_exact_at_100():
    p = params(Heaviside())
    assert abs(pe_train(p, 100) - PE_HEAVISIDE) < 0.01 * PE_HEAVISIDE


@pytest.mark.parametrize("sw", SWITCHINGS)
def test_train_paths_agree(sw):
    p = params(sw, 1.3, 0.8)
    for N in [1, 2, 3, 5, 8]:
        fast = pe_train(p, N)
        naive = pe_train_naive(p, N)
        oracle = pe_train_oracle(p, N)
        assert abs(naive.imag) <= 1e-9
        assert fast == pytest.approx(naive.real, rel=1e-12)
        assert fast == pytest.approx(oracle, rel=1e-8)


@pytest.mark.parametrize("sw", SWITCHINGS)
def test_positivity(sw):
    for N in range(1, 51):
        assert pe_train(params(sw), N) >= 0


def test_other_smearings_rejected():
    with pytest.raises(DomainError):
        pe_exact(SingleParams(1.0, HardSphere(0.1), Heaviside()))
    with pytest.raises(ValueError):
        pe_exact(params(Heaviside()), form="other")
