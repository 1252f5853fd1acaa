"""
Excitation probability of one static detector with Gaussian smearing.

Every result is P_e / lambda^2 in units where the switching lasts one
time unit.  The train value reduces the double sum over coupling pairs
to a single sum over index lags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from . import special_quadrature as sq
from .core_model import (
    Bump,
    Gaussian,
    Heaviside,
    SingleParams,
    TruncatedGaussian,
    switching_ft,
)
from .delta_train import build_train, strength_autocorrelation, train_ft
from .errors import DomainError

FOUR_PI_SQ = 4 * math.pi**2


@dataclass(frozen=True)
class KernelGaussian:
    """The lag kernel  K(u; s) = int_0^inf k exp(-k^2 s^2 / 2) exp(i k u) dk."""

    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise DomainError("kernel width must be positive")

    def __call__(self, u, tol: float = 1e-12):
        return kernel_gaussian(u, self.s, tol)


def kernel_closed_form(u, s: float):
    """Closed form of the lag kernel.

    K(u; s) = (1/s^2) [1 - sqrt(2) (u/s) D(u / (sqrt(2) s))
                       + i sqrt(pi/2) (u/s) exp(-u^2 / (2 s^2))]
    with D the Dawson function, i.e. exp(-x^2) erfi(x) sqrt(pi)/2.
    """
    u = np.asarray(u, dtype=float)
    v = u / s
    x = v / math.sqrt(2)
    out = (1 - math.sqrt(2) * v * special.dawsn(x) + 1j * math.sqrt(math.pi / 2) * v * np.exp(-(x**2))) / s**2
    return out[()] if out.ndim == 0 else out


def kernel_quadrature(u: float, s: float, tol: float):
    settings = sq.QuadSettings(abs_tol=tol, tail_cutoff_policy=sq.GaussianDamped(s))
    val, _ = sq.integrate_semi_infinite(
        lambda k: k * np.exp(-(k**2) * s**2 / 2) * np.exp(1j * k * u),
        settings,
        frequency=abs(u),
    )
    return val


@lru_cache(maxsize=64)
def kernel_path(s: float) -> str:
    """'closed' if the closed form matches quadrature on a 100-point u grid."""
    scale = max(1.0, 1.0 / s**2)
    grid = np.linspace(-1.0, 1.0, 100)
    closed = kernel_closed_form(grid, s)
    quad = np.array([kernel_quadrature(u, s, 1e-12 * scale) for u in grid])
    worst = float(np.max(np.abs(closed - quad)))
    return "closed" if worst <= 1e-10 * scale else "quadrature"


def kernel_gaussian(u, s: float, tol: float = 1e-12):
    """Lag kernel, closed form when validated for this s, else quadrature."""
    if not s > 0:
        raise DomainError("s must be positive")
    if not tol > 0:
        raise DomainError("tol must be positive")
    if kernel_path(float(s)) == "closed":
        return kernel_closed_form(u, s)
    u = np.asarray(u, dtype=float)
    out = np.array([kernel_quadrature(x, s, tol) for x in u.ravel()]).reshape(u.shape)
    return out[()] if out.ndim == 0 else out


def _gaussian_width(params: SingleParams) -> float:
    if not isinstance(params.smearing, Gaussian):
        raise DomainError("single-detector observables need Gaussian smearing")
    return params.smearing.s


def _bump_tol(tol: float, s: float) -> float:
    # an error delta in the transform moves P_e by at most ~0.011 delta / s^2
    return max(10 * tol * s**2, 3e-15)


def _radial_integral(integrand, s: float, tol: float) -> float:
    settings = sq.QuadSettings(abs_tol=tol * FOUR_PI_SQ, tail_cutoff_policy=sq.GaussianDamped(s))
    val, _ = sq.integrate_semi_infinite(integrand, settings, frequency=0.0)
    return val.real / FOUR_PI_SQ


def pe_exact(params: SingleParams, tol: float = 1e-10, form: str = "specialized") -> float:
    """Second-order excitation probability for a continuous switching.

    ``form="specialized"`` uses the switching-specific radial integrand;
    ``form="generic"`` integrates k exp(-k^2 s^2/2) |xi(k + gamma)|^2.
    """
    s = _gaussian_width(params)
    g = params.gamma
    sw = params.switching
    damp = lambda k: k * np.exp(-(k**2) * s**2 / 2)  # noqa: E731

    if form == "generic":
        btol = _bump_tol(tol, s)
        return _radial_integral(lambda k: damp(k) * np.abs(switching_ft(sw, k + g, btol)) ** 2, s, tol)
    if form != "specialized":
        raise ValueError(f"unknown form {form!r}")

    if isinstance(sw, Heaviside):

        def f(k):
            x = k + g
            safe = np.where(x == 0, 1.0, x)
            ratio = np.where(x == 0, 0.25, np.sin(safe / 2) ** 2 / safe**2)
            return damp(k) * 4 * ratio

        return _radial_integral(f, s, tol)
    if isinstance(sw, TruncatedGaussian):
        q = sw.q
        x = 1 / (2 * q)

        def f(k):
            y = (k + g) * q / 2
            # exp(-y^2) Re erf(x + iy); the direct product is used wherever it cannot overflow
            factor = sq.scaled_re_erf(x, y)
            near = np.abs(y) <= 20
            factor[near] = np.exp(-y[near] ** 2) * sq.erf_complex(x + 1j * y[near]).real
            return damp(k) * math.pi * q**2 * factor**2

        return _radial_integral(f, s, tol)
    if isinstance(sw, Bump):
        btol = _bump_tol(tol, s)
        return _radial_integral(lambda k: damp(k) * np.abs(sq.bump_ft(k + g, btol)) ** 2, s, tol)
    raise TypeError(f"unknown switching {sw!r}")


def pe_train(params: SingleParams, N: int, tol: float = 1e-10) -> float:
    """Excitation probability for the N-delta train.

    P(N) = Re sum_D c(D) exp(i gamma D / N) K(D / N; s) / (4 pi^2), where c
    is the autocorrelation of the strengths.  Only 2N - 1 kernel values
    are needed.
    """
    s = _gaussian_width(params)
    train = build_train(params.switching, N)
    c = strength_autocorrelation(train)
    lags = np.arange(-(N - 1), N) / N
    kern = kernel_gaussian(lags, s, tol)
    total = np.sum(c * np.exp(1j * params.gamma * lags) * kern)
    return float(total.real) / FOUR_PI_SQ


def pe_train_naive(params: SingleParams, N: int, tol: float = 1e-10) -> complex:
    """Unreduced double sum over coupling pairs; returns the complex total."""
    s = _gaussian_width(params)
    train = build_train(params.switching, N)
    diff = np.subtract.outer(train.taus, train.taus)
    kern = kernel_gaussian(diff, s, tol)
    w = np.outer(train.etas, train.etas)
    return complex(np.sum(w * np.exp(1j * params.gamma * diff) * kern)) / FOUR_PI_SQ


def pe_train_oracle(params: SingleParams, N: int, tol: float = 1e-10) -> float:
    """Train value from the exact radial formula with the train's transform."""
    s = _gaussian_width(params)
    train = build_train(params.switching, N)
    g = params.gamma
    span = float(train.taus[-1] - train.taus[0])
    settings = sq.QuadSettings(abs_tol=tol * FOUR_PI_SQ, tail_cutoff_policy=sq.GaussianDamped(s))
    val, _ = sq.integrate_semi_infinite(
        lambda k: k * np.exp(-(k**2) * s**2 / 2) * np.abs(train_ft(train, k + g)) ** 2,
        settings,
        frequency=span,
    )
    return val.real / FOUR_PI_SQ
