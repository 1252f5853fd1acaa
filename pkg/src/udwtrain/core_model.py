"""
Problem definitions in dimensionless units.

Time is measured in units of the switching duration (T = 1), so every
switching lives on [0, 1].  Lengths are measured in the same unit: a
Gaussian smearing has width ``s`` and a hard sphere has radius ``r``.
All observables are reported per unit of the squared coupling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError
from . import special_quadrature as sq


@dataclass(frozen=True)
class Heaviside:
    """Indicator of the open interval (0, 1)."""

    name = "heaviside"


@dataclass(frozen=True)
class TruncatedGaussian:
    """exp(-(t - 1/2)^2 / q^2) restricted to (0, 1)."""

    q: float
    name = "gaussian"

    def __post_init__(self):
        if not (np.isfinite(self.q) and self.q > 0):
            raise DomainError(f"TruncatedGaussian needs q > 0, got {self.q!r}")


@dataclass(frozen=True)
class Bump:
    """The smooth compactly supported bump exp(-1 / (4 t (1 - t)))."""

    name = "bump"


SwitchingSpec = Union[Heaviside, TruncatedGaussian, Bump]


@dataclass(frozen=True)
class Gaussian:
    """Gaussian smearing of width s; |F(k)|^2 = exp(-k^2 s^2 / 2)."""

    s: float

    def __post_init__(self):
        if not (np.isfinite(self.s) and self.s > 0):
            raise DomainError(f"Gaussian smearing needs s > 0, got {self.s!r}")


@dataclass(frozen=True)
class HardSphere:
    """Normalized uniform ball of radius r."""

    r: float

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r > 0):
            raise DomainError(f"HardSphere needs r > 0, got {self.r!r}")


SmearingSpec = Union[Gaussian, HardSphere]

# rounding allowance on the separation condition (1.2 - 2 * 0.1 is not exactly 1)
SPACELIKE_SLACK = 1e-12


@dataclass(frozen=True)
class SingleParams:
    gamma: float
    smearing: SmearingSpec
    switching: SwitchingSpec

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma >= 0):
            raise DomainError(f"gamma must be >= 0, got {self.gamma!r}")


@dataclass(frozen=True)
class PairParams:
    """Two identical static hard-sphere detectors a distance d apart.

    The switching regions must not be causally connected: 1 <= d - 2r.
    The boundary d - 2r = 1 (touching light cones, e.g. d = 1.2, r = 0.1)
    is accepted; anything below it by more than rounding is rejected.
    """

    gamma: float
    d: float
    r: float
    switching: SwitchingSpec = Heaviside()

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma >= 0):
            raise DomainError(f"gamma must be >= 0, got {self.gamma!r}")
        if not (self.d > 0 and self.r > 0):
            raise DomainError("d and r must be positive")
        if self.d - 2.0 * self.r < 1.0 - SPACELIKE_SLACK:
            raise DomainError(
                f"detectors not spacelike separated: need d - 2r >= 1, got d - 2r = {self.d - 2 * self.r:g}"
            )

    @property
    def smearing(self) -> HardSphere:
        return HardSphere(self.r)


@dataclass(frozen=True)
class DeltaTrain:
    """Coupling times and strengths of a train of sudden couplings."""

    taus: np.ndarray
    etas: np.ndarray

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=float)
        etas = np.asarray(self.etas, dtype=float)
        if taus.ndim != 1 or taus.shape != etas.shape:
            raise ValueError("taus and etas must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(taus)) and np.all(np.isfinite(etas))):
            raise ValueError("train entries must be finite")
        if np.any(np.diff(taus) <= 0):
            raise ValueError("taus must be strictly increasing")
        taus.setflags(write=False)
        etas.setflags(write=False)
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "etas", etas)

    def __len__(self):
        return len(self.taus)

    # arrays are not hashable; equality is element-wise
    def __eq__(self, other):
        if not isinstance(other, DeltaTrain):
            return NotImplemented
        return np.array_equal(self.taus, other.taus) and np.array_equal(self.etas, other.etas)

    def __hash__(self):
        return hash((self.taus.tobytes(), self.etas.tobytes()))


def switching_value(spec: SwitchingSpec, t):
    """xi(t), exactly zero outside (0, 1).  Accepts scalars or arrays."""
    t = np.asarray(t, dtype=float)
    inside = (t > 0) & (t < 1)
    out = np.zeros_like(t)
    if isinstance(spec, Heaviside):
        out[inside] = 1.0
    elif isinstance(spec, TruncatedGaussian):
        out[inside] = np.exp(-((t[inside] - 0.5) ** 2) / spec.q**2)
    elif isinstance(spec, Bump):
        out = sq.bump(t)
    else:
        raise TypeError(f"unknown switching {spec!r}")
    return out[()] if out.ndim == 0 else out


def switching_ft(spec: SwitchingSpec, k, tol: float = 1e-12):
    """Fourier transform  int xi(t) exp(-i k t) dt.

    Heaviside and the truncated Gaussian use closed forms; the bump is
    integrated numerically to absolute accuracy ``tol``.
    """
    k = np.asarray(k, dtype=float)
    if isinstance(spec, Heaviside):
        # 2 e^{-ik/2} sin(k/2) / k, written with sinc so k = 0 is regular
        out = np.exp(-0.5j * k) * np.sinc(k / (2 * np.pi))
    elif isinstance(spec, TruncatedGaussian):
        q = spec.q
        x = 1.0 / (2 * q)
        y = k * q / 2
        out = np.sqrt(np.pi) * q * np.exp(-0.5j * k) * sq.scaled_re_erf(x, y)
    elif isinstance(spec, Bump):
        if tol <= 0:
            raise DomainError("tol must be positive")
        out = sq.bump_ft(k, tol)
    else:
        raise TypeError(f"unknown switching {spec!r}")
    out = np.asarray(out, dtype=complex)
    return out[()] if out.ndim == 0 else out


def switching_integral(spec: SwitchingSpec, tol: float = 1e-13) -> float:
    """int_0^1 xi(t) dt, the transform at k = 0."""
    return float(np.real(switching_ft(spec, 0.0, tol)))


def smearing_ft(spec: SmearingSpec, kappa):
    """Fourier profile F(kappa) of the smearing."""
    kappa = np.asarray(kappa, dtype=float)
    if isinstance(spec, Gaussian):
        out = np.exp(-(kappa**2) * spec.s**2 / 4)
    elif isinstance(spec, HardSphere):
        out = hard_sphere_profile(kappa * spec.r)
    else:
        raise TypeError(f"unknown smearing {spec!r}")
    return out[()] if out.ndim == 0 else out


def hard_sphere_profile(x):
    """3 (sin x - x cos x) / x^3, with a series near x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3
    xs = x[small]
    out[small] = 1 - xs**2 / 10 + xs**4 / 280
    xl = x[~small]
    out[~small] = 3 * (np.sin(xl) - xl * np.cos(xl)) / xl**3
    return out
