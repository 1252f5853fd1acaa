"""Trains of sudden couplings built from a switching function."""

from __future__ import annotations

import numpy as np

from .core_model import DeltaTrain, SwitchingSpec, switching_value


def build_train(switching: SwitchingSpec, N: int) -> DeltaTrain:
    """N deltas at the panel midpoints (j - 1/2)/N with strengths xi/N."""
    return build_train_window(switching, N, 0.0, 1.0)


def build_train_window(switching: SwitchingSpec, N: int, t_start: float, dt: float) -> DeltaTrain:
    """Train for a switching stretched over [t_start, t_start + dt]."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    if not dt > 0:
        raise ValueError("dt must be positive")
    mids = (np.arange(1, N + 1) - 0.5) / N
    taus = t_start + mids * dt
    etas = switching_value(switching, mids) * (dt / N)
    return DeltaTrain(np.atleast_1d(taus), np.atleast_1d(etas))


def train_ft(train: DeltaTrain, k):
    """Exact transform sum_j eta_j exp(-i k tau_j), vectorized over k."""
    k = np.asarray(k, dtype=float)
    phase = np.exp(-1j * np.multiply.outer(k, train.taus))
    out = phase @ train.etas
    return out[()] if np.ndim(out) == 0 else out


def strength_autocorrelation(train: DeltaTrain) -> np.ndarray:
    """c[D + N - 1] = sum_j eta_j eta_{j+D} for lags D = -(N-1) .. N-1."""
    return np.correlate(train.etas, train.etas, mode="full")
