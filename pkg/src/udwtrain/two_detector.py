"""
Second-order state of two spacelike-separated hard-sphere detectors.

With both detectors switched on over the same unit interval, the
lambda^2 block of the joint density matrix in the basis {gg, ge, eg, ee}
is built from three numbers: the local term L (equal for both
detectors), the cross term L_ab and the coherence M.  Exact values use
radial integrals; train values reduce the coupling double sums to lag
sums over the transforms

    J_m(w) = int_0^inf k^m F(k r)^2 exp(i w k) dk,   m = 0, 1,

computed from a fixed Gauss-Legendre body plus an exact analytic tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import special_quadrature as sq
from .core_model import Heaviside, PairParams, hard_sphere_profile, switching_ft
from .delta_train import build_train, strength_autocorrelation, train_ft
from .errors import DomainError

FOUR_PI_SQ = 4 * math.pi**2

# body of J_m  on [0, BODY_X / r]; the analytic tail covers the rest
BODY_X = 30.0
ORACLE_X = 20.0
_GL_NODES, _GL_WEIGHTS = leggauss(16)


@dataclass(frozen=True)
class PairState2:
    """Per-lambda^2 second-order terms.  l_ii is L_AA = L_BB."""

    l_ii: float
    l_ab: float
    m: complex

    def as_tuple(self):
        return (self.l_ii, self.l_ab, self.m)


# ---------------------------------------------------------------------------
# exact integrals


def _heaviside_sq(x):
    """|xi(x)|^2 for the unit Heaviside switching, 4 sin^2(x/2) / x^2."""
    return np.sinc(x / (2 * np.pi)) ** 2


def _profile_sq(k, r):
    return hard_sphere_profile(k * r) ** 2


def _settings(tol, power):
    return sq.QuadSettings(abs_tol=tol, tail_cutoff_policy=sq.AlgebraicDecay(power))


def _check_gamma(pair):
    if not pair.gamma > 0:
        raise DomainError("M needs gamma > 0")


def l_ii_exact(pair: PairParams, tol: float = 1e-10, form: str = "specialized") -> float:
    """L_AA / lambda^2 = (1/4pi^2) int k |xi(k + gamma)|^2 F^2 dk."""
    g, r = pair.gamma, pair.r
    if form == "specialized" and isinstance(pair.switching, Heaviside):
        def f(k):
            return k * _heaviside_sq(k + g) * _profile_sq(k, r)
    else:
        sw = pair.switching

        def f(k):
            return k * np.abs(switching_ft(sw, k + g, tol)) ** 2 * _profile_sq(k, r)

    val, _ = sq.integrate_semi_infinite(f, _settings(tol * FOUR_PI_SQ, 5.0), frequency=1 + 2 * r)
    return val.real / FOUR_PI_SQ


def l_ab_exact(pair: PairParams, tol: float = 1e-10, form: str = "specialized") -> float:
    """L_AB / lambda^2 = (1/(4pi^2 d)) int sin(k d) |xi(k + gamma)|^2 F^2 dk."""
    g, r, d = pair.gamma, pair.r, pair.d
    if form == "specialized" and isinstance(pair.switching, Heaviside):
        def f(k):
            return np.sin(k * d) * _heaviside_sq(k + g) * _profile_sq(k, r)
    else:
        sw = pair.switching

        def f(k):
            return np.sin(k * d) * np.abs(switching_ft(sw, k + g, tol)) ** 2 * _profile_sq(k, r)

    scale = FOUR_PI_SQ * d
    val, _ = sq.integrate_semi_infinite(f, _settings(tol * scale, 6.0), frequency=d + 1 + 2 * r)
    return val.real / scale


def m_ratio(k, gamma):
    """(cos gamma - cos k) / (k^2 - gamma^2), regular at k = gamma.

    Written as sinc((k+gamma)/2) sinc((k-gamma)/2) / 2, which has no
    cancellation anywhere.
    """
    k = np.asarray(k, dtype=float)
    return 0.5 * np.sinc((k + gamma) / (2 * np.pi)) * np.sinc((k - gamma) / (2 * np.pi))


def m_exact(pair: PairParams, tol: float = 1e-10, form: str = "specialized") -> complex:
    """M / lambda^2 = -(1/(4 pi^2 d)) int sin(k d) xi(k - gamma) conj(xi(k + gamma)) F^2 dk.

    For Heaviside switching this is
    -exp(i gamma) / (2 pi^2 d) int sin(k d) (cos gamma - cos k) / (k^2 - gamma^2) F^2 dk.
    """
    _check_gamma(pair)
    g, r, d = pair.gamma, pair.r, pair.d
    if form == "specialized" and isinstance(pair.switching, Heaviside):
        scale = 2 * math.pi**2 * d
        val, _ = sq.integrate_semi_infinite(
            lambda k: np.sin(k * d) * m_ratio(k, g) * _profile_sq(k, r),
            _settings(tol * scale, 6.0),
            frequency=d + 1 + 2 * r,
        )
        return complex(-np.exp(1j * g) * val.real / scale)
    sw = pair.switching
    scale = FOUR_PI_SQ * d

    def f(k):
        return np.sin(k * d) * switching_ft(sw, k - g, tol) * np.conj(switching_ft(sw, k + g, tol)) * _profile_sq(k, r)

    val, _ = sq.integrate_semi_infinite(f, _settings(tol * scale, 6.0), frequency=d + 1 + 2 * r)
    return complex(-val / scale)


def pair_exact(pair: PairParams, tol: float = 1e-10) -> PairState2:
    return PairState2(l_ii_exact(pair, tol), l_ab_exact(pair, tol), m_exact(pair, tol))


def l_ii_printed_ir_sensitivity(pair: PairParams, kappa_min: float = 1e-8, tol: float = 1e-10) -> dict:
    """Evaluate the local term with a 1/k (instead of k/(k+gamma)^2) weight.

    (1/pi^2) int_{kappa_min}^inf sin^2((k+gamma)/2) / k  F^2 dk diverges
    logarithmically as kappa_min -> 0 whenever sin(gamma/2) != 0.  Values
    are returned for kappa_min / 2, kappa_min and 2 kappa_min; the spread
    shows the cutoff dependence (about sin^2(gamma/2) ln 2 / pi^2 per
    doubling).
    """
    g, r = pair.gamma, pair.r

    def f(k):
        return np.sin((k + g) / 2) ** 2 / k * _profile_sq(k, r)

    # [1, inf) by the standard route, [kmin, 1] in the variable t = log k
    hi, _ = sq.integrate_semi_infinite(
        lambda k: f(k + 1.0), _settings(tol * math.pi**2, 5.0), frequency=1 + 2 * r
    )
    out = {}
    for km in (kappa_min / 2, kappa_min, 2 * kappa_min):
        lo = sq.integrate_interval(
            lambda t: f(np.exp(t)) * np.exp(t),
            np.linspace(math.log(km), 0.0, 40),
            tol * math.pi**2,
        )
        out[km] = (lo.value.real + hi.real) / math.pi**2
    return out


# ---------------------------------------------------------------------------
# lag transforms of the hard-sphere profile


class HardSphereTransform:
    """J_m(w) for |w| <= w_max, body by fixed Gauss-Legendre panels."""

    def __init__(self, r: float, w_max: float, body_x: float = BODY_X):
        self.r = float(r)
        self.K = body_x / self.r
        # keep the phase advance per 16-node panel below 2 radians
        width = min(0.5 / self.r, 2.0 / (w_max + 2 * self.r))
        n = int(math.ceil(self.K / width))
        edges = np.linspace(0.0, self.K, n + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        self.nodes = (mid[:, None] + half[:, None] * _GL_NODES).ravel()
        self.weights = (half[:, None] * _GL_WEIGHTS).ravel() * _profile_sq(self.nodes, self.r)

    def __call__(self, m: int, w):
        w = np.asarray(w, dtype=float)
        flat = w.ravel()
        wk = self.weights * self.nodes**m
        body = np.exp(1j * np.multiply.outer(flat, self.nodes)) @ wk
        tail = sq.hard_sphere_tail(m, flat, self.K, self.r)
        return (body + tail).reshape(w.shape)


@lru_cache(maxsize=32)
def _transform(r: float, w_max: float) -> HardSphereTransform:
    return HardSphereTransform(r, w_max)


@lru_cache(maxsize=4096)
def pair_train(pair: PairParams, N: int, tol: float = 1e-10) -> PairState2:
    """Second-order terms for N-delta trains on both detectors.

    With lags v = D/N and strength autocorrelation c(D):
        L_ii = Re sum c e^{i gamma v} J_1(v) / (4 pi^2)
        L_ab = Re sum c e^{i gamma v} Q(v) / (4 pi^2 d)
        M    = -sum cM(D) Re Q(v) / (4 pi^2 d)
    where Q(v) = (J_0(v + d) - J_0(v - d)) / 2i and cM is the
    autocorrelation of eta_j exp(i gamma tau_j) (so the phase of each
    pair is exp(i gamma (j + j' - 1) / N)).
    """
    N = int(N)
    d, g = pair.d, pair.gamma
    train = build_train(pair.switching, N)
    c = strength_autocorrelation(train)
    v = np.arange(-(N - 1), N) / N
    J = _transform(pair.r, 1.0 + d)
    phase = np.exp(1j * g * v)
    j1 = J(1, v)
    q = (J(0, v + d) - J(0, v - d)) / 2j
    l_ii = float(np.sum(c * phase * j1).real) / FOUR_PI_SQ
    l_ab = float(np.sum(c * phase * q).real) / (FOUR_PI_SQ * d)
    a = train.etas * np.exp(1j * g * train.taus)
    cm = np.convolve(a, a[::-1])
    m = complex(-np.sum(cm * q.real) / (FOUR_PI_SQ * d))
    return PairState2(l_ii, l_ab, m)


def pair_train_oracle(pair: PairParams, N: int, tol: float = 1e-12) -> PairState2:
    """Train values from the exact radial formulas with the train transform.

    The body [0, ORACLE_X / r] is integrated adaptively; beyond it every
    product of train transforms is a finite sum of exponentials, so the
    tail is summed exactly term by term.
    """
    N = int(N)
    d, g, r = pair.d, pair.gamma, pair.r
    train = build_train(pair.switching, N)
    K = ORACLE_X / r
    span = float(train.taus[-1] - train.taus[0])
    edges = np.linspace(0.0, K, int(math.ceil(K / (math.pi / (4 * (span + d + 2 * r))))) + 1)
    prof = lambda k: _profile_sq(k, r)  # noqa: E731

    def f_ii(k):
        return k * np.abs(train_ft(train, k + g)) ** 2 * prof(k)

    def f_ab(k):
        return np.sin(k * d) * np.abs(train_ft(train, k + g)) ** 2 * prof(k)

    def f_m(k):
        return np.sin(k * d) * train_ft(train, k - g) * np.conj(train_ft(train, k + g)) * prof(k)

    body_ii = sq.integrate_interval(f_ii, edges, tol * FOUR_PI_SQ).value
    body_ab = sq.integrate_interval(f_ab, edges, tol * FOUR_PI_SQ * d).value
    body_m = sq.integrate_interval(f_m, edges, tol * FOUR_PI_SQ * d).value

    # tail: sum over all coupling pairs (j, j'), dt = tau_j - tau_j'
    eta, tau = train.etas, train.taus
    w2 = np.outer(eta, eta).ravel()
    dt = np.subtract.outer(tau, tau).ravel()
    ts = np.add.outer(tau, tau).ravel()
    t1 = sq.hard_sphere_tail(1, -dt, K, r)
    sin_tail = (sq.hard_sphere_tail(0, d - dt, K, r) - sq.hard_sphere_tail(0, -d - dt, K, r)) / 2j
    tail_ii = np.sum(w2 * np.exp(-1j * g * dt) * t1)
    tail_ab = np.sum(w2 * np.exp(-1j * g * dt) * sin_tail)
    tail_m = np.sum(w2 * np.exp(1j * g * ts) * sin_tail)

    l_ii = float((body_ii + tail_ii).real) / FOUR_PI_SQ
    l_ab = float((body_ab + tail_ab).real) / (FOUR_PI_SQ * d)
    m = complex(-(body_m + tail_m) / (FOUR_PI_SQ * d))
    return PairState2(l_ii, l_ab, m)


# ---------------------------------------------------------------------------
# density matrix


def assemble_rho(state: PairState2, lambda_sq: float) -> np.ndarray:
    """rho = diag(1,0,0,0) + lambda^2 * block in the basis {gg, ge, eg, ee}.

    block = [[-2L, 0, 0, M*], [0, L, L_ab*, 0], [0, L_ab, L, 0], [M, 0, 0, 0]].
    The gg entry is nudged by at most a few ulps so that the floating
    point trace is exactly one.
    """
    if not lambda_sq > 0:
        raise DomainError("lambda_sq must be positive")
    a = lambda_sq * float(state.l_ii)
    ab = lambda_sq * complex(state.l_ab)
    m = lambda_sq * complex(state.m)
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = rho[2, 2] = a
    rho[2, 1] = ab
    rho[1, 2] = np.conj(ab)
    rho[3, 0] = m
    rho[0, 3] = np.conj(m)
    g = 1.0 - 2.0 * a
    for _ in range(64):
        tr = ((g + a) + a) + 0.0
        if tr == 1.0:
            break
        g = np.nextafter(g, np.inf if tr < 1.0 else -np.inf)
    rho[0, 0] = g
    return rho


def second_order_block(state: PairState2) -> np.ndarray:
    """The lambda^2 coefficient block (traceless, Hermitian)."""
    lab = complex(state.l_ab)
    m = complex(state.m)
    L = float(state.l_ii)
    return np.array(
        [
            [-2 * L, 0, 0, np.conj(m)],
            [0, L, np.conj(lab), 0],
            [0, lab, L, 0],
            [m, 0, 0, 0],
        ],
        dtype=complex,
    )
