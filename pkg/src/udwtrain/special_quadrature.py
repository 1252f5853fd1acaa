"""
Special functions and semi-infinite quadrature.

The error functions are thin wrappers over ``scipy.special`` (which
implements the Faddeeva function) with an explicit supported strip.
Integration uses an adaptive 21-point Gauss-Kronrod rule evaluated on
many panels at once, so integrands must accept and return numpy arrays.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
from scipy import special

from .errors import DomainError, NumericFailure

ERF_STRIP = 30.0

# Kronrod nodes on [0, 1]; the odd entries are the 10-point Gauss nodes.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980088355,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# full symmetric node set on [-1, 1] and matching weights
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(21)
G_WEIGHTS[1:10:2] = _WG
G_WEIGHTS[11:20:2] = _WG[::-1]
_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# error functions


def erf_complex(z):
    """erf(z) for complex z with |Im z| <= 30.

    Values overflow double precision once Im(z)^2 - Re(z)^2 exceeds about
    709, so the finite strip is smaller than the accepted one.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z.imag) > ERF_STRIP):
        raise DomainError(f"erf_complex supports |Im z| <= {ERF_STRIP}")
    out = special.erf(z)
    return out[()] if out.ndim == 0 else out


def erfi_real(x):
    """Imaginary error function -i erf(ix) for real |x| <= 30."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > ERF_STRIP):
        raise DomainError(f"erfi_real supports |x| <= {ERF_STRIP}")
    out = special.erfi(x)
    return out[()] if out.ndim == 0 else out


def scaled_re_erf(x, y):
    """exp(-y^2) * Re erf(x + i y) for real x and y, without overflow.

    For large |y| the identity
        exp(-y^2) erf(x+iy) = exp(-y^2) - exp(-x^2 - 2ixy) w(-y + ix)
    keeps every factor bounded when x > 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    out = np.empty(x.shape)
    small = np.abs(y) <= 5.0
    xs, ys = x[small], y[small]
    out[small] = np.exp(-ys**2) * special.erf(xs + 1j * ys).real
    xl, yl = x[~small], y[~small]
    sgn = np.where(xl >= 0, 1.0, -1.0)
    xa = np.abs(xl)
    w = special.wofz(-yl + 1j * xa)
    big = np.exp(-yl**2) - np.exp(-xa**2 - 2j * xa * yl) * w
    out[~small] = sgn * big.real
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# exponential integrals and oscillatory power tails


def _expn_series(n, z):
    # E_n(z) = (-z)^{n-1}/(n-1)! (psi(n) - log z) - sum_{k != n-1} (-z)^k / ((k-n+1) k!)
    psi = -np.euler_gamma + sum(1.0 / k for k in range(1, n))
    zero = z == 0
    zz = np.where(zero, 1.0, z)
    lead = (-zz) ** (n - 1) / math.factorial(n - 1) * (psi - np.log(zz))
    total = np.zeros_like(zz)
    term = np.ones_like(zz)  # (-z)^k / k!
    for k in range(0, 60):
        if k > 0:
            term = term * (-zz) / k
        if k != n - 1:
            total = total + term / (k - n + 1)
    out = lead - total
    if n > 1:
        out = np.where(zero, 1.0 / (n - 1), out)
    return out


def _expn_cf(n, z):
    # modified Lentz evaluation of the continued fraction for E_n
    tiny = 1e-300
    b = z + n
    c = np.full_like(z, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(z.shape, dtype=bool)
    for i in range(1, 5000):
        an = -i * (n - 1 + i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        de = c * d
        h = np.where(done, h, h * de)
        done |= np.abs(de - 1.0) < 1e-16
        if done.all():
            return h * np.exp(-z)
    raise NumericFailure("E_n continued fraction did not converge")


def expn_complex(n: int, z):
    """Generalized exponential integral E_n(z) for integer n >= 1, Re z >= 0."""
    if n < 1:
        raise DomainError("expn_complex needs n >= 1")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(z.real < 0):
        raise DomainError("expn_complex needs Re z >= 0")
    if n == 1 and np.any(z == 0):
        raise DomainError("E_1 diverges at 0")
    out = np.empty_like(z)
    near = np.abs(z) <= 1.5
    if near.any():
        out[near] = _expn_series(n, z[near])
    if (~near).any():
        out[~near] = _expn_cf(n, z[~near])
    return out


def power_exp_tail(n: int, b, X: float):
    """int_X^inf x^{-n} exp(i b x) dx = X^{1-n} E_n(-i b X) for X > 0."""
    b = np.asarray(b, dtype=float)
    vals = expn_complex(n, -1j * b.ravel() * X)
    return (X ** (1 - n) * vals).reshape(b.shape)


def hard_sphere_tail(m: int, w, K: float, r: float):
    """Exact value of int_K^inf k^m F(kr)^2 exp(i w k) dk, m in {0, 1}.

    F is the hard-sphere profile.  Expanding its square,
        x^m F^2 = 9 [x^{m-6}/2 - x^{m-6} cos(2x)/2 - x^{m-5} sin(2x)
                     + x^{m-4}/2 + x^{m-4} cos(2x)/2],
    reduces the tail to power-exponential integrals.
    """
    if m not in (0, 1):
        raise DomainError("hard_sphere_tail supports m = 0, 1")
    w = np.asarray(w, dtype=float)
    X = K * r
    beta = w / r

    def g(n, b):
        return power_exp_tail(n, b, X)

    def cos_part(n):
        return 0.5 * (g(n, beta + 2) + g(n, beta - 2))

    def sin_part(n):
        return (g(n, beta + 2) - g(n, beta - 2)) / 2j

    n6, n5, n4 = 6 - m, 5 - m, 4 - m
    val = 0.5 * g(n6, beta) - 0.5 * cos_part(n6) - sin_part(n5) + 0.5 * g(n4, beta) + 0.5 * cos_part(n4)
    return 9.0 * r ** (-m - 1) * val


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod


@dataclass(frozen=True)
class GaussianDamped:
    """Integrand bounded by A * k * exp(-k^2 width^2 / 2) for large k."""

    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError("GaussianDamped width must be positive")


@dataclass(frozen=True)
class AlgebraicDecay:
    """Integrand bounded by C / k^power for large k."""

    power: float

    def __post_init__(self):
        if not self.power > 1:
            raise DomainError("AlgebraicDecay power must exceed 1")


TailPolicy = Union[GaussianDamped, AlgebraicDecay]


@dataclass(frozen=True)
class QuadSettings:
    abs_tol: float = 1e-10
    max_subdivisions: int = 200_000
    tail_cutoff_policy: TailPolicy = AlgebraicDecay(2.0)

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


class QuadResult(NamedTuple):
    value: complex
    err_estimate: float


def _gk_panels(f, a, b):
    """Apply the 21-point rule on every panel [a_i, b_i] at once."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * GK_NODES[None, :]
    fx = np.asarray(f(x.ravel())).reshape(x.shape)
    kron = (fx @ GK_WEIGHTS) * half
    gauss = (fx @ G_WEIGHTS) * half
    # QUADPACK-style error: scale |K - G| by the mean absolute deviation
    mean = kron / (2 * half)
    resabs = (np.abs(fx) @ GK_WEIGHTS) * np.abs(half)
    resasc = (np.abs(fx - mean[:, None]) @ GK_WEIGHTS) * np.abs(half)
    diff = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(resasc > 0, (200 * diff / resasc) ** 1.5, 0.0)
    err = np.where(resasc > 0, resasc * np.minimum(1.0, ratio), diff)
    floor = 50 * _EPS * resabs
    err = np.maximum(err, floor)
    return kron, err, floor


def integrate_interval(f: Callable, breakpoints, abs_tol: float, max_subdivisions: int = 200_000) -> QuadResult:
    """Adaptive integral of ``f`` over [breakpoints[0], breakpoints[-1]].

    Panels whose share of the error budget is exceeded are bisected, all
    in one vectorized batch per pass.  Panels already at the rounding
    floor are never split again.
    """
    edges = np.asarray(breakpoints, dtype=float)
    a, b = edges[:-1].copy(), edges[1:].copy()
    length = float(edges[-1] - edges[0])
    if length == 0:
        return QuadResult(0j, 0.0)
    total = 0j
    total_err = 0.0
    n_panels = len(a)
    while True:
        val, err, floor = _gk_panels(f, a, b)
        share = abs_tol * (b - a) / length
        ok = (err <= share) | (err <= floor * (1 + 1e-12))
        total += np.sum(val[ok])
        total_err += float(np.sum(err[ok]))
        if ok.all():
            break
        a, b = a[~ok], b[~ok]
        n_panels += len(a)
        if n_panels > max_subdivisions:
            raise NumericFailure(
                f"adaptive quadrature exceeded {max_subdivisions} subdivisions "
                f"(remaining error {float(np.sum(err[~ok])):.3g}, target {abs_tol:.3g})"
            )
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
    if total_err > abs_tol:
        raise NumericFailure(
            f"quadrature error {total_err:.3g} limited by rounding exceeds target {abs_tol:.3g}"
        )
    return QuadResult(complex(total), total_err)


def _panel_edges(lo, hi, width):
    n = max(1, int(math.ceil((hi - lo) / width)))
    return np.linspace(lo, hi, n + 1)


def _cutoff_and_bound(f, policy, tol, start):
    """Pick K so that the estimated tail beyond K is below tol / 10.

    K runs over the fixed grid start * 2^(j/8), so the cutoff chosen is
    nondecreasing as tol shrinks.
    """
    for j in range(480):
        K = start * 2.0 ** (j / 8)
        probe = np.linspace(0.5 * K, K, 257)
        fv = np.abs(np.asarray(f(probe)))
        if isinstance(policy, GaussianDamped):
            w = policy.width
            # A = max |f| / (k exp(-k^2 w^2/2)); tail <= A exp(-K^2 w^2/2) / w^2
            with np.errstate(over="ignore", invalid="ignore"):
                env = probe * np.exp(-(probe**2) * w**2 / 2)
                A = np.max(np.where(env > 0, fv / env, 0.0))
            bound = A * math.exp(-(K**2) * w**2 / 2) / w**2
        else:
            p = policy.power
            C = np.max(fv * probe**p)
            bound = C * K ** (1 - p) / (p - 1)
        if not np.isfinite(bound):
            raise NumericFailure("tail bound is not finite")
        if bound < tol / 10:
            return K, bound
    raise NumericFailure("could not find a cutoff meeting the tail bound")


def integrate_semi_infinite(
    f: Callable,
    settings: QuadSettings,
    *,
    frequency: float = 0.0,
    cutoff: Optional[float] = None,
    tail: Optional[Callable[[float], complex]] = None,
    panel_width: float = 1.0,
) -> QuadResult:
    """Integrate ``f`` over [0, inf).

    ``frequency`` is the largest angular frequency present in the
    integrand; initial panels are no wider than pi / (4 frequency).  When
    ``tail`` is given it must return the exact integral over [cutoff, inf)
    and ``cutoff`` must be set.  Otherwise the cutoff is chosen from the
    tail policy so the neglected piece stays below abs_tol / 10, and that
    bound is added to the error estimate.
    """
    tol = settings.abs_tol
    width = panel_width
    if frequency > 0:
        width = min(width, math.pi / (4 * frequency))
    if tail is not None:
        if cutoff is None:
            raise ValueError("an analytic tail needs an explicit cutoff")
        K, tail_val, tail_err = cutoff, complex(tail(cutoff)), 0.0
    else:
        policy = settings.tail_cutoff_policy
        if cutoff is None:
            start = 1.0 / policy.width if isinstance(policy, GaussianDamped) else 20.0
            K, tail_err = _cutoff_and_bound(f, policy, tol, start)
        else:
            K, tail_err = cutoff, 0.0
        tail_val = 0j
    body = integrate_interval(f, _panel_edges(0.0, K, width), 0.9 * tol, settings.max_subdivisions)
    return QuadResult(body.value + tail_val, body.err_estimate + tail_err)


# ---------------------------------------------------------------------------
# the bump switching and its transform


def bump(t):
    """exp(-1 / (4 t (1 - t))) on (0, 1), zero elsewhere."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    with np.errstate(over="ignore", divide="ignore"):
        # 1/(4t(1-t)) overflows for subnormal t; exp(-inf) = 0 is the right value
        out[inside] = np.exp(-1.0 / (4 * ti * (1 - ti)))
    return out[()] if out.ndim == 0 else out


_BUMP_CACHE: dict = {}
_BUMP_LOCK = threading.Lock()


def _bump_key(kappa, tol):
    return (float(f"{kappa:.12g}"), float(tol))


def _bump_ft_scalar(kappa, tol):
    # beta is symmetric about 1/2:  ft = 2 e^{-ik/2} int_0^{1/2} beta(1/2+u) cos(k u) du
    width = 0.5 if kappa == 0 else min(0.5, math.pi / (4 * abs(kappa)))
    res = integrate_interval(
        lambda u: bump(0.5 + u) * np.cos(kappa * u),
        _panel_edges(0.0, 0.5, width),
        tol / 2,
    )
    return 2.0 * np.exp(-0.5j * kappa) * res.value.real


def bump_ft(kappa, tol: float = 1e-13):
    """int_0^1 beta(t) exp(-i kappa t) dt with absolute error <= tol.

    Results are memoized per (kappa to 12 significant digits, tol).
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    k = np.asarray(kappa, dtype=float)
    flat = k.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for i, kv in enumerate(flat):
        key = _bump_key(kv, tol)
        val = _BUMP_CACHE.get(key)
        if val is None:
            val = _bump_ft_scalar(kv, tol)
            with _BUMP_LOCK:
                _BUMP_CACHE[key] = val
        out[i] = val
    out = out.reshape(k.shape)
    return out[()] if out.ndim == 0 else out


def clear_bump_cache():
    with _BUMP_LOCK:
        _BUMP_CACHE.clear()
