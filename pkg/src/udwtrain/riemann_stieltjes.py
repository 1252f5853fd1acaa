"""
n-dimensional Riemann-Stieltjes sums on rectangles, for n <= 4.

Functions of n variables are passed as vectorized callables: they take
an array of shape (M, n) of points and return M values.  On a tensor grid
the alternating corner sum of every cell is the mixed finite difference
np.diff applied once along each axis, which is how sums are formed here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import CellBudgetExceeded, DomainError

MAX_DIM = 4
CELL_BUDGET = 1_000_000


@dataclass(frozen=True)
class Rect:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(x) for x in np.atleast_1d(self.lo))
        hi = tuple(float(x) for x in np.atleast_1d(self.hi))
        if len(lo) != len(hi) or not 1 <= len(lo) <= MAX_DIM:
            raise DomainError(f"rectangles must have matching dimension 1..{MAX_DIM}")
        if any(not a < b for a, b in zip(lo, hi)):
            raise DomainError("need lo[i] < hi[i] on every axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def n(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return math.prod(b - a for a, b in zip(self.lo, self.hi))

    @classmethod
    def unit(cls, n: int) -> "Rect":
        return cls((0.0,) * n, (1.0,) * n)


@dataclass(frozen=True)
class TaggedPartition:
    """Per-axis breakpoints and per-axis tags; the tag of a cell is the
    tuple of the tags of its axis intervals."""

    breakpoints: tuple
    tags: tuple

    def __post_init__(self):
        bps = tuple(np.asarray(b, dtype=float) for b in self.breakpoints)
        tgs = tuple(np.asarray(t, dtype=float) for t in self.tags)
        if len(bps) != len(tgs) or not 1 <= len(bps) <= MAX_DIM:
            raise DomainError("breakpoints and tags need one entry per axis")
        for b, t in zip(bps, tgs):
            if b.ndim != 1 or len(b) < 2 or np.any(np.diff(b) <= 0):
                raise DomainError("breakpoints must be strictly increasing with at least 2 entries")
            if t.shape != (len(b) - 1,):
                raise DomainError("one tag per axis interval")
            if np.any(t < b[:-1]) or np.any(t > b[1:]):
                raise DomainError("tags must lie in their cells")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "tags", tgs)

    @property
    def n(self) -> int:
        return len(self.breakpoints)

    @property
    def cell_count(self) -> int:
        return math.prod(len(b) - 1 for b in self.breakpoints)

    @property
    def rect(self) -> Rect:
        return Rect(tuple(b[0] for b in self.breakpoints), tuple(b[-1] for b in self.breakpoints))

    def mesh(self) -> float:
        return max(float(np.max(np.diff(b))) for b in self.breakpoints)

    @classmethod
    def uniform(cls, rect: Rect, cells_per_axis, tag: str = "mid") -> "TaggedPartition":
        counts = np.broadcast_to(np.atleast_1d(cells_per_axis), (rect.n,))
        bps, tgs = [], []
        for a, b, m in zip(rect.lo, rect.hi, counts):
            e = np.linspace(a, b, int(m) + 1)
            bps.append(e)
            if tag == "mid":
                tgs.append(0.5 * (e[1:] + e[:-1]))
            elif tag == "left":
                tgs.append(e[:-1].copy())
            elif tag == "right":
                tgs.append(e[1:].copy())
            else:
                raise ValueError(f"unknown tag rule {tag!r}")
        return cls(tuple(bps), tuple(tgs))


def _check_budget(count: int):
    if count > CELL_BUDGET:
        raise CellBudgetExceeded(f"{count} cells exceeds the budget of {CELL_BUDGET}")


def _grid_eval(g: Callable, axes: Sequence[np.ndarray]) -> np.ndarray:
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    vals = np.asarray(g(pts))
    return vals.reshape(mesh[0].shape)


def _mixed_difference(vals: np.ndarray) -> np.ndarray:
    out = vals
    for ax in range(vals.ndim):
        out = np.diff(out, axis=ax)
    return out


def delta_n(g: Callable, rect: Rect):
    """Alternating 2^n-corner sum: sum_z (-1)^{#lower coordinates of z} g(z)."""
    corners = np.array(list(itertools.product(*zip(rect.lo, rect.hi))))
    signs = np.array([(-1) ** sum(1 for i, c in enumerate(z) if c == rect.lo[i]) for z in corners])
    vals = np.asarray(g(corners))
    return np.sum(signs * vals).item()


def increments(g: Callable, partition: TaggedPartition) -> np.ndarray:
    """delta_n of g over every cell, as an array shaped like the cell grid."""
    _check_budget(partition.cell_count)
    return _mixed_difference(_grid_eval(g, partition.breakpoints))


def rs_sum(f: Callable, g: Callable, partition: TaggedPartition):
    """S(f, g; P) = sum over cells of f(tag) * delta_n g(cell)."""
    dg = increments(g, partition)
    fv = _grid_eval(f, partition.tags)
    return np.sum(fv * dg).item()


def product_function(z: np.ndarray) -> np.ndarray:
    """p(z) = prod_i z_i."""
    return np.prod(np.asarray(z), axis=-1)


# ---------------------------------------------------------------------------
# the counting function of the error bound


def _counts(N: int, z: np.ndarray) -> np.ndarray:
    # number of j in 1..N with (j - 1/2)/N <= z
    c = np.floor(N * np.asarray(z, dtype=float) + 0.5)
    return np.clip(c, 0, N)


def v_n(k: int, N: int, z) -> np.ndarray:
    """v(z) = sum_j prod_i I[(j_i - 1/2)/N, 1](z_i) - N^k prod_i z_i on [0, 1]^k.

    The indicator sum factorizes into per-axis counts.  ``z`` may be one
    k-vector or an (M, k) array of points.
    """
    if not 1 <= k <= MAX_DIM:
        raise DomainError(f"k must be in 1..{MAX_DIM}")
    z = np.asarray(z, dtype=float)
    pts = z.reshape(-1, k)
    if np.any(pts < 0) or np.any(pts > 1):
        raise DomainError("z must lie in [0, 1]^k")
    out = np.prod(_counts(N, pts), axis=1) - float(N) ** k * np.prod(pts, axis=1)
    return out[0] if z.ndim <= 1 else out


def v_n_bound(k: int, N: int) -> float:
    return k * float(N) ** (k - 1) / 2


# ---------------------------------------------------------------------------
# variation and the lemmas


def variation_levels(g: Callable, rect: Rect, levels: int) -> List[float]:
    """sum |delta_n g| over dyadic partitions with 2^l cells per axis, l = 0..levels."""
    if rect.n > 3:
        raise DomainError("variation_estimate supports n <= 3")
    if not 1 <= levels <= 8:
        raise DomainError("levels must be in 1..8")
    _check_budget((2**levels) ** rect.n)
    out = []
    for lev in range(levels + 1):
        part = TaggedPartition.uniform(rect, 2**lev)
        out.append(float(np.sum(np.abs(increments(g, part)))))
    return out


def variation_estimate(g: Callable, rect: Rect, levels: int) -> float:
    """Lower estimate of the n-dimensional variation from dyadic refinements."""
    return variation_levels(g, rect, levels)[-1]


def mixed_partial_integral(dg: Callable, rect: Rect, panels: int = 64, order: int = 8) -> float:
    """Tensor Gauss-Legendre estimate of int_R |dg|."""
    x, w = np.polynomial.legendre.leggauss(order)
    # stay inside the point budget in higher dimensions
    panels = max(1, min(panels, int(CELL_BUDGET ** (1 / rect.n)) // order))
    axes, wts = [], []
    for a, b in zip(rect.lo, rect.hi):
        e = np.linspace(a, b, panels + 1)
        h = 0.5 * np.diff(e)
        m = 0.5 * (e[1:] + e[:-1])
        axes.append((m[:, None] + h[:, None] * x).ravel())
        wts.append((h[:, None] * w).ravel())
    _check_budget(math.prod(len(a) for a in axes))
    vals = np.abs(_grid_eval(dg, axes))
    for wt in wts:
        vals = np.tensordot(wt, vals, axes=([0], [0]))
    return float(vals)


@dataclass
class LemmaReport:
    name: str
    lhs: complex
    rhs: complex
    residual: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.residual <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: residual {self.residual:.3e} (tol {self.tol:.1e})"


def verify_lemma1(f: Callable, g: Callable, rect: Rect, mesh_levels: int, tol: float, name: str = "lemma1") -> LemmaReport:
    """Integration by parts: int df g = (-1)^n int dg f, with f zero on the boundary.

    Both sums use the uniform dyadic mesh 2^-mesh_levels (relative to each
    side) with midpoint tags.
    """
    part = TaggedPartition.uniform(rect, 2**mesh_levels)
    lhs = rs_sum(g, f, part)
    rhs = rs_sum(f, g, part)
    res = abs(lhs - (-1) ** rect.n * rhs)
    return LemmaReport(name, lhs, rhs, float(res), tol)


def verify_lemma2(f: Callable, g: Callable, rect: Rect, levels: int, name: str = "lemma2") -> LemmaReport:
    """|int dg f| <= sup|f| Var(g); the residual is the violation (0 when it holds)."""
    part = TaggedPartition.uniform(rect, 2**levels)
    lhs = abs(rs_sum(f, g, part))
    sup_f = float(np.max(np.abs(_grid_eval(f, part.tags))))
    rhs = sup_f * variation_estimate(g, rect, levels)
    return LemmaReport(name, lhs, rhs, max(0.0, lhs - rhs * (1 + 1e-12)), 0.0)


def lemma3_tolerance(levels: int) -> float:
    """Relative tolerance for the variation identity at a dyadic level.

    The dyadic sums miss O(h^2) near sign changes of the mixed partial;
    on the built-in functions the relative shortfall stays below 4^(1-l),
    so the allowance is max(1%, 4^(1-l)).
    """
    return max(0.01, 4.0 ** (1 - levels))


def verify_lemma3(g: Callable, dg: Callable, rect: Rect, levels: int, tol: Optional[float] = None, name: str = "lemma3") -> LemmaReport:
    """Var(g) = int |d^n g / dz_1..dz_n|, compared in relative terms."""
    var = variation_estimate(g, rect, levels)
    ref = mixed_partial_integral(dg, rect)
    tol = lemma3_tolerance(levels) if tol is None else tol
    return LemmaReport(name, var, ref, abs(var - ref) / abs(ref), tol)
