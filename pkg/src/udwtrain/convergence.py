"""
Convergence sweeps over the number of couplings.

A sweep evaluates a train observable for a list of N, compares with the
continuous-switching value and fits a power law to the relative errors.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from . import single_detector as sd
from . import two_detector as td
from .core_model import PairParams, SingleParams
from .errors import InsufficientPoints, ReferenceTooCoarse

CSV_HEADER = ["N", "value_re", "value_im", "exact_re", "exact_im", "rel_error"]
PAIR_OBSERVABLES = ("l_ii", "l_ab", "m")


@dataclass(frozen=True)
class SingleProblem:
    params: SingleParams

    @property
    def observable_id(self):
        return f"pe_{self.params.switching.name}"

    def train(self, N, tol):
        return sd.pe_train(self.params, N, tol)

    def exact(self, tol):
        return sd.pe_exact(self.params, tol)


@dataclass(frozen=True)
class PairProblem:
    params: PairParams
    observable: str = "l_ii"

    def __post_init__(self):
        if self.observable not in PAIR_OBSERVABLES:
            raise ValueError(f"observable must be one of {PAIR_OBSERVABLES}")

    @property
    def observable_id(self):
        return self.observable

    def train(self, N, tol):
        return getattr(td.pair_train(self.params, int(N), tol), self.observable)

    def exact(self, tol):
        fn = {"l_ii": td.l_ii_exact, "l_ab": td.l_ab_exact, "m": td.m_exact}[self.observable]
        return fn(self.params, tol)


Problem = Union[SingleProblem, PairProblem]


@dataclass
class ConvergenceReport:
    observable_id: str
    n_values: list
    values: list
    exact: complex
    rel_errors: list
    fitted_slope: float = float("nan")
    fit_residual: float = float("nan")
    fit_window: Tuple[int, int] = (0, 0)
    meta: dict = field(default_factory=dict)

    def abs_errors(self):
        return [abs(v - self.exact) for v in self.values]


def default_window(n_values: Sequence[int]) -> Tuple[int, int]:
    hi = max(n_values)
    return (max(min(n_values), int(math.ceil(hi / 10))), hi)


def sweep(
    problem: Problem,
    n_values: Sequence[int],
    tol: float = 1e-10,
    *,
    expected_error: Optional[float] = None,
    expected_power: Optional[float] = None,
    window: Optional[Tuple[int, int]] = None,
    workers: int = 1,
) -> ConvergenceReport:
    """Evaluate the train observable at every N and fit the error slope.

    ``expected_error`` is the smallest absolute error the sweep must
    resolve.  With ``expected_power`` it is extrapolated from the first N
    as err(N_0) (N_0 / N_max)^power; with neither, the smallest measured
    error is used.  A reference tolerance coarser than a tenth of it
    raises ReferenceTooCoarse.  The fit is attempted on ``window`` (default [N_max/10, N_max]) and skipped,
    leaving NaN, when the window holds too few points.
    """
    ns = [int(n) for n in n_values]
    if any(n < 1 for n in ns):
        raise ValueError("N must be positive")
    if any(b < a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_values must be nondecreasing")
    exact = problem.exact(tol)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda n: problem.train(n, tol), ns))
    else:
        values = [problem.train(n, tol) for n in ns]
    scale = abs(exact)
    rel = [abs(v - exact) / scale if scale > 0 else abs(v - exact) for v in values]

    if ns:
        smallest = expected_error
        if smallest is None and expected_power is not None:
            smallest = abs(values[0] - exact) * (ns[0] / ns[-1]) ** expected_power
        if smallest is None:
            errs = [abs(v - exact) for v in values]
            smallest = min(errs)
        if tol > smallest / 10:
            raise ReferenceTooCoarse(
                f"reference tolerance {tol:.3g} is not below a tenth of the error scale {smallest:.3g}"
            )

    report = ConvergenceReport(problem.observable_id, ns, values, exact, rel)
    if ns:
        win = window if window is not None else default_window(ns)
        report.fit_window = win
        try:
            report.fitted_slope, report.fit_residual = fit_slope(report, win)
        except InsufficientPoints:
            pass
    return report


def fit_slope(report: ConvergenceReport, window: Tuple[int, int]) -> Tuple[float, float]:
    """Least-squares slope of log(rel_error) against log(N) inside window.

    Returns (slope, rms residual of the fit in natural-log units).
    """
    lo, hi = window
    pts = [(n, e) for n, e in zip(report.n_values, report.rel_errors) if lo <= n <= hi]
    if len(pts) < 4:
        raise InsufficientPoints(f"need at least 4 points in window {window}, have {len(pts)}")
    if any(e <= 0 for _, e in pts):
        raise InsufficientPoints("relative errors in the fit window must be positive")
    x = np.log([n for n, _ in pts])
    y = np.log([e for _, e in pts])
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


def power_bound_holds(report: ConvergenceReport, power: float, window: Tuple[int, int], n_ref: Optional[int] = None):
    """Check rel_error(N) <= C / N^power on window with C fixed at n_ref.

    n_ref defaults to the smallest N of the window.  Returns (ok, C, worst
    ratio rel_error * N^power / C).
    """
    lo, hi = window
    pts = [(n, e) for n, e in zip(report.n_values, report.rel_errors) if lo <= n <= hi]
    if not pts:
        raise InsufficientPoints("no points in window")
    if n_ref is None:
        n_ref = pts[0][0]
    ref = [e for n, e in zip(report.n_values, report.rel_errors) if n == n_ref]
    if not ref:
        raise InsufficientPoints(f"N = {n_ref} not in the sweep")
    C = ref[0] * n_ref**power
    worst = max(e * n**power / C for n, e in pts)
    return worst <= 1.0 + 1e-12, C, worst


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def report_rows(report: ConvergenceReport):
    ex = complex(report.exact)
    for n, v, e in zip(report.n_values, report.values, report.rel_errors):
        v = complex(v)
        yield [str(n), _fmt(v.real), _fmt(v.imag), _fmt(ex.real), _fmt(ex.imag), _fmt(e)]


def emit_report_csv(report: ConvergenceReport, path) -> None:
    """Write the report as CSV (12 significant digits, '\\n' line ends)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in report_rows(report):
            w.writerow(row)


def read_report_csv(path, observable_id: str = "") -> ConvergenceReport:
    """Parse a CSV written by emit_report_csv (fit fields are not stored)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError("not a convergence report CSV")
    ns, vals, rel = [], [], []
    exact = 0j
    for row in rows[1:]:
        ns.append(int(row[0]))
        vals.append(complex(float(row[1]), float(row[2])))
        exact = complex(float(row[3]), float(row[4]))
        rel.append(float(row[5]))
    return ConvergenceReport(observable_id, ns, vals, exact, rel)
