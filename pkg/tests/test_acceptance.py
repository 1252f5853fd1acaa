"""Acceptance criteria, one test each.  Tolerances are the stated ones."""

import math
import time
from functools import lru_cache

import numpy as np

from udwtrain import convergence as cv
from udwtrain.cli import parse_n_spec, rs_battery
from udwtrain.core_model import Bump, Gaussian, Heaviside, PairParams, SingleParams, TruncatedGaussian
from udwtrain.single_detector import pe_exact, pe_train, pe_train_naive, pe_train_oracle
from udwtrain.two_detector import assemble_rho, pair_train, pair_train_oracle, second_order_block

N_GRID = parse_n_spec("20:300:log16")
WINDOW = (20, 300)
PAIR = PairParams(1.0, 1.2, 0.1)


def single(sw):
    return SingleParams(1.0, Gaussian(1.0), sw)


SINGLES = {
    "heaviside": single(Heaviside()),
    "gaussian": single(TruncatedGaussian(1.0)),
    "bump": single(Bump()),
}


@lru_cache(maxsize=None)
def timed_single(name):
    t0 = time.perf_counter()
    if name == "bump":
        rep = cv.sweep(cv.SingleProblem(SINGLES[name]), N_GRID, 1e-14, expected_power=5.0, window=WINDOW)
    else:
        rep = cv.sweep(cv.SingleProblem(SINGLES[name]), N_GRID, 1e-10, window=WINDOW)
    return rep, time.perf_counter() - t0


@lru_cache(maxsize=None)
def timed_pair():
    t0 = time.perf_counter()
    reps = {obs: cv.sweep(cv.PairProblem(PAIR, obs), N_GRID, 1e-10, window=WINDOW) for obs in cv.PAIR_OBSERVABLES}
    return reps, time.perf_counter() - t0


def test_criterion_1_heaviside_slope():
    rep, dt = timed_single("heaviside")
    assert -2.3 <= rep.fitted_slope <= -1.7, f"slope {rep.fitted_slope:.4f}"
    assert dt < 10, f"runtime {dt:.1f} s"


def test_criterion_2_truncated_gaussian_slope():
    rep, dt = timed_single("gaussian")
    assert -2.3 <= rep.fitted_slope <= -1.7, f"slope {rep.fitted_slope:.4f}"
    assert dt < 30, f"runtime {dt:.1f} s"


def test_criterion_3_bump_upper_bound():
    rep, dt = timed_single("bump")
    ok, C, worst = cv.power_bound_holds(rep, 5.0, WINDOW, n_ref=20)
    assert ok, f"rel_error <= C/N^5 violated, C = {C:.4g}, worst ratio {worst:.4g}"
    assert dt < 60, f"runtime {dt:.1f} s"


def test_criterion_4_pair_rates():
    reps, dt = timed_pair()
    ok, C, worst = cv.power_bound_holds(reps["l_ii"], 2.0, WINDOW, n_ref=20)
    s_ab = reps["l_ab"].fitted_slope
    s_m = reps["m"].fitted_slope
    # slope under the alternative phase exp(i gamma (j + j') / N), for the record
    alt = cv.ConvergenceReport(
        "m_alt",
        reps["m"].n_values,
        [v * np.exp(1j * PAIR.gamma / n) for v, n in zip(reps["m"].values, reps["m"].n_values)],
        reps["m"].exact,
        [abs(v * np.exp(1j * PAIR.gamma / n) - reps["m"].exact) / abs(reps["m"].exact)
         for v, n in zip(reps["m"].values, reps["m"].n_values)],
    )
    s_alt = cv.fit_slope(alt, WINDOW)[0]
    problems = []
    if not ok:
        problems.append(f"L_ii exceeds C/N^2 (C = {C:.4g}, worst ratio {worst:.4g})")
    if not -2.4 <= s_ab <= -1.6:
        problems.append(f"L_AB slope {s_ab:.4f} outside [-2.4, -1.6]")
    if not -1.4 <= s_m <= -0.7:
        problems.append(
            f"M slope {s_m:.4f} outside [-1.4, -0.7] (train path matching the exact oracle); "
            f"with the phase exp(i gamma (j+j')/N) the slope would be {s_alt:.4f}"
        )
    if dt >= 120:
        problems.append(f"runtime {dt:.1f} s")
    assert not problems, "; ".join(problems)


def test_criterion_5_oracle_equivalence():
    worst = 0.0
    for N in range(1, 65):
        for p in SINGLES.values():
            a, b = pe_train(p, N), pe_train_oracle(p, N)
            worst = max(worst, abs(a - b) / abs(b))
        a, b = pair_train(PAIR, N), pair_train_oracle(PAIR, N)
        for x, y in zip(a.as_tuple(), b.as_tuple()):
            worst = max(worst, abs(x - y) / abs(y))
    assert worst <= 1e-8, f"max relative discrepancy {worst:.3g}"


def test_criterion_6_positivity_and_structure():
    tol = 1e-10
    for name, p in SINGLES.items():
        rep, _ = timed_single(name)
        assert all(v >= 0 for v in rep.values)
        for N in rep.n_values:
            assert abs(pe_train_naive(p, N, tol).imag) <= 10 * tol
    reps, _ = timed_pair()
    for N in N_GRID:
        st = pair_train(PAIR, N, tol)
        assert st.l_ii >= 0
        blk = second_order_block(st)
        assert np.array_equal(blk, blk.conj().T) and np.trace(blk) == 0
        for lam in (1e-4, 1e-2, 0.3):
            rho = assemble_rho(st, lam)
            assert np.array_equal(rho, rho.conj().T)
            assert np.trace(rho) == 1.0


def test_criterion_7_riemann_stieltjes_battery():
    t0 = time.perf_counter()
    reps = rs_battery(8)
    dt = time.perf_counter() - t0
    failed = [r.line() for r in reps if not r.passed]
    names = " ".join(r.name for r in reps)
    assert "delta2(p)" in names and "mesh 2^-10" in names and "mesh 2^-7" in names
    assert all(f"k={k} N={N}" in names for k in (1, 2, 3) for N in (1, 2, 4, 8))
    assert all(r.tol == 0.01 for r in reps if r.name.startswith("lemma3"))
    assert not failed, "; ".join(failed)
    assert dt < 30, f"runtime {dt:.1f} s"


def test_criterion_8_single_delta():
    v = pe_train(SINGLES["heaviside"], 1)
    assert abs(v - 1 / (4 * math.pi**2)) / (1 / (4 * math.pi**2)) < 5e-13


def test_criterion_9_generic_vs_specialized():
    for p in SINGLES.values():
        a = pe_exact(p, 1e-10, "generic")
        b = pe_exact(p, 1e-10, "specialized")
        assert abs(a - b) <= 1e-8, f"{p.switching.name}: {abs(a - b):.3g}"
