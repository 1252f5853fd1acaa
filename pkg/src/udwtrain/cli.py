"""
Command-line front end.

    udwtrain single --switching heaviside --gamma 1 --s 1 --n 10:300:log16
    udwtrain pair --gamma 1 --d 1.2 --r 0.1 --n 10:300:log16 --plot
    udwtrain rs-verify --levels 8

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import convergence as cv
from . import riemann_stieltjes as rs
from .core_model import Bump, Gaussian, Heaviside, PairParams, SingleParams, TruncatedGaussian
from .errors import DomainError, NumericFailure, ReferenceTooCoarse
from .svgplot import loglog_svg

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULTS = {
    "switching": "heaviside",
    "q": 1.0,
    "s": 1.0,
    "n": "10:300:log16",
    "out": ".",
    "plot": False,
    "levels": 8,
}
DEFAULT_TOL = 1e-10
# the bump errors fall to ~1e-18 by N = 300, so its reference must be tighter
DEFAULT_TOL_BUMP = 1e-14


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    mode: str
    switching: str = "heaviside"
    q: float = 1.0
    gamma: Optional[float] = None
    s: float = 1.0
    d: Optional[float] = None
    r: Optional[float] = None
    n_list: List[int] = field(default_factory=list)
    tol: Optional[float] = None
    out: str = "."
    plot: bool = False
    levels: int = 8


def parse_n_spec(text: str) -> List[int]:
    """'lo:hi:logK' (K geometric integers) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or not parts[2].startswith("log"):
            raise ConfigError(f"bad N range {text!r}; expected lo:hi:logK")
        try:
            lo, hi, k = int(parts[0]), int(parts[1]), int(parts[2][3:])
        except ValueError:
            raise ConfigError(f"bad N range {text!r}") from None
        if lo < 1 or hi < lo or k < 1:
            raise ConfigError(f"bad N range {text!r}")
        vals = np.rint(np.geomspace(lo, hi, k)).astype(int)
        return sorted(set(int(v) for v in vals))
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad N list {text!r}") from None
    if not vals or min(vals) < 1:
        raise ConfigError("N values must be positive integers")
    return sorted(set(vals))


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def read_config_file(path: str) -> dict:
    """Flat UTF-8 ``key = value`` file; '#' starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        out[key] = val
    return out


_CASTS = {
    "switching": str,
    "q": float,
    "gamma": float,
    "s": float,
    "d": float,
    "r": float,
    "n": str,
    "tol": float,
    "out": str,
    "plot": _bool,
    "levels": int,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="udwtrain", description="Delta-coupling train approximations of detector observables.")
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p, sweep=True):
        p.add_argument("--config", help="key = value file with defaults for any flag")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--tol", type=float, help="absolute tolerance of the exact references")
        if sweep:
            p.add_argument("--n", help="N values: lo:hi:logK or a comma list (default 10:300:log16)")
            p.add_argument("--gamma", type=float, help="dimensionless gap (required)")
            p.add_argument("--plot", action="store_true", default=None, help="also write SVG plots")

    ps = sub.add_parser("single", help="single detector, Gaussian smearing")
    common(ps)
    ps.add_argument("--switching", choices=["heaviside", "gaussian", "bump"])
    ps.add_argument("--q", type=float, help="truncated Gaussian width (default 1)")
    ps.add_argument("--s", type=float, help="smearing width (default 1)")

    pp = sub.add_parser("pair", help="two hard-sphere detectors, Heaviside switching")
    common(pp)
    pp.add_argument("--d", type=float, help="separation (required)")
    pp.add_argument("--r", type=float, help="sphere radius (required)")
    pp.add_argument("--switching", choices=["heaviside"])

    pv = sub.add_parser("rs-verify", help="Riemann-Stieltjes lemma battery")
    common(pv, sweep=False)
    pv.add_argument("--levels", type=int, help="dyadic levels for the variation check (default 8)")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        for key, val in read_config_file(args.config).items():
            if key == "config":
                continue
            if key not in _CASTS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                values[key] = _CASTS[key](val)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {val!r}") from None
    for key in _CASTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    for key, v in DEFAULTS.items():
        values.setdefault(key, v)
    cfg = RunConfig(
        mode=args.mode,
        switching=values["switching"],
        q=values["q"],
        gamma=values.get("gamma"),
        s=values["s"],
        d=values.get("d"),
        r=values.get("r"),
        tol=values.get("tol"),
        out=values["out"],
        plot=bool(values["plot"]),
        levels=values["levels"],
    )
    if cfg.mode in ("single", "pair"):
        if cfg.gamma is None:
            raise ConfigError("--gamma is required")
        cfg.n_list = parse_n_spec(values["n"])
        if cfg.switching not in ("heaviside", "gaussian", "bump"):
            raise ConfigError(f"unknown switching {cfg.switching!r}")
    if cfg.mode == "pair":
        if cfg.d is None or cfg.r is None:
            raise ConfigError("--d and --r are required")
        if cfg.switching != "heaviside":
            raise ConfigError("pair runs support Heaviside switching only")
    if cfg.tol is not None and not cfg.tol > 0:
        raise ConfigError("--tol must be positive")
    return cfg


def _switching(cfg: RunConfig):
    if cfg.switching == "heaviside":
        return Heaviside()
    if cfg.switching == "gaussian":
        return TruncatedGaussian(cfg.q)
    return Bump()


def _write_outputs(report, stem, cfg, title, annotation):
    os.makedirs(cfg.out, exist_ok=True)
    csv_path = os.path.join(cfg.out, stem + ".csv")
    cv.emit_report_csv(report, csv_path)
    paths = [csv_path]
    if cfg.plot:
        svg = loglog_svg(
            report.n_values,
            report.rel_errors,
            slope=report.fitted_slope,
            window=report.fit_window,
            title=title,
            annotation=annotation,
        )
        svg_path = os.path.join(cfg.out, stem + ".svg")
        with open(svg_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
        paths.append(svg_path)
    return paths


def _fmt_slope(report):
    if math.isfinite(report.fitted_slope):
        return f"{report.fitted_slope:.4f} (rms residual {report.fit_residual:.3g}, window {report.fit_window[0]}..{report.fit_window[1]})"
    return "n/a (fewer than 4 points in the fit window)"


def run_single(cfg: RunConfig) -> int:
    sw = _switching(cfg)
    params = SingleParams(cfg.gamma, Gaussian(cfg.s), sw)
    is_bump = isinstance(sw, Bump)
    tol = cfg.tol if cfg.tol is not None else (DEFAULT_TOL_BUMP if is_bump else DEFAULT_TOL)
    report = cv.sweep(cv.SingleProblem(params), cfg.n_list, tol, expected_power=5.0 if is_bump else None)
    label = sw.name + (f" q={cfg.q:g}" if isinstance(sw, TruncatedGaussian) else "")
    annotation = f"single detector, {label}, gamma={cfg.gamma:g}, s={cfg.s:g}, tol={tol:g}"
    paths = _write_outputs(report, f"single_{sw.name}", cfg, "excitation probability: train vs exact", annotation)
    print(f"exact P_e/lambda^2 = {float(report.exact):.12g}")
    print(f"fitted slope = {_fmt_slope(report)}")
    if is_bump:
        ok, C, worst = cv.power_bound_holds(report, 5.0, (report.n_values[0], report.n_values[-1]))
        print(f"upper bound rel_error <= C/N^5 with C = {C:.4g} fixed at N = {report.n_values[0]}: "
              f"{'holds' if ok else 'violated'} (max ratio {worst:.3g})")
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def run_pair(cfg: RunConfig) -> int:
    params = PairParams(cfg.gamma, cfg.d, cfg.r, Heaviside())
    tol = cfg.tol if cfg.tol is not None else DEFAULT_TOL
    annotation = f"pair, heaviside, gamma={cfg.gamma:g}, d={cfg.d:g}, r={cfg.r:g}, tol={tol:g}"
    names = {"l_ii": "L_ii", "l_ab": "L_AB", "m": "M"}
    for obs in cv.PAIR_OBSERVABLES:
        report = cv.sweep(cv.PairProblem(params, obs), cfg.n_list, tol)
        paths = _write_outputs(report, f"pair_{obs}", cfg, f"{names[obs]}: train vs exact", annotation)
        ex = complex(report.exact)
        val = f"{ex.real:.12g}" if obs != "m" else f"{ex.real:.12g}{ex.imag:+.12g}i"
        print(f"{names[obs]}: exact = {val}; fitted slope = {_fmt_slope(report)}")
        for p in paths:
            print(f"  wrote {p}")
    return EXIT_OK


def rs_battery(levels: int = 8):
    """The built-in lemma battery; returns a list of LemmaReport."""
    reports = []
    # corner sums of the product function
    for lo, hi in [((0.0, 0.0), (1.0, 1.0)), ((0.25, 0.5), (0.75, 2.0)), ((-1.0, 0.5), (0.5, 0.625))]:
        R = rs.Rect(lo, hi)
        val = rs.delta_n(rs.product_function, R)
        reports.append(rs.LemmaReport(f"delta2(p) = vol on {lo}x{hi}", val, R.volume, abs(val - R.volume), 0.0))
    # the counting function bound
    for k in (1, 2, 3):
        m = {1: 20001, 2: 201, 3: 41}[k]
        ax = [np.linspace(0.0, 1.0, m)] * k
        pts = np.stack([a.ravel() for a in np.meshgrid(*ax, indexing="ij")], axis=-1)
        for N in (1, 2, 4, 8):
            worst = float(np.max(np.abs(rs.v_n(k, N, pts))))
            bound = rs.v_n_bound(k, N)
            reports.append(rs.LemmaReport(f"|v_N^(k)| bound k={k} N={N}", worst, bound, max(0.0, worst - bound), 0.0))
    U1, U2 = rs.Rect.unit(1), rs.Rect.unit(2)
    reports.append(
        rs.verify_lemma1(lambda z: z[:, 0] * (1 - z[:, 0]), lambda z: z[:, 0] ** 2, U1, 10, 1e-3,
                         name="lemma1 n=1 f=t(1-t) g=t^2 mesh 2^-10")
    )
    reports.append(
        rs.verify_lemma1(lambda z: z[:, 0] * (1 - z[:, 0]) * z[:, 1] * (1 - z[:, 1]), rs.product_function, U2, 7, 1e-3,
                         name="lemma1 n=2 f=z1(1-z1)z2(1-z2) g=p mesh 2^-7")
    )
    reports.append(
        rs.verify_lemma2(lambda z: np.cos(3 * z[:, 0]) * z[:, 1], lambda z: np.sin(3 * z[:, 0] * z[:, 1]), U2, 6,
                         name="lemma2 n=2 bound by sup|f| Var(g)")
    )
    for name, R, g, dg in lemma3_functions():
        reports.append(rs.verify_lemma3(g, dg, R, levels, name=f"lemma3 {name} levels={levels}"))
    return reports


def lemma3_functions():
    U1, U2 = rs.Rect.unit(1), rs.Rect.unit(2)
    return [
        ("sin(5t)", U1, lambda z: np.sin(5 * z[:, 0]), lambda z: 5 * np.cos(5 * z[:, 0])),
        ("exp(t)cos(7t)", U1, lambda z: np.exp(z[:, 0]) * np.cos(7 * z[:, 0]),
         lambda z: np.exp(z[:, 0]) * (np.cos(7 * z[:, 0]) - 7 * np.sin(7 * z[:, 0]))),
        ("sin(z1)sin(z2)", U2, lambda z: np.sin(z[:, 0]) * np.sin(z[:, 1]), lambda z: np.cos(z[:, 0]) * np.cos(z[:, 1])),
        ("sin(3 z1 z2)", U2, lambda z: np.sin(3 * z[:, 0] * z[:, 1]),
         lambda z: 3 * np.cos(3 * z[:, 0] * z[:, 1]) - 9 * z[:, 0] * z[:, 1] * np.sin(3 * z[:, 0] * z[:, 1])),
        ("sin(3 z1)cos(4 z2)", U2, lambda z: np.sin(3 * z[:, 0]) * np.cos(4 * z[:, 1]),
         lambda z: -12 * np.cos(3 * z[:, 0]) * np.sin(4 * z[:, 1])),
    ]


def run_rs_verify(cfg: RunConfig) -> int:
    if not 1 <= cfg.levels <= 8:
        raise ConfigError("--levels must be in 1..8")
    reports = rs_battery(cfg.levels)
    for rep in reports:
        print(rep.line())
    failed = sum(not r.passed for r in reports)
    print(f"{len(reports) - failed}/{len(reports)} passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = make_config(args)
        runner = {"single": run_single, "pair": run_pair, "rs-verify": run_rs_verify}[cfg.mode]
        return runner(cfg)
    except (ConfigError, DomainError, ReferenceTooCoarse) as exc:
        parser.print_usage(sys.stderr)
        print(f"udwtrain: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericFailure as exc:
        print(f"udwtrain: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
