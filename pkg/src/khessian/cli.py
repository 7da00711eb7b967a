"""Command-line entry point: ``solve``, ``bounds`` and ``sweep``.

Exit codes: 0 success, 1 usage error, 2 divergence or failed hypothesis.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .bounds import BoundsReport, HypothesisError, bounds_report, classify_lambda
from .datum import ForcingProfile, h1_eval, load_datum
from .green import BcFamily, check_dimension
from .grid import make_grid
from .monotone import NoUpperSolution, OrderingViolation, monotone_iterate
from .oracle import find_decaying
from .picard import PicardConfig, Solution, solve_picard
from .reconstruction import export_profile, profile_filename, w_to_profile

log = logging.getLogger("khessian")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2
METHODS = ("picard", "monotone", "both")
SWEEP_COLUMNS = ("lambda", "classification", "picard_converged", "picard_residual",
                 "monotone_converged", "monotone_residual", "oracle_init", "error")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    N: int = 2
    bc: BcFamily = BcFamily.DIRICHLET
    lam: float = 0.0
    g: str = "one"
    t_max: float = 40.0
    n: int = 4001
    method: str = "both"
    tol: float = 1e-12
    out: Path = Path(".")
    lambdas: list = field(default_factory=list)
    oracle: bool = True

    def validate(self) -> "RunConfig":
        try:
            check_dimension(self.N)
            self.bc = BcFamily.parse(self.bc)
            make_grid(self.t_max, self.n)
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        if self.method not in METHODS:
            raise UsageError(f"method must be one of {', '.join(METHODS)}")
        if not self.tol > 0:
            raise UsageError("tol must be positive")
        for lam in [self.lam, *self.lambdas]:
            if not math.isfinite(lam):
                raise UsageError("lambda must be finite")
        return self

    def profile(self) -> ForcingProfile:
        try:
            datum = load_datum(self.g)
        except (OSError, ValueError) as exc:
            raise UsageError(f"bad datum {self.g!r}: {exc}") from None
        return h1_eval(datum, self.N, make_grid(self.t_max, self.n))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _json_value(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(_json_value(doc), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _lam_tag(lam: float) -> str:
    return f"{lam:g}"


# --------------------------------------------------------------------------
# solve


def _run_methods(cfg: RunConfig, lam: float, p: ForcingProfile) -> dict:
    """Run the requested solvers; values are a Solution or an error string."""
    out: dict = {}
    if cfg.method in ("picard", "both"):
        out["picard"] = solve_picard(PicardConfig(lam, tol=cfg.tol), p, cfg.bc)
    if cfg.method in ("monotone", "both"):
        try:
            out["monotone"] = monotone_iterate(lam, p, cfg.bc, tol=cfg.tol).final
        except (NoUpperSolution, OrderingViolation) as exc:
            out["monotone"] = str(exc)
    return out


def cmd_solve(cfg: RunConfig) -> int:
    p = cfg.profile()
    lam = cfg.lam
    results = _run_methods(cfg, lam, p)
    cfg.out.mkdir(parents=True, exist_ok=True)
    stem = f"N{cfg.N}_{cfg.bc.value}_lambda{_lam_tag(lam)}"

    report: dict = {"N": cfg.N, "bc": cfg.bc.value, "lambda": lam, "g": cfg.g,
                    "t_max": cfg.t_max, "nodes": cfg.n, "tol": cfg.tol, "methods": {}}
    best: Optional[Solution] = None
    for name, res in results.items():
        if isinstance(res, str):
            report["methods"][name] = {"converged": False, "status": res}
            continue
        report["methods"][name] = res.diagnostics()
        if res.converged and best is None:
            best = res
    sols = [r for r in results.values() if isinstance(r, Solution) and r.converged]
    if len(results) == 2 and len(sols) == 2:
        report["agreement_sup"] = float(np.max(np.abs(sols[0].w.values - sols[1].w.values)))
    ok = all(isinstance(r, Solution) and r.converged for r in results.values())
    report["converged"] = ok

    if best is not None:
        w = best.w
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("t", "w", "dw"))
        for row in zip(w.grid.nodes, w.values, w.deriv):
            writer.writerow([_fmt(x) for x in row])
        (cfg.out / f"solution_{stem}.csv").write_text(buf.getvalue(), encoding="utf-8")
        (cfg.out / profile_filename(cfg.N, cfg.bc, lam)).write_bytes(export_profile(w_to_profile(best)))
        report["profile_method"] = best.method
    _write_json(cfg.out / f"report_{stem}.json", report)

    for name, res in results.items():
        status = res if isinstance(res, str) else res.status
        print(f"{name}: {status}")
    if "agreement_sup" in report:
        print(f"agreement (sup |w_picard - w_monotone|): {report['agreement_sup']:.3e}")
    return EXIT_OK if ok else EXIT_FAILED


# --------------------------------------------------------------------------
# bounds


def cmd_bounds(cfg: RunConfig) -> int:
    p = cfg.profile()
    report = bounds_report(p, cfg.bc)
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / f"bounds_N{cfg.N}_{cfg.bc.value}.json").write_text(report.to_json() + "\n", encoding="utf-8")
    print(report.summary())
    return EXIT_OK if report.nonexistence_applicable else EXIT_FAILED


# --------------------------------------------------------------------------
# sweep


def _sweep_row(cfg: RunConfig, lam: float, p: ForcingProfile, report: BoundsReport) -> list:
    row = {c: "" for c in SWEEP_COLUMNS}
    row["lambda"] = lam
    try:
        row["classification"] = classify_lambda(lam, report).value
        for name, res in _run_methods(cfg, lam, p).items():
            if isinstance(res, str):
                row[f"{name}_converged"] = False
                row["error"] = res
            else:
                row[f"{name}_converged"] = res.converged
                row[f"{name}_residual"] = res.residual_sup
        if cfg.oracle:
            init = find_decaying(lam, p, cfg.N, cfg.bc)
            row["oracle_init"] = "none" if init is None else init
    except Exception as exc:  # recorded in the row; the sweep carries on
        log.exception("sweep row lambda=%g failed", lam)
        row["error"] = f"{type(exc).__name__}: {exc}"
    return [_fmt(row[c]) for c in SWEEP_COLUMNS]


def sweep_threads() -> int:
    raw = os.environ.get("KHESSIAN_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise UsageError("KHESSIAN_THREADS must be a positive integer") from None
        if n < 1:
            raise UsageError("KHESSIAN_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def cmd_sweep(cfg: RunConfig) -> int:
    threads = sweep_threads()
    p = cfg.profile()
    report = bounds_report(p, cfg.bc)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        rows = list(pool.map(lambda lam: _sweep_row(cfg, lam, p, report), cfg.lambdas))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    writer.writerows(rows)
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / f"sweep_N{cfg.N}_{cfg.bc.value}.csv").write_text(buf.getvalue(), encoding="utf-8")
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _lambda_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--N", type=int, default=2, help="dimension (2 or 3)")
    common.add_argument("--bc", default="dirichlet", help="dirichlet or navier")
    common.add_argument("--g", default="one",
                        help="datum: one|zero|const:c|power:a|indicator:a,b|csv:PATH")
    common.add_argument("--tmax", type=float, default=40.0, help="truncation of the half-line")
    common.add_argument("--nodes", type=int, default=4001, help="odd number of grid nodes")
    common.add_argument("--tol", type=float, default=1e-12, help="iteration step tolerance")
    common.add_argument("--method", default="both", help="picard, monotone or both")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="khessian", description="Radial solver for the fourth-order Hessian problem.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    solve = sub.add_parser("solve", parents=[common], help="solve for one lambda")
    solve.add_argument("--lambda", dest="lam", type=float, required=True)
    sub.add_parser("bounds", parents=[common], help="lambda thresholds for a datum")
    sweep = sub.add_parser("sweep", parents=[common], help="solve over a list of lambdas")
    sweep.add_argument("--lambdas", type=_lambda_list, default=[], help="comma-separated values")
    sweep.add_argument("--no-oracle", dest="oracle", action="store_false",
                       help="skip the shooting search for a decaying solution")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = RunConfig(N=args.N, bc=args.bc, lam=getattr(args, "lam", 0.0), g=args.g,
                        t_max=args.tmax, n=args.nodes, method=args.method, tol=args.tol,
                        out=args.out, lambdas=getattr(args, "lambdas", []),
                        oracle=getattr(args, "oracle", True)).validate()
        command = {"solve": cmd_solve, "bounds": cmd_bounds, "sweep": cmd_sweep}[args.command]
        return command(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
