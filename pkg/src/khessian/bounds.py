"""Thresholds in lambda: sufficient existence, necessary bound and non-existence.

* ``lambda_cond2`` is the largest lambda with ``lam * sup h1 <= (N-1)/2``,
  the range where the constant ``beta = 1`` is an upper solution.
* ``c_prime`` is the coefficient of the linear bound on the free initial
  value (``w'(0)`` for Dirichlet, ``w(0)`` for Navier) of a decaying solution.
* ``c_const`` is the coefficient of the quadratic bound ``lam^2 C`` on the
  same quantity, built from the linear response ``h_tilde``.
* ``lambda_nonexist = c_prime / c_const`` is where the two bounds cross.

The two integrals are smooth and exponentially decaying, so their Simpson
values are Richardson-extrapolated from the grid and its refinement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .datum import ForcingProfile
from .green import BcFamily, check_dimension
from .grid import GridFunction, simpson_sum, weighted_cumulative, weighted_cumulative_backward


class HypothesisError(ValueError):
    """The datum does not satisfy a sign or mass hypothesis of the bound."""


class Classification(str, Enum):
    EXISTENCE_SUFFICIENT = "existence_sufficient"
    UNKNOWN = "unknown"
    NONEXISTENCE = "nonexistence"


@dataclass(frozen=True)
class BoundsReport:
    N: int
    bc: BcFamily
    datum: str
    lambda_cond2: float
    c_prime: Optional[float] = None
    c_const: Optional[float] = None
    lambda_nonexist: Optional[float] = None
    h_tilde: Optional[GridFunction] = None
    classification_note: str = ""

    @property
    def nonexistence_applicable(self) -> bool:
        return self.lambda_nonexist is not None

    def intervals(self) -> dict:
        upper = self.lambda_nonexist if self.nonexistence_applicable else math.inf
        out = {Classification.EXISTENCE_SUFFICIENT.value: [-math.inf, self.lambda_cond2],
               Classification.UNKNOWN.value: [self.lambda_cond2, upper]}
        if self.nonexistence_applicable:
            out[Classification.NONEXISTENCE.value] = [upper, math.inf]
        return out

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "bc": self.bc.value,
            "datum": self.datum,
            "lambda_cond2": _json_float(self.lambda_cond2),
            "c_prime": _json_float(self.c_prime),
            "c_const": _json_float(self.c_const),
            "lambda_nonexist": _json_float(self.lambda_nonexist),
            "nonexistence_applicable": self.nonexistence_applicable,
            "classification_intervals": {k: [_json_float(a), _json_float(b)]
                                         for k, (a, b) in self.intervals().items()},
            "classification_note": self.classification_note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = [f"N={self.N} bc={self.bc.value} g={self.datum}",
                 f"  existence (upper solution beta=1): lambda <= {self.lambda_cond2:.17g}"]
        if self.nonexistence_applicable:
            lines.append(f"  unknown: {self.lambda_cond2:.17g} < lambda < {self.lambda_nonexist:.17g}")
            lines.append(f"  certified non-existence above: lambda >= {self.lambda_nonexist:.17g}")
        else:
            lines.append("  non-existence: inapplicable (" + self.classification_note + ")")
        return "\n".join(lines)


def _json_float(x):
    """JSON has no infinities; they are written as strings."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def cond2_threshold(p: ForcingProfile, N: Optional[int] = None) -> float:
    N = check_dimension(p.N if N is None else N)
    top = p.sup
    if top <= 0:
        return math.inf
    return (N - 1) / (2.0 * top)


def _richardson(coarse: float, fine: float) -> float:
    return (16.0 * fine - coarse) / 15.0


def _weighted_integral(p: ForcingProfile) -> float:
    t = p.grid.nodes
    return simpson_sum(np.exp((1 - p.N) * t) * p.values, p.grid.spacing)


def necessary_bound(p: ForcingProfile, N: Optional[int] = None, bc: BcFamily | str = BcFamily.DIRICHLET) -> float:
    """``C'`` with ``int exp((1-N) s) h1`` for Dirichlet and that over ``N`` for Navier."""
    N = check_dimension(p.N if N is None else N)
    bc = BcFamily.parse(bc)
    val = _richardson(_weighted_integral(p), _weighted_integral(p.on(p.grid.refined())))
    return val if bc is BcFamily.DIRICHLET else val / N


def _require_nonneg(p: ForcingProfile) -> None:
    if not p.sign_nonneg:
        raise HypothesisError("hypothesis violated: the bound needs g >= 0")


def h_tilde(p: ForcingProfile, N: Optional[int] = None, bc: BcFamily | str = BcFamily.DIRICHLET) -> GridFunction:
    """Normalized linear response written with growing/decaying factors kept apart.

    Dirichlet:
        (e^{-t}/N) int_0^t e^s (1 - e^{-Ns}) h1 + ((e^{(N-1)t} - e^{-t})/N) int_t^inf e^{(1-N)s} h1
    Navier:
        (e^{-t}/N) int_0^t e^s h1 + (e^{(N-1)t}/N) int_t^inf e^{(1-N)s} h1

    This is deliberately not the fused evaluation in ``green`` so the two can
    be checked against each other.
    """
    N = check_dimension(p.N if N is None else N)
    bc = BcFamily.parse(bc)
    _require_nonneg(p)
    t = p.grid.nodes
    hs = p.grid.spacing
    h1 = p.values
    tail = weighted_cumulative_backward(np.exp((1 - N) * t) * h1, hs)
    if bc is BcFamily.DIRICHLET:
        head = weighted_cumulative(np.exp(t) * (1.0 - np.exp(-N * t)) * h1, hs)
        vals = (np.exp(-t) * head + (np.exp((N - 1) * t) - np.exp(-t)) * tail) / N
        vals[0] = 0.0
    else:
        head = weighted_cumulative(np.exp(t) * h1, hs)
        vals = (np.exp(-t) * head + np.exp((N - 1) * t) * tail) / N
    return GridFunction(p.grid, vals)


def _quadratic_integral(p: ForcingProfile, bc: BcFamily) -> float:
    ht = h_tilde(p, p.N, bc).values
    return simpson_sum(np.exp(-p.N * p.grid.nodes) * ht * ht, p.grid.spacing)


def quadratic_constant(p: ForcingProfile, N: Optional[int] = None, bc: BcFamily | str = BcFamily.DIRICHLET) -> float:
    """``C``: ``(N-1)/2 int e^{-Ns} h_tilde^2`` (Dirichlet) or that over ``N`` (Navier)."""
    N = check_dimension(p.N if N is None else N)
    bc = BcFamily.parse(bc)
    val = _richardson(_quadratic_integral(p, bc), _quadratic_integral(p.on(p.grid.refined()), bc))
    c = 0.5 * (N - 1) * val
    return c if bc is BcFamily.DIRICHLET else c / N


def nonexistence_threshold(p: ForcingProfile, N: Optional[int] = None,
                           bc: BcFamily | str = BcFamily.DIRICHLET) -> BoundsReport:
    N = check_dimension(p.N if N is None else N)
    bc = BcFamily.parse(bc)
    _require_nonneg(p)
    if not p.datum.mass > 0:
        raise HypothesisError("hypothesis violated: the bound needs g to have positive mass")
    cp = necessary_bound(p, N, bc)
    cc = quadratic_constant(p, N, bc)
    return BoundsReport(N, bc, p.datum.name, cond2_threshold(p, N), cp, cc, cp / cc,
                        h_tilde(p, N, bc), "certified non-existence above lambda_nonexist")


def bounds_report(p: ForcingProfile, bc: BcFamily | str) -> BoundsReport:
    """Full report when the hypotheses hold, otherwise the cond2 part only."""
    bc = BcFamily.parse(bc)
    try:
        return nonexistence_threshold(p, p.N, bc)
    except HypothesisError as exc:
        return BoundsReport(p.N, bc, p.datum.name, cond2_threshold(p), classification_note=str(exc))


def classify_lambda(lam: float, report: BoundsReport) -> Classification:
    if lam <= report.lambda_cond2:
        return Classification.EXISTENCE_SUFFICIENT
    if report.nonexistence_applicable and lam >= report.lambda_nonexist:
        return Classification.NONEXISTENCE
    return Classification.UNKNOWN
