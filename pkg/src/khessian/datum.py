"""Radial datum ``g`` on ``[0, 1]`` and the forcing profile it induces.

Only the running integral ``G(x) = int_0^x g`` enters the solvers, through

    h1(t) = exp((N - 3) t) * G(exp(-t)).

Builtins have closed-form ``G``; tabulated data is read as a piecewise-linear
``g`` whose integral is exact.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .grid import Grid, GridFunction, integrate
from .green import check_dimension


@dataclass(frozen=True)
class Datum:
    """A datum ``g in L^1(0, 1)`` described by its running integrals.

    ``cumulative`` is ``G(x) = int_0^x g`` and ``abs_cumulative`` is
    ``int_0^x |g|``.  Both accept numpy arrays.
    """

    name: str
    cumulative: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    abs_cumulative: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    l1_norm: float
    sign_nonneg: bool
    samples: Optional[tuple] = field(default=None, repr=False)

    @property
    def mass(self) -> float:
        return float(self.cumulative(np.array([1.0]))[0])

    def scaled(self, c: float) -> "Datum":
        c = float(c)
        G, absG = self.cumulative, self.abs_cumulative
        return Datum(f"{c:g}*{self.name}", lambda x: c * G(x), lambda x: abs(c) * absG(x),
                     abs(c) * self.l1_norm, self.sign_nonneg if c >= 0 else (self.l1_norm == 0))


def _const(c: float) -> Datum:
    name = {0.0: "zero", 1.0: "one"}.get(c, f"const:{c:g}")
    return Datum(name, lambda x: c * np.asarray(x, dtype=float),
                 lambda x: abs(c) * np.asarray(x, dtype=float), abs(c), c >= 0)


def _power(a: float) -> Datum:
    if not a > -1:
        raise ValueError("power datum x^a needs a > -1 to be integrable")
    p = a + 1.0
    G = lambda x: np.asarray(x, dtype=float) ** p / p
    return Datum(f"power:{a:g}", G, G, 1.0 / p, True)


def _indicator(lo: float, hi: float) -> Datum:
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError("indicator datum needs 0 <= a < b <= 1")
    G = lambda x: np.clip(np.asarray(x, dtype=float), lo, hi) - lo
    return Datum(f"indicator:{lo:g},{hi:g}", G, G, hi - lo, True)


def _floats(text: str, count: int) -> list[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != count:
        raise ValueError(f"expected {count} comma-separated numbers, got {text!r}")
    return [float(p) for p in parts]


def from_samples(pairs: Iterable[Sequence[float]], name: str = "sampled") -> Datum:
    """Piecewise-linear datum through ``(x, g)`` samples; zero outside their span."""
    arr = np.asarray([(float(x), float(y)) for x, y in pairs], dtype=float)
    if arr.size == 0:
        raise ValueError("datum table is empty")
    x, y = arr[:, 0], arr[:, 1]
    if not np.all(np.isfinite(arr)):
        raise ValueError("datum samples must be finite")
    if x[0] < 0 or x[-1] > 1:
        raise ValueError("datum abscissae must lie in [0, 1]")
    if np.any(np.diff(x) <= 0):
        raise ValueError("datum abscissae must be strictly increasing")

    dx = np.diff(x)
    seg = 0.5 * dx * (y[:-1] + y[1:])
    abs_seg = np.array([_abs_linear_integral(y0, y1, d) for y0, y1, d in zip(y[:-1], y[1:], dx)])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    abs_cum = np.concatenate([[0.0], np.cumsum(abs_seg)])

    def _make(signed: bool):
        def G(xq):
            xq = np.clip(np.asarray(xq, dtype=float), x[0], x[-1])
            out = np.empty_like(xq)
            flat_in, flat_out = xq.ravel(), out.ravel()
            if x.size == 1:
                flat_out[:] = 0.0
                return out
            i = np.clip(np.searchsorted(x, flat_in, side="right") - 1, 0, x.size - 2)
            d = flat_in - x[i]
            slope = (y[i + 1] - y[i]) / dx[i]
            if signed:
                flat_out[:] = cum[i] + y[i] * d + 0.5 * slope * d * d
            else:
                flat_out[:] = abs_cum[i] + np.array(
                    [_abs_linear_integral(y0, y0 + s * dd, dd) for y0, s, dd in zip(y[i], slope, d)])
            return out
        return G

    return Datum(name, _make(True), _make(False), float(abs_cum[-1]), bool(np.all(y >= 0)),
                 samples=tuple(map(tuple, arr)))


def _abs_linear_integral(y0: float, y1: float, d: float) -> float:
    """Exact integral of ``|linear|`` over an interval of length ``d``."""
    if d == 0:
        return 0.0
    if y0 * y1 >= 0:
        return 0.5 * d * (abs(y0) + abs(y1))
    root = d * y0 / (y0 - y1)
    return 0.5 * root * abs(y0) + 0.5 * (d - root) * abs(y1)


def read_csv(source) -> list[tuple[float, float]]:
    """Read two-column ``x,g`` data; a non-numeric first row is a header."""
    if isinstance(source, (str, Path)) and Path(source).exists():
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    pairs = []
    for k, row in enumerate(rows):
        if len(row) < 2:
            raise ValueError(f"row {k + 1}: expected two columns")
        try:
            pairs.append((float(row[0]), float(row[1])))
        except ValueError:
            if k == 0:
                continue
            raise ValueError(f"row {k + 1}: not numeric: {row}") from None
    return pairs


def load_datum(source) -> Datum:
    """Build a datum from a builtin spec string or a table of ``(x, g)`` pairs.

    Builtin specs: ``one``, ``zero``, ``const:c``, ``power:a``,
    ``indicator:a,b`` and ``csv:PATH``.
    """
    if not isinstance(source, str):
        return from_samples(source)
    spec = source.strip()
    head, _, rest = spec.partition(":")
    head = head.lower()
    if head == "one" and not rest:
        return _const(1.0)
    if head == "zero" and not rest:
        return _const(0.0)
    if head == "const":
        return _const(_floats(rest, 1)[0])
    if head == "power":
        return _power(_floats(rest, 1)[0])
    if head == "indicator":
        lo, hi = _floats(rest, 2)
        return _indicator(lo, hi)
    if head == "csv":
        return from_samples(read_csv(Path(rest)), name=spec)
    raise ValueError(f"unknown datum {source!r}; expected one|zero|power:a|indicator:a,b|csv:PATH")


@dataclass(frozen=True)
class ForcingProfile:
    """``h1`` sampled on a grid for dimension ``N``."""

    grid: Grid
    values: np.ndarray = field(repr=False)
    N: int
    sign_nonneg: bool
    datum: Datum

    @property
    def function(self) -> GridFunction:
        return GridFunction(self.grid, self.values)

    @property
    def sup(self) -> float:
        return float(np.max(self.values))

    def on(self, grid: Grid) -> "ForcingProfile":
        return h1_eval(self.datum, self.N, grid)

    def __call__(self, t):
        """Exact ``h1`` off the grid (used by the shooting oracle)."""
        return h1_exact(self.datum, self.N, t)


def h1_exact(d: Datum, N: int, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.exp((N - 3) * t) * d.cumulative(np.exp(-t))


def h1_eval(d: Datum, N: int, grid: Grid) -> ForcingProfile:
    N = check_dimension(N)
    values = h1_exact(d, N, grid.nodes)
    values.setflags(write=False)
    return ForcingProfile(grid, values, N, d.sign_nonneg, d)


def h1_l1_norm(p: ForcingProfile) -> float:
    """``int |h1|``; only guaranteed finite for ``N = 2``."""
    if p.N != 2:
        raise ValueError("h1 is only guaranteed to be integrable for N = 2 (not-L1-guaranteed)")
    return integrate(GridFunction(p.grid, np.abs(p.values)))


def describe(d: Datum) -> str:
    return f"{d.name} (|g|_1 = {d.l1_norm:.6g}, mass = {d.mass:.6g})"


__all__ = ["Datum", "ForcingProfile", "load_datum", "from_samples", "read_csv", "h1_eval",
           "h1_exact", "h1_l1_norm", "describe"]
