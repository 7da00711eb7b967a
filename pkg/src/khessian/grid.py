"""Uniform grids on the truncated half-line, quadrature and weighted norms.

The half-line ``[0, inf)`` is truncated at ``t_max`` (default 40).  Every
kernel in this package decays at least like ``exp(-t)``, so the neglected
tail is far below double-precision noise at unit scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import simpson
from scipy.signal import lfilter

DEFAULT_T_MAX = 40.0
DEFAULT_NODES = 4001

# points used by the single-interval rule that closes odd prefixes
_LOCAL_POINTS = 6


@dataclass(frozen=True)
class Grid:
    """Uniform mesh ``0 = t_0 < ... < t_{n-1} = t_max`` with odd ``n``."""

    t_max: float
    n: int
    nodes: np.ndarray = field(repr=False, compare=False)

    @property
    def spacing(self) -> float:
        return self.t_max / (self.n - 1)

    def same_as(self, other: "Grid") -> bool:
        return self.n == other.n and self.t_max == other.t_max

    def refined(self) -> "Grid":
        """Grid with every interval halved (``2n - 1`` nodes, same ``t_max``)."""
        return make_grid(self.t_max, 2 * self.n - 1)


def make_grid(t_max: float = DEFAULT_T_MAX, n: int = DEFAULT_NODES) -> Grid:
    if isinstance(n, bool) or int(n) != n:
        raise TypeError("node count must be an integer")
    n = int(n)
    t_max = float(t_max)
    if not np.isfinite(t_max) or t_max <= 0:
        raise ValueError("t_max must be positive and finite")
    if n < 3 or n % 2 == 0:
        raise ValueError(f"node count must be odd and >= 3 (got {n}); "
                         "composite Simpson needs an even number of intervals")
    nodes = np.linspace(0.0, t_max, n)
    nodes.setflags(write=False)
    return Grid(t_max, n, nodes)


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function (and optionally its derivative) on a grid.

    ``deriv_exact`` is False when ``deriv`` came from finite differences
    rather than from a closed-form derivative.
    """

    grid: Grid
    values: np.ndarray
    deriv: Optional[np.ndarray] = None
    deriv_exact: bool = True

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.deriv is not None:
            deriv = np.array(self.deriv, dtype=float)
            if deriv.shape != (self.grid.n,):
                raise ValueError("derivative samples must match the grid")
            if not np.all(np.isfinite(deriv)):
                raise ValueError("derivative samples must be finite")
            deriv.setflags(write=False)
            object.__setattr__(self, "deriv", deriv)

    @classmethod
    def from_callable(cls, grid: Grid, f, df=None) -> "GridFunction":
        t = grid.nodes
        return cls(grid, f(t), None if df is None else df(t))

    @classmethod
    def zeros(cls, grid: Grid) -> "GridFunction":
        return cls(grid, np.zeros(grid.n), np.zeros(grid.n))

    def with_fd_deriv(self) -> "GridFunction":
        """Copy whose derivative is a fourth-order finite difference of the values."""
        return GridFunction(self.grid, self.values, fd_derivative(self.values, self.grid.spacing),
                            deriv_exact=False)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self.grid, other.grid)
        deriv = None
        if self.deriv is not None and other.deriv is not None:
            deriv = self.deriv + other.deriv
        return GridFunction(self.grid, self.values + other.values, deriv,
                            self.deriv_exact and other.deriv_exact)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self + (-1.0) * other

    def __mul__(self, c: float) -> "GridFunction":
        c = float(c)
        deriv = None if self.deriv is None else c * self.deriv
        return GridFunction(self.grid, c * self.values, deriv, self.deriv_exact)

    __rmul__ = __mul__


def _check_same_grid(a: Grid, b: Grid) -> None:
    if not a.same_as(b):
        raise ValueError(f"grid mismatch: (t_max={a.t_max}, n={a.n}) vs (t_max={b.t_max}, n={b.n})")


class NormKind(Enum):
    MU = "mu"
    SUP = "sup"
    L1 = "l1"
    L2_WEIGHTED = "l2_weighted"


@dataclass(frozen=True)
class WeightedNormKind:
    kind: NormKind
    N: Optional[int] = None

    def __post_init__(self):
        if self.kind in (NormKind.MU, NormKind.L2_WEIGHTED) and self.N not in (2, 3):
            raise ValueError("weighted norms need N in {2, 3}")

    @classmethod
    def mu(cls, N: int) -> "WeightedNormKind":
        return cls(NormKind.MU, N)

    @classmethod
    def sup(cls) -> "WeightedNormKind":
        return cls(NormKind.SUP)

    @classmethod
    def l1(cls) -> "WeightedNormKind":
        return cls(NormKind.L1)

    @classmethod
    def l2_weighted(cls, N: int) -> "WeightedNormKind":
        return cls(NormKind.L2_WEIGHTED, N)


# --------------------------------------------------------------------------
# quadrature


def simpson_sum(values: np.ndarray, h: float) -> float:
    """Composite Simpson on an odd number of uniformly spaced samples."""
    return float(simpson(values, dx=h))


def integrate(f: GridFunction) -> float:
    """Composite-Simpson value of the integral of ``f`` over ``[0, t_max]``."""
    return simpson_sum(f.values, f.grid.spacing)


@lru_cache(maxsize=None)
def _interval_weights(m: int, a: int) -> tuple:
    """Weights for the integral over ``[a, a+1]`` of the degree ``m-1``
    interpolant through nodes ``0..m-1`` (unit spacing)."""
    j = np.arange(m)
    vander = np.vander(np.arange(m, dtype=float), m, increasing=True)
    moments = ((a + 1.0) ** (j + 1) - float(a) ** (j + 1)) / (j + 1)
    return tuple(np.linalg.solve(vander.T, moments))


def weighted_cumulative(values: np.ndarray, h: float, rate: float = 0.0) -> np.ndarray:
    """Node-wise ``F_k = int_0^{t_k} exp(-rate (t_k - s)) f(s) ds``.

    Even ``k`` is composite Simpson on the weighted integrand; odd ``k`` adds
    a six-point interpolatory rule for the last interval.  With ``rate > 0``
    the exponential weight is applied panel by panel through a stable linear
    recurrence, so ``exp(rate t)`` is never formed.
    """
    f = np.asarray(values, dtype=float)
    n = f.size
    out = np.zeros(n)
    q = np.exp(-rate * h)
    # even chain: F_{2m} = q^2 F_{2m-2} + Simpson panel [2m-2, 2m]
    panels = (h / 3.0) * (q * q * f[0:-2:2] + 4.0 * q * f[1:-1:2] + f[2::2])
    out[2::2] = lfilter([1.0], [1.0, -q * q], panels)
    # odd chain: F_{2m+1} = q F_{2m} + local rule on [2m, 2m+1]
    odd = np.arange(1, n, 2)
    m = min(_LOCAL_POINTS, n)
    start = np.clip(odd - m // 2, 0, n - m)
    offset = odd - 1 - start
    local = np.zeros(odd.size)
    for a in np.unique(offset):
        sel = offset == a
        k, s0 = odd[sel], start[sel]
        acc = np.zeros(k.size)
        for j, wj in enumerate(_interval_weights(m, int(a))):
            node = s0 + j
            acc += wj * f[node] * np.exp(-rate * h * (k - node))
        local[sel] = acc * h
    out[odd] = q * out[odd - 1] + local
    return out


def weighted_cumulative_backward(values: np.ndarray, h: float, rate: float = 0.0) -> np.ndarray:
    """Node-wise ``int_{t_k}^{t_max} exp(-rate (s - t_k)) f(s) ds`` (mirror image)."""
    f = np.asarray(values, dtype=float)
    return weighted_cumulative(f[::-1], h, rate)[::-1].copy()


def cumulative_forward(f: GridFunction) -> GridFunction:
    """Running integral ``int_0^{t_k} f``; exact derivative is ``f`` itself."""
    vals = weighted_cumulative(f.values, f.grid.spacing)
    return GridFunction(f.grid, vals, f.values)


@dataclass(frozen=True)
class BackwardIntegral:
    function: GridFunction
    tail_bound: float


def cumulative_backward(f: GridFunction, tail_bound: float = 0.0) -> BackwardIntegral:
    """Running integral ``int_{t_k}^{t_max} f`` plus the caller's tail bound.

    The tail bound is added to the values (the usual case is a known,
    sign-definite tail) and carried as the error bar.
    """
    tail_bound = float(tail_bound)
    if not tail_bound >= 0:
        raise ValueError("tail_bound must be non-negative")
    vals = weighted_cumulative_backward(f.values, f.grid.spacing) + tail_bound
    return BackwardIntegral(GridFunction(f.grid, vals, -f.values), tail_bound)


# --------------------------------------------------------------------------
# differences and norms


def fd_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative (one-sided at the ends)."""
    f = np.asarray(values, dtype=float)
    n = f.size
    if n < 5:
        return np.gradient(f, h, edge_order=2)
    d = np.empty(n)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    return d


def norm(f: GridFunction, kind: WeightedNormKind) -> float:
    h = f.grid.spacing
    t = f.grid.nodes
    if kind.kind is NormKind.SUP:
        return float(np.max(np.abs(f.values)))
    if kind.kind is NormKind.L1:
        return simpson_sum(np.abs(f.values), h)
    weight = np.exp((2 - kind.N) * t)
    if kind.kind is NormKind.L2_WEIGHTED:
        return float(np.sqrt(simpson_sum(f.values ** 2 * weight, h)))
    if f.deriv is None:
        raise ValueError("mu norm needs derivative samples")
    return float(np.sqrt(simpson_sum((f.deriv ** 2 + f.values ** 2) * weight, h)))


def mu_norm(f: GridFunction, N: int) -> float:
    return norm(f, WeightedNormKind.mu(N))
