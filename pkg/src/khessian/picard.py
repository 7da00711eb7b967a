"""Contraction-mapping solver for the transformed radial problem.

The fixed-point map is ``T(phi) = L^{-1}(Nl(phi) + lam * h1)`` with the
quadratic term ``Nl(w) = (N-1)/2 * exp(-t) * w^2``.  Iteration starts at the
linear response ``w0 = lam * L^{-1} h1`` and must stay in the mu-norm ball of
radius ``rho`` around it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .datum import ForcingProfile
from .green import BcFamily, apply_forward, apply_inverse, check_dimension
from .grid import GridFunction, mu_norm

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-6
# steps below this are round-off; their ratios say nothing about contraction
_NOISE_FLOOR = 1e-14


@dataclass(frozen=True)
class PicardConfig:
    lam: float
    tol: float = 1e-12
    max_iter: int = 200
    rho: Optional[float] = None

    def __post_init__(self):
        if not np.isfinite(self.lam):
            raise ValueError("lambda must be finite")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.rho is not None and not self.rho > 0:
            raise ValueError("rho must be positive")


@dataclass
class Solution:
    w: GridFunction
    N: int
    bc: BcFamily
    lam: float
    mu_norm: float
    residual_sup: float
    iterations: int
    converged: bool
    contraction_ratios: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    rho: Optional[float] = None
    status: str = "converged"
    method: str = "picard"
    forcing: Optional[ForcingProfile] = field(default=None, repr=False)

    @property
    def w_deriv(self) -> GridFunction:
        return GridFunction(self.w.grid, self.w.deriv)

    @property
    def init_value(self) -> float:
        """Free initial datum: ``w'(0)`` for Dirichlet, ``w(0)`` for Navier."""
        return float(self.w.deriv[0] if self.bc is BcFamily.DIRICHLET else self.w.values[0])

    def diagnostics(self) -> dict:
        return {
            "method": self.method,
            "status": self.status,
            "converged": self.converged,
            "iterations": self.iterations,
            "residual_sup": self.residual_sup,
            "mu_norm": self.mu_norm,
            "contraction_ratios": list(self.contraction_ratios),
            "max_contraction_ratio": max(self.contraction_ratios, default=0.0),
            "rho": self.rho,
            "init_value": self.init_value,
        }


def nonlinearity(w: GridFunction, N: int) -> GridFunction:
    """``(N-1)/2 * exp(-t) * w^2`` node-wise (with its derivative when ``w'`` is known)."""
    t = w.grid.nodes
    e = np.exp(-t)
    c = 0.5 * (N - 1)
    values = c * e * w.values ** 2
    deriv = None
    if w.deriv is not None:
        deriv = c * e * (2.0 * w.values * w.deriv - w.values ** 2)
    return GridFunction(w.grid, values, deriv)


def fixed_point_residual(w: GridFunction, lam: float, p: ForcingProfile, N: int) -> float:
    """Sup over interior nodes of ``|L w - Nl(w) - lam h1|``."""
    r = apply_forward(w, N).values - nonlinearity(w, N).values - lam * p.values
    return float(np.max(np.abs(r[1:-1])))


def _solution(w: GridFunction, lam: float, p: ForcingProfile, bc: BcFamily, **kw) -> Solution:
    N = p.N
    return Solution(w=w, N=N, bc=bc, lam=float(lam), mu_norm=mu_norm(w, N),
                    residual_sup=fixed_point_residual(w, lam, p, N), forcing=p, **kw)


def linear_seed(lam: float, p: ForcingProfile, bc: BcFamily | str) -> Solution:
    """``w0 = lam * L^{-1} h1``: the ball centre, and the lower solution for ``lam >= 0``."""
    bc = BcFamily.parse(bc)
    check_dimension(p.N)
    base = apply_inverse(p.function, p.N, bc).w
    w0 = float(lam) * base
    return _solution(w0, lam, p, bc, iterations=0, converged=True, status="linear")


def picard_step(phi: GridFunction, lam: float, p: ForcingProfile, bc: BcFamily | str) -> GridFunction:
    rhs = nonlinearity(phi, p.N).values + float(lam) * p.values
    return apply_inverse(GridFunction(p.grid, rhs), p.N, BcFamily.parse(bc)).w


def solve_picard(cfg: PicardConfig, p: ForcingProfile, bc: BcFamily | str, N: Optional[int] = None,
                 start: Optional[GridFunction] = None) -> Solution:
    """Iterate the fixed-point map from ``w0`` (or ``start``) until the mu-norm step is below ``tol``.

    Loss of contraction or leaving the ball is reported through
    ``converged=False`` and ``status``, not raised.
    """
    bc = BcFamily.parse(bc)
    N = check_dimension(p.N if N is None else N)
    if N != p.N:
        raise ValueError("forcing profile was built for a different N")
    lam = float(cfg.lam)
    w0 = linear_seed(lam, p, bc).w
    centre_norm = mu_norm(w0, N)
    rho = cfg.rho if cfg.rho is not None else 2.0 * centre_norm + cfg.tol

    current = w0 if start is None else start
    steps: list[float] = []
    ratios: list[float] = []
    status = "max_iter"
    it = 0
    for it in range(1, cfg.max_iter + 1):
        try:
            nxt = picard_step(current, lam, p, bc)
        except ValueError as exc:
            status = f"diverged: {exc}"
            break
        step = mu_norm(nxt - current, N)
        if steps and steps[-1] > _NOISE_FLOOR:
            ratios.append(step / steps[-1])
        steps.append(step)
        current = nxt
        if not np.isfinite(step):
            status = "diverged: non-finite iterate"
            break
        if mu_norm(current - w0, N) > rho:
            status = "diverged: left the ball"
            break
        if step <= cfg.tol:
            status = "converged"
            break
        if len(ratios) >= 3 and all(r >= 1.0 for r in ratios[-3:]):
            status = "diverged: step growth"
            break

    sol = _solution(current, lam, p, bc, iterations=it, converged=False,
                    contraction_ratios=ratios, steps=steps, rho=rho, status=status)
    sol.converged = status == "converged" and sol.residual_sup <= RESIDUAL_TOL
    if status == "converged" and not sol.converged:
        sol.status = "residual above tolerance"
    log.debug("picard N=%d bc=%s lam=%g: %s after %d iterations", N, bc.value, lam, sol.status, it)
    return sol
