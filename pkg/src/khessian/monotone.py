"""Lower/upper solutions and the monotone iteration between them.

The lower solution is the linear response ``alpha = lam * L^{-1} h1`` and the
upper solution is a constant ``beta``.  Starting from ``alpha`` the iteration

    (L + M) w_k = Nl(w_{k-1}) + M w_{k-1} + lam h1

climbs node-wise towards a fixed point.  For ``lam >= 0`` the shift ``M`` is
zero and this is the plain iteration.  For ``lam < 0`` the iterates are
negative, where ``Nl`` is decreasing, so ``M = (N-1) * max(-alpha)`` restores
the order-preserving property.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .datum import ForcingProfile
from .green import BcFamily, apply_inverse, check_dimension
from .grid import GridFunction
from .picard import RESIDUAL_TOL, Solution, _solution, nonlinearity

log = logging.getLogger(__name__)

ORDER_SLACK = 1e-12


class OrderingViolation(RuntimeError):
    """An iterate broke the monotone chain by more than the allowed slack."""

    def __init__(self, message: str, gap: float, iteration: int):
        super().__init__(message)
        self.gap = gap
        self.iteration = iteration


class NoUpperSolution(ValueError):
    """No constant upper solution in (0, 2) exists for this lambda."""


@dataclass
class MonotoneRun:
    alpha: GridFunction
    beta: float
    iterates_kept: int
    final: Solution
    ordering_violation: float
    shift: float = 0.0
    steps: tuple = ()


def lower_solution(lam: float, p: ForcingProfile, bc: BcFamily | str) -> GridFunction:
    check_dimension(p.N)
    return float(lam) * apply_inverse(p.function, p.N, BcFamily.parse(bc)).w


def upper_constant(lam: float, p: ForcingProfile, N: Optional[int] = None) -> Optional[float]:
    """Smallest constant ``beta`` in (0, 2) with ``(N-1) beta >= (N-1)/2 beta^2 + lam h1``.

    Returns ``None`` when no such constant exists.  ``beta = 1`` is returned
    whenever it works, since it admits the largest forcing.
    """
    N = check_dimension(p.N if N is None else N)
    peak = float(np.max(float(lam) * p.values))
    half = 0.5 * (N - 1)
    if peak <= half:
        return 1.0
    # beta^2 - 2 beta + 2 peak / (N-1) <= 0 has real roots only when peak <= (N-1)/2,
    # which was handled above
    disc = 1.0 - peak / half
    if disc < 0:
        return None
    return 1.0 - math.sqrt(disc)


def _shift_for(alpha: GridFunction, N: int) -> float:
    low = float(np.min(alpha.values))
    return (N - 1) * max(0.0, -low)


def _consistent_lower(alpha: GridFunction, forcing: np.ndarray, N: int, bc: BcFamily,
                      shift: float, max_iter: int = 5000) -> GridFunction:
    """Fixed point of ``a = (L + M)^{-1}(M a + lam h1)`` started from ``alpha``.

    In exact arithmetic this is ``alpha`` itself.  On the grid the shifted and
    unshifted kernels differ by quadrature error, and that difference would
    otherwise show up as a spurious ordering violation on the first step.
    """
    scale = max(1.0, float(np.max(np.abs(alpha.values))))
    cur = alpha
    for _ in range(max_iter):
        nxt = apply_inverse(GridFunction(alpha.grid, shift * cur.values + forcing), N, bc,
                            shift=shift).w
        step = float(np.max(np.abs(nxt.values - cur.values)))
        cur = nxt
        if step <= 1e-15 * scale:
            break
    return cur


def monotone_iterate(lam: float, p: ForcingProfile, bc: BcFamily | str, tol: float = 1e-12,
                     max_iter: int = 500, keep_steps: bool = False) -> MonotoneRun:
    """Run the monotone iteration from ``alpha`` and check the chain ``alpha <= w_k <= beta``.

    Raises ``NoUpperSolution`` when no constant upper solution exists and
    ``OrderingViolation`` when an iterate falls out of order.
    """
    bc = BcFamily.parse(bc)
    N = check_dimension(p.N)
    if not tol > 0 or max_iter < 1:
        raise ValueError("tol must be positive and max_iter at least 1")
    lam = float(lam)
    beta = upper_constant(lam, p, N)
    if beta is None:
        raise NoUpperSolution(f"no constant upper solution in (0, 2) for lambda={lam:g}")
    alpha = lower_solution(lam, p, bc)
    if np.any(alpha.values[1:] >= beta):
        raise NoUpperSolution("lower solution is not below the upper constant")

    shift = _shift_for(alpha, N)
    forcing = lam * p.values
    if shift > 0:
        alpha = _consistent_lower(alpha, forcing, N, bc, shift)
    # quadrature noise is relative, so the slack follows the size of the iterates
    slack = ORDER_SLACK * max(1.0, float(np.max(np.abs(alpha.values))))
    prev = alpha
    worst = 0.0
    steps = []
    it = 0
    status = "max_iter"
    for it in range(1, max_iter + 1):
        rhs = nonlinearity(prev, N).values + shift * prev.values + forcing
        cur = apply_inverse(GridFunction(p.grid, rhs), N, bc, shift=shift).w
        rise = cur.values - prev.values
        gap = min(float(np.min(rise)), beta - float(np.max(cur.values)))
        worst = min(worst, gap)
        if gap < -slack:
            raise OrderingViolation(
                f"monotone chain broken at iteration {it} (gap {gap:.3e})", gap, it)
        step = float(np.max(np.abs(rise)))
        if keep_steps:
            steps.append(rise)
        prev = cur
        if step <= tol:
            status = "converged"
            break

    sol = _solution(prev, lam, p, bc, iterations=it, converged=False, status=status,
                    method="monotone")
    sol.converged = status == "converged" and sol.residual_sup <= RESIDUAL_TOL
    if status == "converged" and not sol.converged:
        sol.status = "residual above tolerance"
    log.debug("monotone N=%d bc=%s lam=%g shift=%g: %s after %d", N, bc.value, lam, shift, sol.status, it)
    return MonotoneRun(alpha, beta, it, sol, worst, shift, tuple(steps))
