"""Shooting oracle: integrate the ODE as an initial value problem.

This is independent of the Green-kernel machinery and is used to corroborate
fixed points and the blow-up behaviour of non-decaying trajectories.

For data ``g >= 0`` a trajectory either escapes to ``+inf``, dives to
``-inf``, or (on a single initial value) decays.  The decaying initial value
is always at least the linear bound ``C' lam``: integrating the equation
against ``e^{(1-N)s}`` gives ``w'(0) = int e^{(1-N)s} (lam h1 + Nl(w))`` for
Dirichlet, and ``Nl(w) >= 0``.  The search therefore starts at ``C' lam``
and looks upward for the first escape to ``+inf``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .bounds import necessary_bound
from .datum import ForcingProfile
from .green import BcFamily, check_dimension
from .grid import Grid, GridFunction

log = logging.getLogger(__name__)

CUTOFF = 1e6
DECAY_TOL = 1e-6
RTOL = 1e-10
ATOL = 1e-14


class Outcome(str, enum.Enum):
    DECAYED = "decayed"
    BLEW_UP = "blew_up"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ShootResult:
    t: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    outcome: Outcome
    blowup_time: Optional[float]
    # +1 escaped upward, -1 downward, 0 undecided
    direction: int
    grid: Grid = field(repr=False)

    @property
    def complete(self) -> bool:
        return self.t.size == self.grid.n

    @property
    def trajectory(self) -> Optional[GridFunction]:
        """Samples on the forcing grid, or ``None`` when integration stopped before ``t_max``."""
        if not self.complete:
            return None
        return GridFunction(self.grid, self.w, self.dw)

    def sup_difference(self, other: np.ndarray, t_window: float) -> float:
        """Sup of ``|w - other|`` over nodes with ``t <= t_window``; ``inf`` if not reached."""
        mask = self.t <= t_window + 1e-12
        if self.t.size == 0 or self.t[-1] < t_window - 1e-12:
            return float("inf")
        return float(np.max(np.abs(self.w[mask] - np.asarray(other)[: mask.sum()])))


def _initial_state(init: float, N: int, bc: BcFamily) -> list[float]:
    if bc is BcFamily.DIRICHLET:
        return [0.0, init]
    return [init, (N - 1) * init]


def _integrate(init: float, lam: float, p: ForcingProfile, N: int, bc: BcFamily, t_end: float,
               t_eval: Optional[np.ndarray], cutoff: float, rtol: float):
    c = 0.5 * (N - 1)
    G = p.datum.cumulative
    grow = N - 3

    def rhs(t, y):
        w, dw = y
        e = math.exp(-t)
        h1 = math.exp(grow * t) * float(G(e))
        return [dw, (N - 2) * dw + (N - 1) * w - c * e * w * w - lam * h1]

    def up(t, y):
        return y[0] - cutoff

    def down(t, y):
        return y[0] + cutoff

    up.terminal = down.terminal = True
    return solve_ivp(rhs, (0.0, t_end), _initial_state(init, N, bc), method="RK45",
                     t_eval=t_eval, events=(up, down), rtol=rtol, atol=ATOL)


def _direction(sol) -> int:
    if sol.status == 1:
        return 1 if sol.t_events[0].size > 0 else -1
    if sol.status != 0:
        return 0
    return int(np.sign(sol.y[0, -1]))


def shoot(init: float, lam: float, p: ForcingProfile, N: Optional[int] = None,
          bc: BcFamily | str = BcFamily.DIRICHLET, t_end: Optional[float] = None,
          cutoff: float = CUTOFF, decay_tol: float = DECAY_TOL, rtol: float = RTOL) -> ShootResult:
    """Integrate ``w'' = (N-2) w' + (N-1) w - Nl(w) - lam h1`` from the boundary data.

    ``init`` is ``w'(0)`` for Dirichlet and ``w(0)`` for Navier (whose slope
    is then ``(N-1) w(0)``).  Output is sampled on the profile grid up to
    ``t_end`` (default ``t_max``).
    """
    N = check_dimension(p.N if N is None else N)
    bc = BcFamily.parse(bc)
    t_end = p.grid.t_max if t_end is None else float(t_end)
    nodes = p.grid.nodes[p.grid.nodes <= t_end + 1e-12]
    if nodes.size == 1:
        w0, dw0 = _initial_state(float(init), N, bc)
        return ShootResult(nodes, np.array([w0]), np.array([dw0]), Outcome.INCONCLUSIVE, None, 0, p.grid)
    try:
        sol = _integrate(float(init), float(lam), p, N, bc, float(nodes[-1]), nodes, cutoff, rtol)
    except (ValueError, FloatingPointError, OverflowError) as exc:
        log.debug("shoot failed: %s", exc)
        empty = np.zeros(0)
        return ShootResult(empty, empty, empty, Outcome.INCONCLUSIVE, None, 0, p.grid)

    t, w, dw = sol.t, sol.y[0], sol.y[1]
    direction = _direction(sol)
    if sol.status == 1:
        when = float(sol.t_events[0][0] if direction > 0 else sol.t_events[1][0])
        return ShootResult(t, w, dw, Outcome.BLEW_UP, when, direction, p.grid)
    if sol.status != 0 or t.size == 0:
        return ShootResult(t, w, dw, Outcome.INCONCLUSIVE, None, 0, p.grid)
    outcome = Outcome.DECAYED if abs(float(w[-1])) <= decay_tol else Outcome.INCONCLUSIVE
    return ShootResult(t, w, dw, outcome, None, direction, p.grid)


def fate(init: float, lam: float, p: ForcingProfile, N: Optional[int] = None,
         bc: BcFamily | str = BcFamily.DIRICHLET, cutoff: float = CUTOFF, rtol: float = RTOL) -> int:
    """+1 if the trajectory escapes upward by ``t_max``, -1 if it dives, 0 if undecided."""
    N = check_dimension(p.N if N is None else N)
    try:
        sol = _integrate(float(init), float(lam), p, N, BcFamily.parse(bc), p.grid.t_max, None,
                         cutoff, rtol)
    except (ValueError, FloatingPointError, OverflowError):
        return 0
    return _direction(sol)


def find_decaying(lam: float, p: ForcingProfile, N: Optional[int] = None,
                  bc: BcFamily | str = BcFamily.DIRICHLET, max_offset: float = 1e4,
                  max_bisect: int = 200) -> Optional[float]:
    """Initial value whose trajectory neither escapes up nor dives down.

    Scans upward from ``C' lam`` with geometrically growing offsets until a
    trajectory escapes to ``+inf``, then bisects the up/down boundary to
    machine precision.  Returns ``None`` when no upward escape is found, i.e.
    every trajectory in the window dives.
    """
    N = check_dimension(p.N if N is None else N)
    bc = BcFamily.parse(bc)
    lam = float(lam)
    if lam == 0.0:
        return 0.0

    def sign(x: float) -> int:
        return fate(x, lam, p, N, bc)

    lower = necessary_bound(p, N, bc) * lam
    lo, f_lo = lower, sign(lower)
    if f_lo == 0:
        return lo
    # a first step that overshoots the root is harmless: bisection takes over
    step = max(1e-3 * abs(lower), 1e-12)
    if f_lo > 0:
        # the window start already escapes; walk down to find a dive
        hi = lo
        while True:
            lo = hi - step
            f = sign(lo)
            if f == 0:
                return lo
            if f < 0:
                break
            hi, step = lo, 2 * step
            if step > max_offset:
                return None
    else:
        while True:
            hi = lower + step
            f = sign(hi)
            if f == 0:
                return hi
            if f > 0:
                break
            lo, step = hi, 2 * step
            if step > max_offset:
                return None

    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f = sign(mid)
        if f == 0:
            return mid
        if f > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
