"""Back-transformation ``w(t) -> u(r)`` and checks on the radial profile.

With ``r = exp(-t)`` and ``v = u'`` the solvers work with ``w(t) = -v(e^{-t})``.
Going back:

    u(r_k) = int_0^{t_k} w(s) e^{-s} ds     (so u(1) = 0)
    u'     = -w
    u''    = e^{t} w'
    u'''   = -e^{2t} (w' + w'')

The last line is evaluated through ``w + w' = B`` with
``B(t) = int_t^inf e^{-(N-1)(s-t)} (Nl(w) + lam h1) ds``, the backward kernel
of the Green formula, and a fourth-order difference of ``B``.  Forming
``w' + w''`` from the stored arrays would cancel two ``e^{-t}``-sized terms
to leave an ``e^{-2t}``-sized one, which is hopeless at ``r = e^{-40}``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .datum import Datum, ForcingProfile
from .green import BcFamily, check_dimension
from .grid import GridFunction, fd_derivative, weighted_cumulative, weighted_cumulative_backward
from .picard import Solution, nonlinearity

SYMMETRY_TOL = 1e-4
RESIDUAL_MARGIN = 2
COLUMNS = ("r", "u", "u1", "u2", "u3")


@dataclass(frozen=True)
class RadialProfile:
    r_nodes: np.ndarray
    u: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    bc: BcFamily
    N: int

    def __post_init__(self):
        n = len(self.r_nodes)
        for name in COLUMNS[1:]:
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name} has the wrong length")
        if n > 1 and np.any(np.diff(self.r_nodes) >= 0):
            raise ValueError("r nodes must be strictly decreasing")

    @property
    def t_nodes(self) -> np.ndarray:
        return -np.log(self.r_nodes)

    def boundary_row(self) -> float:
        """Second boundary condition at ``r = 1``: ``u'(1)`` or ``u''(1) + (N-1) u'(1)``."""
        if self.bc is BcFamily.DIRICHLET:
            return float(self.u1[0])
        return float(self.u2[0] + (self.N - 1) * self.u1[0])

    @classmethod
    def empty(cls, bc: BcFamily | str = BcFamily.DIRICHLET, N: int = 2) -> "RadialProfile":
        z = np.zeros(0)
        return cls(z, z, z, z, z, BcFamily.parse(bc), N)


def profile_from_w(w: GridFunction, N: int, bc: BcFamily | str, lam: float = 0.0,
                   forcing: Optional[ForcingProfile] = None,
                   include_nonlinear: bool = True) -> RadialProfile:
    """Profile of an arbitrary ``w`` with closed-form ``w'``.

    Without ``forcing`` the backward kernel is replaced by ``w + w'`` itself,
    which is fine for moderate ``t`` but loses relative accuracy deep in the
    tail.  ``include_nonlinear=False`` builds the kernel for the linear
    problem.
    """
    N = check_dimension(N)
    bc = BcFamily.parse(bc)
    if w.deriv is None:
        w = w.with_fd_deriv()
    t = w.grid.nodes
    hs = w.grid.spacing
    r = np.exp(-t)
    u = weighted_cumulative(w.values * r, hs)
    u1 = -w.values
    u2 = w.deriv / r
    if forcing is not None:
        rhs = lam * forcing.values
        if include_nonlinear:
            rhs = rhs + nonlinearity(w, N).values
        kernel = weighted_cumulative_backward(rhs, hs, rate=N - 1)
    else:
        kernel = w.values + w.deriv
    u3 = -fd_derivative(kernel, hs) / (r * r)
    return RadialProfile(r, u, u1, u2, u3, bc, N)


def w_to_profile(sol: Solution) -> RadialProfile:
    if not sol.converged:
        raise ValueError(f"solution did not converge ({sol.status}); no profile to reconstruct")
    return profile_from_w(sol.w, sol.N, sol.bc, sol.lam, sol.forcing)


def residual_profile(profile: RadialProfile, lam: float, d: Datum,
                     include_nonlinear: bool = True) -> np.ndarray:
    """``r^2`` times the residual of the once-integrated equation

        v'' + (N-1)/r v' - (N-1)/r^2 v - (N-1)/2 v^2/r - lam G(r)/r^{N-1}

    The ``r^2`` factor keeps the check on the same scale as the equation in
    ``t``; unscaled, the residual would be inflated by ``e^{2t}``.
    """
    N = profile.N
    r = profile.r_nodes
    v, dv, ddv = profile.u1, profile.u2, profile.u3
    res = r * r * ddv + (N - 1) * r * dv - (N - 1) * v - lam * d.cumulative(r) * r ** (3 - N)
    if include_nonlinear:
        res = res - 0.5 * (N - 1) * r * v * v
    return res


def pde_residual(profile: RadialProfile, lam: float, d: Datum, include_nonlinear: bool = True,
                 r_max: Optional[float] = None, margin: int = RESIDUAL_MARGIN) -> float:
    """Sup of the scaled once-integrated residual away from ``r = 1``."""
    if profile.r_nodes.size == 0:
        return 0.0
    res = residual_profile(profile, lam, d, include_nonlinear)
    mask = np.arange(res.size) >= margin
    if r_max is not None:
        mask &= profile.r_nodes <= r_max
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(res[mask])))


def symmetry_check(profile: RadialProfile) -> tuple[float, float]:
    """``(|u'|, |u'''|)`` at the smallest radius on the grid."""
    if profile.r_nodes.size == 0:
        return 0.0, 0.0
    return abs(float(profile.u1[-1])), abs(float(profile.u3[-1]))


def export_profile(profile: RadialProfile, fmt: str = "csv") -> bytes:
    fmt = fmt.lower()
    cols = [profile.r_nodes, profile.u, profile.u1, profile.u2, profile.u3]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in zip(*cols):
            writer.writerow([f"{x:.17g}" for x in row])
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        doc = {"N": profile.N, "bc": profile.bc.value}
        doc.update({name: [float(x) for x in col] for name, col in zip(COLUMNS, cols)})
        return json.dumps(doc).encode("utf-8")
    raise ValueError(f"unknown export format {fmt!r}; expected csv or json")


def load_profile_json(data: bytes | str) -> RadialProfile:
    doc = json.loads(data)
    arrays = [np.asarray(doc[name], dtype=float) for name in COLUMNS]
    return RadialProfile(*arrays, bc=BcFamily.parse(doc["bc"]), N=int(doc["N"]))


def profile_filename(N: int, bc: BcFamily | str, lam: float) -> str:
    return f"profile_N{N}_{BcFamily.parse(bc).value}_lambda{lam:g}.csv"
