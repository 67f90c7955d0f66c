"""Small deterministic minimizers used by the analytic solvers.

Ties are always broken toward the smaller control.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import EmptyInterval


@dataclass(frozen=True)
class Quadratic1D:
    """``c2 x**2 + c1 x + c0`` restricted to ``[lo, hi]``."""

    c2: float
    c1: float
    c0: float
    lo: float = -math.inf
    hi: float = math.inf

    def __call__(self, x: float) -> float:
        return (self.c2 * x + self.c1) * x + self.c0

    @classmethod
    def from_affine_residuals(cls, r0, r1, weight: float, linear: float = 0.0,
                              lo: float = -math.inf, hi: float = math.inf) -> "Quadratic1D":
        """``0.5 * |r0 + x r1|**2 + weight * x**2 + linear * x``."""
        r0 = np.asarray(r0, dtype=float)
        r1 = np.asarray(r1, dtype=float)
        return cls(0.5 * float(r1 @ r1) + weight,
                   float(r0 @ r1) + linear,
                   0.5 * float(r0 @ r0), lo, hi)


def argmin_quadratic(q: Quadratic1D) -> tuple[float, float]:
    """Clamp the vertex of a convex quadratic into its interval."""
    if q.lo > q.hi:
        raise EmptyInterval(f"[{q.lo}, {q.hi}]")
    if q.c2 <= 0:
        raise ValueError("quadratic must be strictly convex")
    x = -q.c1 / (2.0 * q.c2)
    x = min(max(x, q.lo), q.hi)
    return x, q(x)


def minimize_scalar(f: Callable[[float], float], lo: float, hi: float,
                    tol: float = 1e-10) -> tuple[float, float]:
    """Global-ish 1-D minimization: 1001-point scan, then bounded refinement.

    Exact for unimodal ``f`` up to ``tol``; a constant ``f`` returns ``lo``.
    """
    if lo > hi:
        raise EmptyInterval(f"[{lo}, {hi}]")
    if lo == hi:
        return lo, f(lo)
    xs = np.linspace(lo, hi, 1001)
    fs = np.array([f(x) for x in xs])
    i = int(np.argmin(fs))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    res = optimize.minimize_scalar(f, bounds=(a, b), method="bounded",
                                   options={"xatol": tol})
    if res.fun < fs[i]:
        return float(res.x), float(res.fun)
    return float(xs[i]), float(fs[i])


def solve_small_qp(Q, c, G=None, h=None, tol: float = 1e-10) -> Optional[tuple[np.ndarray, float]]:
    """Minimize ``0.5 x'Qx + c'x`` subject to ``G x <= h`` (Q positive definite).

    Intended for a handful of variables and constraints: every active set is
    tried and the best KKT point is kept. Returns ``None`` if nothing is feasible.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    c = np.asarray(c, dtype=float)
    n = len(c)
    if G is None or len(G) == 0:
        x = np.linalg.solve(Q, -c)
        return x, float(0.5 * x @ Q @ x + c @ x)
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float)
    m = len(h)
    scale = 1.0 + np.abs(h)
    best = None
    for k in range(min(m, n) + 1):
        for act in itertools.combinations(range(m), k):
            act = list(act)
            if act:
                A = G[act]
                K = np.block([[Q, A.T], [A, np.zeros((k, k))]])
                rhs = np.concatenate([-c, h[act]])
                try:
                    sol = np.linalg.solve(K, rhs)
                except np.linalg.LinAlgError:
                    continue
                x, lam = sol[:n], sol[n:]
                if np.any(lam < -tol * (1.0 + np.abs(lam).max())):
                    continue
            else:
                x = np.linalg.solve(Q, -c)
            if np.any(G @ x - h > tol * scale):
                continue
            val = float(0.5 * x @ Q @ x + c @ x)
            if best is None or val < best[1] - 1e-14 * (1.0 + abs(val)):
                best = (x, val)
    return best
