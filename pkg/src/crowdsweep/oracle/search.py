"""Brute-force minimization over constant controls, used to check the solvers."""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ..scenario import CorridorScenario, SingleScenario
from . import _backend

Objective = Callable[[np.ndarray], np.ndarray]


def grid_refine_search(objective: Objective, lo: Sequence[float], hi: Sequence[float],
                       levels: int = 3, points: int = 101) -> tuple[np.ndarray, float]:
    """Multi-resolution grid search.

    ``objective`` maps an ``(N, d)`` array of candidates to ``N`` values. Each
    level evaluates ``points`` values per dimension, then shrinks the box ten
    times around the incumbent (clipped to the original box). Ties go to the
    candidate that is smallest in lexicographic order. An objective with a
    ``grid(axes)`` method is evaluated on the tensor grid directly.
    """
    lo0 = np.asarray(lo, dtype=float)
    hi0 = np.asarray(hi, dtype=float)
    if lo0.shape != hi0.shape or np.any(lo0 >= hi0):
        raise ValueError("need lo < hi in every dimension")
    if levels < 1:
        raise ValueError("levels must be at least 1")
    a, b = lo0.copy(), hi0.copy()
    best_x, best_f = None, math.inf
    extra = np.asarray(getattr(objective, "candidates", ()), dtype=float).reshape(-1, len(a))
    extra = extra[np.all((extra >= lo0) & (extra <= hi0), axis=1)]
    if len(extra):
        vals = np.asarray(objective(extra), dtype=float)
        i = int(np.argmin(vals))
        best_x, best_f = extra[i].copy(), float(vals[i])
    for _ in range(levels):
        axes = [np.linspace(a[k], b[k], points) for k in range(len(a))]
        if hasattr(objective, "grid"):
            vals = np.asarray(objective.grid(axes), dtype=float)
        else:
            grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(a))
            vals = np.asarray(objective(grid), dtype=float)
        i = int(np.argmin(vals))
        if vals[i] < best_f:
            idx = np.unravel_index(i, [len(ax) for ax in axes])
            best_x = np.array([ax[j] for ax, j in zip(axes, idx)])
            best_f = float(vals[i])
        half = (b - a) / 20.0
        a = np.maximum(best_x - half, lo0)
        b = np.minimum(best_x + half, hi0)
    return best_x, best_f


def corridor_offsets(sc: CorridorScenario) -> np.ndarray:
    """Cumulative contact distances from the rearmost agent."""
    sums = [sc.radii[i] + sc.radii[i + 1] for i in range(sc.n - 1)]
    return np.concatenate([[0.0], np.cumsum(sums)])


def corridor_terminal_rho(sc: CorridorScenario, controls: np.ndarray, kernel=None) -> np.ndarray:
    """Terminal axis coordinates for a batch of control rows (sticky-particle physics)."""
    controls = np.atleast_2d(np.asarray(controls, dtype=float))
    off = corridor_offsets(sc)
    # forward coordinate z = -rho; subtracting the offsets makes contact mean equality
    w0 = -np.asarray(sc.rho) - off
    u = controls * np.asarray(sc.speeds)[None, :]
    k = kernel or _backend.kernel
    w = np.asarray(k.corridor_terminal(w0, u, float(sc.T)))
    return -(w + off[None, :])


class CorridorObjective:
    """Cost of constant controls under the exact corridor physics."""

    def __init__(self, sc: CorridorScenario, energy: str = "bolza", kernel=None):
        if energy not in ("bolza", "scaled"):
            raise ValueError(f"unknown energy convention {energy!r}")
        self.sc, self.energy = sc, energy
        self.kernel = kernel or _backend.kernel
        self.offsets = corridor_offsets(sc)
        self.w0 = -np.asarray(sc.rho) - self.offsets

    def __call__(self, controls: np.ndarray) -> np.ndarray:
        controls = np.atleast_2d(np.asarray(controls, dtype=float))
        rho = corridor_terminal_rho(self.sc, controls, self.kernel)
        effort = 0.5 * self.sc.tau * self.sc.T * np.sum(controls ** 2, axis=1)
        if self.energy == "scaled":
            with np.errstate(divide="ignore", invalid="ignore"):
                effort = np.where(controls[:, -1] > 0, effort / controls[:, -1], np.inf)
        return 0.5 * np.sum(rho ** 2, axis=1) + effort

    def grid(self, axes) -> np.ndarray:
        return self.kernel.corridor_grid_cost(self.w0, self.offsets, np.asarray(self.sc.speeds),
                                              axes, float(self.sc.T), float(self.sc.tau),
                                              self.energy == "scaled")


def corridor_objective(sc: CorridorScenario, energy: str = "bolza", kernel=None) -> CorridorObjective:
    return CorridorObjective(sc, energy, kernel)


def ratio_line_objective(sc: CorridorScenario, energy: str = "bolza", kernel=None) -> Objective:
    """Corridor cost as a function of the last control alone, ``a_i = (s_i / s_n) a_n``."""
    full = CorridorObjective(sc, energy, kernel)
    ratios = np.asarray(sc.speeds) / sc.speeds[-1]

    def f(last: np.ndarray) -> np.ndarray:
        last = np.asarray(last, dtype=float).reshape(-1)
        return full(last[:, None] * ratios[None, :])

    return f


def single_objective(sc: SingleScenario) -> Objective:
    """Cost of the single-agent contact model for a batch of controls.

    The geometry is rebuilt here from the tangent-line construction, not reused
    from the solver. Controls whose arc would end after ``T`` are outside the
    model and evaluate to ``inf``. The two ends of the excluded interval are
    exposed as ``candidates``.
    """
    x0 = np.array(sc.start.as_tuple())
    des = np.array(sc.destination.as_tuple())
    obs = np.array(sc.obstacle_center.as_tuple())
    R = sc.contact_radius
    D = float(np.linalg.norm(des - x0))
    s, T, tau = sc.speed, sc.T, sc.tau
    hit = _first_hit(x0, des, obs, R)

    if hit is None:
        def f(a):
            a = np.asarray(a, dtype=float).reshape(-1)
            return 0.5 * (D - s * a * T) ** 2 + 0.5 * tau * T * a ** 2
        f.candidates = []
        return f

    pre, x_f = hit
    # tangent points from the destination: angle beta off the des->obs line
    to_obs = obs - des
    dist = float(np.linalg.norm(to_obs))
    beta = math.asin(R / dist)
    tangent_len = math.sqrt(dist * dist - R * R)
    base = math.atan2(to_obs[1], to_obs[0])
    cands = [des + tangent_len * np.array([math.cos(base + sgn * beta), math.sin(base + sgn * beta)])
             for sgn in (1.0, -1.0)]
    x_l = min(cands, key=lambda p: float(np.linalg.norm(p - x_f)))
    cosang = float(np.dot(x_f - obs, x_l - obs)) / (R * R)
    arc = R * math.acos(max(-1.0, min(1.0, cosang)))
    a_reach = pre / (s * T)
    a_min = (pre / s + arc) / T

    def f(a):
        a = np.asarray(a, dtype=float).reshape(-1)
        free = 0.5 * (D - s * a * T) ** 2
        contact = 0.5 * (tangent_len - (T * a - arc - pre / s) * s) ** 2
        term = np.where(a <= a_reach, free, np.where(a >= a_min, contact, np.inf))
        return term + 0.5 * tau * T * a ** 2

    f.candidates = [a_reach, a_min]
    return f


def _first_hit(x0, des, obs, R):
    d = des - x0
    length = float(np.linalg.norm(d))
    if length == 0.0:
        return None
    u = d / length
    w = x0 - obs
    roots = np.roots([1.0, 2.0 * float(w @ u), float(w @ w) - R * R])
    roots = sorted(float(r.real) for r in roots if abs(r.imag) < 1e-9 * max(1.0, R))
    for lam in roots:
        if -1e-12 <= lam <= length:
            lam = max(lam, 0.0)
            return lam, x0 + lam * u
    return None
