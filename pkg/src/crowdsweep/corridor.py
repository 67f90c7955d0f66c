"""Exact corridor kinematics for arbitrary constant controls.

On a line, touching agents move together at the mean of their desired speeds
and never separate again (each cluster is formed by a faster agent catching a
slower one). The pairwise multiplier inside a cluster is the prefix excess of
the desired speeds over the cluster speed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .scenario import CorridorScenario
from .trajectory import PiecewiseTrajectory, axis_trajectory

_EVENT_RTOL = 1e-12


@dataclass(frozen=True)
class CorridorMotion:
    """Piecewise-linear axis coordinates.

    ``rates[k][i]`` is d(rho_i)/dt on ``[breaks[k], breaks[k+1]]``.
    ``etas[k][i]`` is the level of the multiplier between agents ``i`` and
    ``i+1`` on that interval. ``contact[i]`` is the first time the pair
    ``(i, i+1)`` touches, or ``None``.
    """

    rho0: tuple[float, ...]
    breaks: tuple[float, ...]
    rates: tuple[tuple[float, ...], ...]
    etas: tuple[tuple[float, ...], ...]
    contact: tuple[Optional[float], ...]

    def rho_at(self, t: float) -> list[float]:
        rho = list(self.rho0)
        for k, rate in enumerate(self.rates):
            t0, t1 = self.breaks[k], self.breaks[k + 1]
            dt = min(t, t1) - t0
            if dt <= 0:
                break
            rho = [r + v * dt for r, v in zip(rho, rate)]
        return rho

    def final_rho(self) -> list[float]:
        return self.rho_at(self.breaks[-1])

    def eta_at(self, pair: int, t: float) -> float:
        for k in range(len(self.rates)):
            if t < self.breaks[k + 1] or k == len(self.rates) - 1:
                return self.etas[k][pair]
        return 0.0

    def all_merged_time(self) -> Optional[float]:
        """First time every agent belongs to a single cluster."""
        times = [c for c in self.contact]
        if any(c is None for c in times):
            return None
        return max(times)


def corridor_motion(sc: CorridorScenario, controls: Sequence[float]) -> CorridorMotion:
    """Roll the exact cluster dynamics forward on ``[0, T]``."""
    n = sc.n
    if len(controls) != n:
        raise ValueError(f"expected {n} controls, got {len(controls)}")
    u = [a * s for a, s in zip(controls, sc.speeds)]
    sums = [sc.radii[i] + sc.radii[i + 1] for i in range(n - 1)]
    rho = list(sc.rho)
    clusters = [[i] for i in range(n)]
    contact: list[Optional[float]] = [None] * (n - 1)
    t, T = 0.0, sc.T
    tol = _EVENT_RTOL * max(1.0, max(abs(r) for r in rho))

    def cluster_speed(c):
        return sum(u[i] for i in c) / len(c)

    def merge_touching(now):
        merged = True
        while merged:
            merged = False
            for k in range(len(clusters) - 1):
                back, front = clusters[k], clusters[k + 1]
                i = back[-1]
                gap = rho[i] - rho[i + 1] - sums[i]
                if gap <= tol and cluster_speed(back) > cluster_speed(front):
                    clusters[k:k + 2] = [back + front]
                    contact[i] = now
                    rho[i] = rho[i + 1] + sums[i]
                    merged = True
                    break

    breaks, rates, etas = [0.0], [], []
    merge_touching(0.0)
    while True:
        speed = [0.0] * n
        eta = [0.0] * (n - 1)
        for c in clusters:
            v = cluster_speed(c)
            excess = 0.0
            for i in c:
                speed[i] = v
                excess += u[i] - v
                if i != c[-1]:
                    eta[i] = max(excess, 0.0)
        dt = math.inf
        for k in range(len(clusters) - 1):
            i = clusters[k][-1]
            closing = speed[i] - speed[i + 1]
            if closing > 0:
                dt = min(dt, max(rho[i] - rho[i + 1] - sums[i], 0.0) / closing)
        t_next = min(T, t + dt)
        rates.append(tuple(-v for v in speed))
        etas.append(tuple(eta))
        rho = [r - v * (t_next - t) for r, v in zip(rho, speed)]
        t = t_next
        breaks.append(t)
        if t >= T:
            break
        merge_touching(t)
    return CorridorMotion(tuple(sc.rho), tuple(breaks), tuple(rates), tuple(etas),
                          tuple(contact))


def motion_trajectories(sc: CorridorScenario, motion: CorridorMotion) -> list[PiecewiseTrajectory]:
    return [axis_trajectory(sc.destination, sc.axis, motion.rho0[i], motion.breaks,
                            [r[i] for r in motion.rates])
            for i in range(sc.n)]


def eta_samples(motion: CorridorMotion, times) -> dict[str, list[tuple[float, float]]]:
    n = len(motion.rho0)
    return {f"{i + 1}{i + 2}": [(float(t), motion.eta_at(i, float(t))) for t in times]
            for i in range(n - 1)}


def terminal_cost(final_rho: Sequence[float]) -> float:
    return 0.5 * sum(r * r for r in final_rho)
