"""Two agents heading to a common destination along a line.

Agent 1 is the farther (and therefore faster) one. While they touch, the
controls obey ``a1 * s2 = a2 * s1`` and the pair is described by ``a2`` alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .corridor import corridor_motion, eta_samples, motion_trajectories
from .errors import BelowContactBound, ContactWouldOccur, NonPositiveControl
from .optimizer import Quadratic1D, argmin_quadratic, solve_small_qp
from .scenario import CorridorScenario, SolveReport

TOUCH_RTOL = 1e-9
GAP_SLACK = 1e-12


@dataclass(frozen=True)
class TwoAgentSchedule:
    t_f12: Optional[float] = None


@dataclass(frozen=True)
class CorridorState:
    half_gap: float
    eta12: float


def _check(sc: CorridorScenario) -> None:
    if sc.n != 2:
        raise ValueError(f"two-agent solver given {sc.n} agents")


def initially_touching(sc: CorridorScenario) -> bool:
    scale = max(1.0, max(sc.rho))
    return sc.half_gap(0) <= TOUCH_RTOL * scale


def eta12_level(sc: CorridorScenario, a2: float) -> float:
    """Multiplier level while in contact, with ``a1`` tied to ``a2``."""
    if a2 <= 0:
        raise NonPositiveControl(f"control must be positive, got {a2}")
    s1, s2 = sc.speeds
    return a2 * (s1 * s1 - s2 * s2) / (2.0 * s2)


def state(sc: CorridorScenario, a2: float) -> CorridorState:
    return CorridorState(sc.half_gap(0), eta12_level(sc, a2))


def contact_time_two(sc: CorridorScenario, a2: float) -> TwoAgentSchedule:
    lam = 0.0 if initially_touching(sc) else sc.half_gap(0)
    eta = eta12_level(sc, a2)
    if lam == 0.0:
        return TwoAgentSchedule(0.0)
    if eta <= 0:
        return TwoAgentSchedule(None)
    t = lam / eta
    return TwoAgentSchedule(t if t <= sc.T else None)


def contact_lower_bound(sc: CorridorScenario) -> float:
    """Smallest ``a2`` for which contact happens no later than ``T``."""
    s1, s2 = sc.speeds
    lam = 0.0 if initially_touching(sc) else sc.half_gap(0)
    return 2.0 * s2 * lam / (sc.T * (s1 * s1 - s2 * s2))


def _contact_quadratic(sc: CorridorScenario) -> Quadratic1D:
    s1, s2 = sc.speeds
    r1, r2 = sc.rho
    T = sc.T
    lam = 0.0 if initially_touching(sc) else sc.half_gap(0)
    common = T * (s1 * s1 + s2 * s2) / (2.0 * s2)
    return Quadratic1D.from_affine_residuals(
        [r1 - lam, r2 + lam], [-common, -common],
        0.5 * sc.tau * T * (1.0 + (s1 / s2) ** 2),
        lo=contact_lower_bound(sc))


def cost_contact_branch(sc: CorridorScenario, a2: float) -> float:
    _check(sc)
    q = _contact_quadratic(sc)
    if a2 < q.lo * (1.0 - 1e-12):
        raise BelowContactBound(f"a2={a2} below contact bound {q.lo}")
    return q(a2)


def free_gap_ok(sc: CorridorScenario, a1: float, a2: float) -> bool:
    s1, s2 = sc.speeds
    return sc.T * (a1 * s1 - a2 * s2) <= 2.0 * sc.half_gap(0) + GAP_SLACK


def cost_free_branch(sc: CorridorScenario, a1: float, a2: float) -> float:
    _check(sc)
    if not free_gap_ok(sc, a1, a2):
        raise ContactWouldOccur(f"controls ({a1}, {a2}) bring the agents into contact")
    s1, s2 = sc.speeds
    r1, r2 = sc.rho
    T = sc.T
    return 0.5 * ((r1 - T * a1 * s1) ** 2 + (r2 - T * a2 * s2) ** 2) \
        + 0.5 * sc.tau * T * (a1 * a1 + a2 * a2)


def _solve_free(sc: CorridorScenario) -> tuple[np.ndarray, float]:
    s = np.array(sc.speeds)
    rho = np.array(sc.rho)
    T = sc.T
    Q = np.diag(T * T * s * s + sc.tau * T)
    c = -T * s * rho
    G = [[T * s[0], -T * s[1]], [-1.0, 0.0], [0.0, -1.0]]
    h = [2.0 * sc.half_gap(0), 0.0, 0.0]
    x, val = solve_small_qp(Q, c, G, h)
    return np.maximum(x, 0.0), val + 0.5 * float(rho @ rho)


def pair_contact_time(sc: CorridorScenario, a1: float, a2: float) -> Optional[float]:
    """First contact time for arbitrary controls, ``None`` if not before ``T``."""
    s1, s2 = sc.speeds
    closing = a1 * s1 - a2 * s2
    if initially_touching(sc):
        return 0.0 if closing > 0 else None
    if closing <= 0:
        return None
    t = 2.0 * sc.half_gap(0) / closing
    return t if t <= sc.T * (1.0 + 1e-12) else None


def trajectories_two(sc: CorridorScenario, a):
    return motion_trajectories(sc, corridor_motion(sc, a))


def solve_two(sc: CorridorScenario, samples: int = 601) -> SolveReport:
    """Cheaper of the contact branch (1-D in ``a2``) and the contact-free branch."""
    _check(sc)
    s1, s2 = sc.speeds
    a2, J = argmin_quadratic(_contact_quadratic(sc))
    a = (s1 / s2 * a2, a2)
    branch = "contact"
    if not initially_touching(sc):
        x, Jf = _solve_free(sc)
        if Jf < J - 1e-12 * max(1.0, abs(J)):
            a, J, branch = (float(x[0]), float(x[1])), Jf, "free"
    if branch == "contact":
        sched = TwoAgentSchedule(contact_time_two(sc, a2).t_f12 if a2 > 0 else None)
    else:
        sched = TwoAgentSchedule(pair_contact_time(sc, *a))
    motion = corridor_motion(sc, a)
    times = np.linspace(0.0, sc.T, samples)
    return SolveReport(controls=a, cost=J, schedule=sched,
                       trajectories=motion_trajectories(sc, motion),
                       eta=eta_samples(motion, times), tau=sc.tau, branch=branch)
