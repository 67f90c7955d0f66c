"""Three agents heading to a common destination along a line.

On the contact branch all controls follow ``a_i = (s_i / s3) * a3`` and the
problem is one-dimensional in ``a3``. The order in which the two pairs meet is
fixed by the initial data alone (see :func:`case_discriminant`).

``energy="bolza"`` charges ``(tau*T/2) * sum(a_i**2)``. ``energy="scaled"``
charges ``(tau*T/2) * sum(a_i**2) / a3``, energy per unit of the last control;
in that mode only the contact branch is searched.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .corridor import corridor_motion, eta_samples, motion_trajectories
from .errors import NonPositiveControl
from .optimizer import Quadratic1D, argmin_quadratic, solve_small_qp
from .scenario import CorridorScenario, SolveReport

CASE_RTOL = 1e-9
ENERGIES = ("bolza", "scaled")


class ContactCase(str, enum.Enum):
    PAIR12_FIRST = "Pair12First"
    PAIR23_FIRST = "Pair23First"
    SIMULTANEOUS = "Simultaneous"


@dataclass(frozen=True)
class ThreeAgentSchedule:
    t_f12: Optional[float] = None
    t_f23: Optional[float] = None
    t_f123: Optional[float] = None
    case: Optional[ContactCase] = None


@dataclass(frozen=True)
class ThreeAgentMultipliers:
    """Piecewise-constant levels: ``eta12[k]`` holds on ``[breaks[k], breaks[k+1])``."""

    breaks: tuple[float, ...]
    eta12: tuple[float, ...]
    eta23: tuple[float, ...]

    def at(self, t: float) -> tuple[float, float]:
        k = int(np.searchsorted(self.breaks, t, side="right")) - 1
        k = min(max(k, 0), len(self.eta12) - 1)
        return self.eta12[k], self.eta23[k]


def _check(sc: CorridorScenario) -> None:
    if sc.n != 3:
        raise ValueError(f"three-agent solver given {sc.n} agents")


def _sq(sc):
    return [s * s for s in sc.speeds]


def case_discriminant(sc: CorridorScenario) -> ContactCase:
    """Which pair meets first on the contact branch (independent of ``a3``)."""
    _check(sc)
    q1, q2, q3 = _sq(sc)
    r12 = sc.half_gap(0) / (q1 - q2)
    r23 = sc.half_gap(1) / (q2 - q3)
    if abs(r12 - r23) <= CASE_RTOL * max(1.0, abs(r12), abs(r23)):
        return ContactCase.SIMULTANEOUS
    return ContactCase.PAIR12_FIRST if r12 < r23 else ContactCase.PAIR23_FIRST


def ratio_controls(sc: CorridorScenario, a3: float) -> tuple[float, float, float]:
    s1, s2, s3 = sc.speeds
    return (s1 / s3 * a3, s2 / s3 * a3, a3)


def _triple_time_constant(sc: CorridorScenario, case: ContactCase) -> float:
    """``C`` with ``t_f123 = C / a3``."""
    q1, q2, q3 = _sq(sc)
    s3 = sc.speeds[2]
    l12, l23 = sc.half_gap(0), sc.half_gap(1)
    if case is ContactCase.PAIR12_FIRST:
        return 2.0 * (2.0 * l23 + l12) * s3 / (q1 + q2 - 2.0 * q3)
    if case is ContactCase.PAIR23_FIRST:
        return 2.0 * (2.0 * l12 + l23) * s3 / (2.0 * q1 - q2 - q3)
    return 2.0 * l12 * s3 / (q1 - q2)


def contact_times_three(sc: CorridorScenario, a3: float,
                        case: Optional[ContactCase] = None) -> ThreeAgentSchedule:
    if a3 <= 0:
        raise NonPositiveControl(f"control must be positive, got {a3}")
    case = case or case_discriminant(sc)
    a1, a2, _ = ratio_controls(sc, a3)
    s1, s2, s3 = sc.speeds
    t123 = _triple_time_constant(sc, case) / a3
    if case is ContactCase.PAIR12_FIRST:
        t12 = sc.half_gap(0) / ((a1 * s1 - a2 * s2) / 2.0)
        t23 = t123
    elif case is ContactCase.PAIR23_FIRST:
        t23 = sc.half_gap(1) / ((a2 * s2 - a3 * s3) / 2.0)
        t12 = t123
    else:
        t12 = t23 = t123

    def clip(t):
        return t if t <= sc.T else None

    return ThreeAgentSchedule(clip(t12), clip(t23), clip(t123), case)


def eta_profiles_three(sc: CorridorScenario, a3: float,
                       case: Optional[ContactCase] = None) -> ThreeAgentMultipliers:
    """Multiplier levels on the contact branch, from the case formulas."""
    if a3 <= 0:
        raise NonPositiveControl(f"control must be positive, got {a3}")
    case = case or case_discriminant(sc)
    q1, q2, q3 = _sq(sc)
    s3 = sc.speeds[2]
    a1, a2, _ = ratio_controls(sc, a3)
    s1, s2, _ = sc.speeds
    t123 = _triple_time_constant(sc, case) / a3
    tri12 = (2.0 * q1 - q2 - q3) * a3 / (3.0 * s3)
    tri23 = (q1 + q2 - 2.0 * q3) * a3 / (3.0 * s3)
    if case is ContactCase.PAIR12_FIRST:
        t_pair = sc.half_gap(0) / ((a1 * s1 - a2 * s2) / 2.0)
        pair = ((a1 * s1 - a2 * s2) / 2.0, 0.0)
    elif case is ContactCase.PAIR23_FIRST:
        t_pair = sc.half_gap(1) / ((a2 * s2 - a3 * s3) / 2.0)
        pair = (0.0, (a2 * s2 - a3 * s3) / 2.0)
    else:
        t_pair, pair = t123, (0.0, 0.0)
    T = sc.T
    windows = [(0.0, (0.0, 0.0))]
    if t_pair < min(t123, T):
        windows.append((t_pair, pair))
    if t123 < T:
        windows.append((t123, (tri12, tri23)))
    # a window starting at t = 0 replaces the empty pre-contact one
    while len(windows) > 1 and windows[1][0] <= 0.0:
        windows.pop(0)
    breaks = tuple([0.0] + [w[0] for w in windows[1:]])
    e12 = tuple(w[1][0] for w in windows)
    e23 = tuple(w[1][1] for w in windows)
    return ThreeAgentMultipliers(breaks, e12, e23)


def trajectories_three(sc: CorridorScenario, a):
    return motion_trajectories(sc, corridor_motion(sc, a))


def _energy_terms(sc: CorridorScenario, energy: str) -> tuple[float, float]:
    """(quadratic weight, linear weight) of the energy along the ratio line."""
    q1, q2, q3 = _sq(sc)
    ratio_sum = (q1 + q2 + q3) / q3
    k = 0.5 * sc.tau * sc.T * ratio_sum
    if energy == "bolza":
        return k, 0.0
    if energy == "scaled":
        return 0.0, k
    raise ValueError(f"unknown energy convention {energy!r}")


def _contact_quadratic(sc: CorridorScenario, energy: str) -> Quadratic1D:
    # once all three touch, the offsets from the centroid are fixed and the
    # centroid advances at the mean desired speed
    L1, L2, L3 = sc.radii
    g12, g23 = L1 + L2, L2 + L3
    offsets = [(2.0 * g12 + g23) / 3.0, (g23 - g12) / 3.0, -(g12 + 2.0 * g23) / 3.0]
    mean0 = sum(sc.rho) / 3.0
    q1, q2, q3 = _sq(sc)
    slope = -sc.T * (q1 + q2 + q3) / (3.0 * sc.speeds[2])
    weight, linear = _energy_terms(sc, energy)
    lo = _triple_time_constant(sc, case_discriminant(sc)) / sc.T
    return Quadratic1D.from_affine_residuals(
        [mean0 + c for c in offsets], [slope] * 3, weight, linear, lo=lo)


def cost_contact_branch(sc: CorridorScenario, a3: float, energy: str = "bolza") -> float:
    return _contact_quadratic(sc, energy)(a3)


def _bolza_qp(sc: CorridorScenario, M, r0, G, h):
    """Minimize 0.5|r0 + M z|^2 + (tau T/2)|E z|^2 over the reduced variables z.

    ``M`` maps ``z`` to the change of terminal coordinates and the controls
    are ``E z`` with ``E`` given as the trailing rows of ``M``.
    """
    M = np.asarray(M, dtype=float)
    n = sc.n
    R, E = M[:n], M[n:]
    r0 = np.asarray(r0, dtype=float)
    Q = R.T @ R + sc.tau * sc.T * (E.T @ E)
    c = R.T @ r0
    res = solve_small_qp(Q, c, G, h)
    if res is None:
        return None
    z, val = res
    return z, val + 0.5 * float(r0 @ r0), E @ z


def _free_branch(sc: CorridorScenario):
    """No agent ever touches another (gaps are linear in time)."""
    s = np.array(sc.speeds)
    T = sc.T
    M = np.vstack([np.diag(-T * s), np.eye(3)])
    G = [[T * s[0], -T * s[1], 0.0], [0.0, T * s[1], -T * s[2]],
         [-1, 0, 0], [0, -1, 0], [0, 0, -1]]
    h = [2.0 * sc.half_gap(0), 2.0 * sc.half_gap(1), 0.0, 0.0, 0.0]
    return _bolza_qp(sc, M, sc.rho, G, h)


def _pair12_branch(sc: CorridorScenario):
    """Agents 1 and 2 merge, agent 3 stays ahead; variables (a2, a3)."""
    s1, s2, s3 = sc.speeds
    T = sc.T
    l12, l23 = sc.half_gap(0), sc.half_gap(1)
    k = T * (s1 * s1 + s2 * s2) / (2.0 * s2)
    M = [[-k, 0.0], [-k, 0.0], [0.0, -T * s3], [s1 / s2, 0.0], [1.0, 0.0], [0.0, 1.0]]
    r0 = [sc.rho[0] - l12, sc.rho[1] + l12, sc.rho[2]]
    a2_min = 2.0 * s2 * l12 / (T * (s1 * s1 - s2 * s2))
    G = [[-1.0, 0.0], [k, -T * s3], [0.0, -1.0]]
    h = [-a2_min, 2.0 * l23 + l12, 0.0]
    return _bolza_qp(sc, M, r0, G, h)


def _pair23_branch(sc: CorridorScenario):
    """Agents 2 and 3 merge, agent 1 stays behind; variables (a1, a3)."""
    s1, s2, s3 = sc.speeds
    T = sc.T
    l12, l23 = sc.half_gap(0), sc.half_gap(1)
    k = T * (s2 * s2 + s3 * s3) / (2.0 * s3)
    M = [[-T * s1, 0.0], [0.0, -k], [0.0, -k], [1.0, 0.0], [0.0, s2 / s3], [0.0, 1.0]]
    r0 = [sc.rho[0], sc.rho[1] - l23, sc.rho[2] + l23]
    a3_min = 2.0 * s3 * l23 / (T * (s2 * s2 - s3 * s3))
    G = [[0.0, -1.0], [T * s1, -k], [-1.0, 0.0]]
    h = [-a3_min, 2.0 * l12 + l23, 0.0]
    return _bolza_qp(sc, M, r0, G, h)


def _schedule_from_motion(motion, case) -> ThreeAgentSchedule:
    t12, t23 = motion.contact
    t123 = motion.all_merged_time()
    return ThreeAgentSchedule(t12, t23, t123, case)


def solve_three(sc: CorridorScenario, energy: str = "bolza", samples: int = 601) -> SolveReport:
    """Optimal controls for three agents.

    The contact branch is always evaluated. Under the Bolza energy the
    contact-free branch and the two single-pair branches are compared as well;
    those are reported with ``extended=True`` when they win.
    """
    _check(sc)
    case = case_discriminant(sc)
    a3, J = argmin_quadratic(_contact_quadratic(sc, energy))
    a = ratio_controls(sc, a3)
    branch = "contact"
    if energy == "bolza":
        for name, fn in (("free", _free_branch), ("pair12", _pair12_branch),
                         ("pair23", _pair23_branch)):
            res = fn(sc)
            if res is None:
                continue
            _, val, controls = res
            if val < J - 1e-12 * max(1.0, abs(J)):
                J, a, branch = val, tuple(float(max(c, 0.0)) for c in controls), name
    motion = corridor_motion(sc, a)
    if branch == "contact" and a3 > 0:
        sched = contact_times_three(sc, a3, case)
    else:
        sched = _schedule_from_motion(motion, case if branch == "contact" else None)
    times = np.linspace(0.0, sc.T, samples)
    return SolveReport(controls=tuple(a), cost=J, schedule=sched,
                       trajectories=motion_trajectories(sc, motion),
                       eta=eta_samples(motion, times), tau=sc.tau, branch=branch,
                       extended=branch != "contact",
                       case=case.value if branch == "contact" else None)
