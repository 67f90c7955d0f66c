"""Closed-form optimal control of one agent passing one round obstacle.

The control is a constant speed factor ``a``. Off contact the agent moves
straight at speed ``s*a``; in contact it rolls around the inflated obstacle at
speed ``a`` and leaves along the tangent through the destination.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ArcExceedsHorizon, DestinationInsideObstacle, NonPositiveControl
from .geometry import (Vec2, angle_between_deg, circle_circle_intersections,
                       rotate_about, segment_circle_first_hit, unit_direction)
from .optimizer import Quadratic1D, argmin_quadratic
from .scenario import SingleScenario, SolveReport
from .trajectory import ArcSegment, LineSegment, PiecewiseTrajectory

_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class SingleContactGeometry:
    mu: float
    contact_point: Vec2
    leave_point: Vec2
    theta_deg: float
    pre_distance: float
    orientation: int

    def arc_length(self, contact_radius: float) -> float:
        return math.pi * self.theta_deg * contact_radius / 180.0


@dataclass(frozen=True)
class SingleSchedule:
    t_f: Optional[float] = None
    t_l: Optional[float] = None


def contact_geometry(sc: SingleScenario) -> Optional[SingleContactGeometry]:
    """Where the straight path first touches the obstacle and where it leaves.

    ``None`` when the straight path to the destination never touches the
    inflated obstacle.
    """
    R = sc.contact_radius
    obs, des, x0 = sc.obstacle_center, sc.destination, sc.start
    if (des - obs).norm() <= R:
        raise DestinationInsideObstacle("no tangent from the destination exists")
    if sc.distance == 0.0:
        return None
    mu = segment_circle_first_hit(x0, des, obs, R)
    if mu is None:
        return None
    x_f = x0 * (1.0 - mu) + des * mu
    # departure points: tangency points seen from the destination (Thales circle)
    mid = (obs + des) * 0.5
    candidates = circle_circle_intersections(obs, R, mid, 0.5 * (des - obs).norm())
    u_f = unit_direction(x_f, obs)

    def side(p: Vec2) -> float:
        # second coordinate of p - obs in the frame whose first axis is u_f
        return u_f.cross(p - obs)

    dists = [(p - x_f).norm() for p in candidates]
    best = min(dists)
    tied = [p for p, d in zip(candidates, dists) if d - best <= _TIE_RTOL * max(R, 1.0)]
    x_l = tied[0] if len(tied) == 1 else max(tied, key=lambda p: (side(p) >= 0, side(p)))
    theta = angle_between_deg(x_f - obs, x_l - obs)
    orientation = 1 if side(x_l) >= 0 else -1
    return SingleContactGeometry(mu, x_f, x_l, theta, mu * sc.distance, orientation)


def contact_times(sc: SingleScenario, geom: SingleContactGeometry, a: float) -> SingleSchedule:
    if a <= 0:
        raise NonPositiveControl(f"control must be positive, got {a}")
    t_f = geom.pre_distance / (sc.speed * a)
    t_l = t_f + geom.arc_length(sc.contact_radius) / a
    return SingleSchedule(t_f, t_l)


def control_lower_bound(sc: SingleScenario, geom: SingleContactGeometry) -> float:
    """Smallest control for which the agent leaves the obstacle by ``T``."""
    return (geom.pre_distance / sc.speed + geom.arc_length(sc.contact_radius)) / sc.T


def _free_reach(sc: SingleScenario, geom: Optional[SingleContactGeometry]) -> float:
    """Largest control that never reaches the obstacle within the horizon."""
    if geom is None:
        return math.inf
    return geom.pre_distance / (sc.speed * sc.T)


def _free_quadratic(sc: SingleScenario, geom) -> Quadratic1D:
    s, T, D = sc.speed, sc.T, sc.distance
    return Quadratic1D(0.5 * (s * s * T * T + sc.tau * T), -D * s * T, 0.5 * D * D,
                       0.0, _free_reach(sc, geom))


def _contact_quadratic(sc: SingleScenario, geom: SingleContactGeometry) -> Quadratic1D:
    s, T = sc.speed, sc.T
    # remaining distance at T is K - s*T*a
    K = (geom.leave_point - sc.destination).norm() \
        + s * geom.arc_length(sc.contact_radius) + geom.pre_distance
    return Quadratic1D(0.5 * (s * s * T * T + sc.tau * T), -K * s * T, 0.5 * K * K,
                       control_lower_bound(sc, geom), math.inf)


def cost_branch(sc: SingleScenario, geom: Optional[SingleContactGeometry], a: float) -> str:
    """``"free"``, ``"contact"`` or ``"numeric"`` (horizon ends mid-arc)."""
    # a control clipped to the reach bound may overshoot it by an ulp
    if geom is None or a <= _free_reach(sc, geom) * (1.0 + 1e-12):
        return "free"
    if a >= control_lower_bound(sc, geom) * (1.0 - 1e-12):
        return "contact"
    return "numeric"


def cost(sc: SingleScenario, geom: Optional[SingleContactGeometry], a: float,
         h: float = 1e-3) -> float:
    """Cost of the constant control ``a``.

    The mid-arc regime has no closed form; it is evaluated with the catching-up
    integrator at step ``h`` (see :func:`cost_branch`).
    """
    if a < 0:
        raise NonPositiveControl(f"control must be non-negative, got {a}")
    branch = cost_branch(sc, geom, a)
    if branch == "free":
        return _free_quadratic(sc, geom)(a)
    if branch == "contact":
        return _contact_quadratic(sc, geom)(a)
    from .oracle import SimConfig, simulate, simulated_cost
    trace = simulate(sc, (a,), SimConfig(h=h))
    return simulated_cost(trace, sc, (a,))


def trajectory(sc: SingleScenario, geom: Optional[SingleContactGeometry],
               a: float) -> PiecewiseTrajectory:
    T, x0, des = sc.T, sc.start, sc.destination
    if a <= 0 or sc.distance == 0.0:
        return PiecewiseTrajectory((LineSegment(0.0, T, x0, Vec2(0.0, 0.0)),))
    v = sc.speed * a
    head = -unit_direction(x0, des)
    if cost_branch(sc, geom, a) == "free":
        return PiecewiseTrajectory((LineSegment(0.0, T, x0, head * v),))
    sched = contact_times(sc, geom, a)
    if sched.t_l > T * (1.0 + 1e-12):
        raise ArcExceedsHorizon(f"leave time {sched.t_l:.6g} exceeds horizon {T}")
    t_f, t_l = sched.t_f, min(sched.t_l, T)
    R = sc.contact_radius
    segs = []
    if t_f > 0:
        segs.append(LineSegment(0.0, t_f, x0, head * v))
    if t_l > t_f:
        segs.append(ArcSegment(t_f, t_l, sc.obstacle_center, geom.contact_point,
                               geom.orientation * a / R))
    out = -unit_direction(geom.leave_point, des) if geom.leave_point != des else Vec2(0.0, 0.0)
    segs.append(LineSegment(t_l, T, geom.leave_point, out * v))
    return PiecewiseTrajectory(tuple(segs))


def eta_at(sc: SingleScenario, geom: Optional[SingleContactGeometry], a: float,
           t: float) -> float:
    """Obstacle multiplier at time ``t``; zero whenever the agent is off the obstacle."""
    if geom is None or a <= 0 or cost_branch(sc, geom, a) == "free":
        return 0.0
    sched = contact_times(sc, geom, a)
    if t < sched.t_f or t > sched.t_l:
        return 0.0
    R = sc.contact_radius
    swept = math.degrees((t - sched.t_f) * a / R)
    x = rotate_about(geom.contact_point, sc.obstacle_center, swept, geom.orientation)
    if x == sc.destination:
        return 0.0
    cosine = unit_direction(x, sc.destination).dot(unit_direction(x, sc.obstacle_center))
    eta = sc.speed * a * cosine
    return eta if eta > 1e-12 * sc.speed * a else 0.0


def solve(sc: SingleScenario, samples: int = 601) -> SolveReport:
    """Optimal constant control: best of the contact-free and the contact branch."""
    geom = contact_geometry(sc)
    if sc.distance == 0.0:
        a, J, branch = 0.0, 0.0, "free"
    else:
        a, J = argmin_quadratic(_free_quadratic(sc, geom))
        branch = "free"
        if geom is not None:
            a2, J2 = argmin_quadratic(_contact_quadratic(sc, geom))
            if J2 < J or (J2 == J and a2 < a):
                a, J, branch = a2, J2, "contact"
    sched = contact_times(sc, geom, a) if branch == "contact" else SingleSchedule()
    traj = trajectory(sc, geom, a)
    times = np.linspace(0.0, sc.T, samples)
    etas = [(float(t), eta_at(sc, geom, a, float(t))) for t in times]
    return SolveReport(controls=(a,), cost=J, schedule=sched, trajectories=[traj],
                       eta={"obstacle": etas}, tau=sc.tau, branch=branch)
