"""Time-indexed piecewise trajectories made of straight and circular pieces."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence, Union

from .geometry import Vec2


@dataclass(frozen=True)
class LineSegment:
    t0: float
    t1: float
    start: Vec2
    velocity: Vec2

    def position(self, t: float) -> Vec2:
        return self.start + self.velocity * (t - self.t0)

    def speed(self) -> float:
        return self.velocity.norm()


@dataclass(frozen=True)
class ArcSegment:
    """Uniform motion on a circle; ``rate`` is the signed angular speed (rad/time)."""

    t0: float
    t1: float
    center: Vec2
    start: Vec2
    rate: float

    @property
    def radius(self) -> float:
        return (self.start - self.center).norm()

    def position(self, t: float) -> Vec2:
        ang = self.rate * (t - self.t0)
        c, s = math.cos(ang), math.sin(ang)
        d = self.start - self.center
        return Vec2(self.center.x + c * d.x - s * d.y, self.center.y + s * d.x + c * d.y)

    def speed(self) -> float:
        return abs(self.rate) * self.radius


Segment = Union[LineSegment, ArcSegment]


@dataclass(frozen=True)
class PiecewiseTrajectory:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("trajectory needs at least one segment")
        object.__setattr__(self, "_starts", [seg.t0 for seg in self.segments])

    @property
    def t_start(self) -> float:
        return self.segments[0].t0

    @property
    def t_end(self) -> float:
        return self.segments[-1].t1

    def segment_at(self, t: float) -> Segment:
        i = bisect.bisect_right(self._starts, t) - 1
        return self.segments[min(max(i, 0), len(self.segments) - 1)]

    def position(self, t: float) -> Vec2:
        return self.segment_at(t).position(t)

    def sample(self, times: Sequence[float]) -> list[Vec2]:
        return [self.position(t) for t in times]

    def breakpoints(self) -> list[float]:
        return [seg.t0 for seg in self.segments] + [self.t_end]


def axis_trajectory(destination: Vec2, axis: Vec2, rho0: float,
                    breaks: Sequence[float], rates: Sequence[float]) -> PiecewiseTrajectory:
    """Planar image of a piecewise-linear axis coordinate.

    The coordinate ``rho`` (signed distance to the destination along ``axis``)
    starts at ``rho0`` and changes at ``rates[k]`` on ``[breaks[k], breaks[k+1]]``.
    Zero-length pieces are dropped.
    """
    if len(breaks) != len(rates) + 1:
        raise ValueError("need one more breakpoint than rates")
    segs = []
    rho = rho0
    for k, rate in enumerate(rates):
        t0, t1 = breaks[k], breaks[k + 1]
        if t1 > t0 or (not segs and k == len(rates) - 1):
            start = destination - axis * rho
            segs.append(LineSegment(t0, t1, start, axis * (-rate)))
        rho += rate * (t1 - t0)
    return PiecewiseTrajectory(tuple(segs))
