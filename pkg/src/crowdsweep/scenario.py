"""Scenario data model, JSON documents, validation and corridor reduction."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Any, Optional, Sequence, Union

from .errors import (BadAgentCount, DestinationInsideObstacle, InfeasibleStart,
                     InitialOverlap, InvalidPlacement, MissingField, NonFinite,
                     NotCollinear, ScenarioError, UnknownField)
from .geometry import Vec2

COLLINEAR_RTOL = 1e-9
OVERLAP_TOL = 1e-9


@dataclass(frozen=True)
class SingleScenario:
    """One agent of radius ``agent_radius`` heading past one round obstacle."""

    T: float
    start: Vec2
    destination: Vec2
    obstacle_center: Vec2
    obstacle_radius: float
    agent_radius: float
    tau: float = 1.0

    @property
    def distance(self) -> float:
        return (self.destination - self.start).norm()

    @property
    def speed(self) -> float:
        return self.distance / self.T

    @property
    def contact_radius(self) -> float:
        return self.agent_radius + self.obstacle_radius

    def with_tau(self, tau: float) -> "SingleScenario":
        return replace(self, tau=tau)

    def validate(self) -> "SingleScenario":
        _check_positive("T", self.T)
        _check_positive("agent_radius", self.agent_radius)
        _check_positive("obstacle.radius", self.obstacle_radius)
        _check_nonneg("tau", self.tau)
        R = self.contact_radius
        if (self.start - self.obstacle_center).norm() < R * (1.0 - 1e-12):
            raise InfeasibleStart(
                f"start {self.start.as_tuple()} overlaps the obstacle (clearance < {R})")
        if (self.destination - self.obstacle_center).norm() <= R:
            raise DestinationInsideObstacle("destination lies inside the inflated obstacle")
        return self


@dataclass(frozen=True)
class CorridorScenario:
    """Agents and destination on a common line.

    Agents are stored farthest-first, so ``rho[0] > rho[1] (> rho[2])``.
    ``original_index[k]`` is the position of agent ``k`` in the source document.
    """

    T: float
    starts: tuple[Vec2, ...]
    radii: tuple[float, ...]
    destination: Vec2
    tau: float = 1.0
    original_index: tuple[int, ...] = field(default=(), compare=False)
    axis: Vec2 = field(init=False)
    rho: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        axis, rho = corridor_reduce(self.starts, self.destination)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "rho", tuple(rho))
        if not self.original_index:
            object.__setattr__(self, "original_index", tuple(range(len(self.starts))))

    @property
    def n(self) -> int:
        return len(self.starts)

    @property
    def speeds(self) -> tuple[float, ...]:
        return tuple(r / self.T for r in self.rho)

    def half_gap(self, i: int) -> float:
        """Half of the free gap between agents ``i`` and ``i+1`` at t=0 (Lambda)."""
        return 0.5 * (self.rho[i] - self.rho[i + 1] - (self.radii[i] + self.radii[i + 1]))

    def with_tau(self, tau: float) -> "CorridorScenario":
        return CorridorScenario(self.T, self.starts, self.radii, self.destination, tau,
                                self.original_index)

    def position(self, rho: float) -> Vec2:
        return self.destination - self.axis * rho

    def validate(self) -> "CorridorScenario":
        _check_positive("T", self.T)
        _check_nonneg("tau", self.tau)
        if self.n not in (2, 3):
            raise BadAgentCount(f"corridor solvers handle 2 or 3 agents, got {self.n}")
        for L in self.radii:
            _check_positive("radius", L)
        for k, r in enumerate(self.rho):
            if r <= 0:
                raise InvalidPlacement(f"agent {k + 1} is not strictly before the destination")
        for i in range(self.n - 1):
            if self.rho[i] - self.rho[i + 1] < self.radii[i] + self.radii[i + 1] - OVERLAP_TOL:
                raise InitialOverlap(f"agents {i + 1} and {i + 2} overlap at t=0")
        return self


Scenario = Union[SingleScenario, CorridorScenario]


@dataclass
class SolveReport:
    """Everything a solver returns for one scenario and one trade-off weight.

    ``eta`` maps a multiplier name ("obstacle", "12", "23") to ``(t, value)``
    samples. ``branch`` names the cost branch that won.
    """

    controls: tuple[float, ...]
    cost: float
    schedule: Any
    trajectories: list
    eta: dict[str, list[tuple[float, float]]]
    tau: float
    branch: str
    extended: bool = False
    case: Optional[str] = None


def corridor_reduce(positions: Sequence[Vec2], destination: Vec2) -> tuple[Vec2, list[float]]:
    """Map collinear points to signed distances along the line to ``destination``.

    The axis points from the agents toward the destination, and
    ``x_i = destination - rho_i * axis``.
    """
    if not positions:
        raise ValueError("no positions given")
    offsets = [destination - p for p in positions]
    far = max(offsets, key=lambda v: v.norm())
    far_norm = far.norm()
    axis = far / far_norm if far_norm > 0 else Vec2(1.0, 0.0)
    scale = max(1.0, far_norm)
    for k, off in enumerate(offsets):
        if abs(off.cross(axis)) > COLLINEAR_RTOL * scale:
            raise NotCollinear(f"point {k + 1} is off the destination line")
    return axis, [off.dot(axis) for off in offsets]


# --- documents ---------------------------------------------------------------

_SINGLE_KEYS = {"kind", "T", "start", "destination", "obstacle", "agent_radius", "tau"}
_CORRIDOR_KEYS = {"kind", "T", "destination", "tau", "agents"}


def parse_scenario(text: str) -> Scenario:
    """Parse either document kind, dispatching on the ``kind`` key."""
    doc = _load(text)
    kind = doc.get("kind")
    if kind == "single":
        return _single_from_doc(doc)
    if kind == "corridor":
        return _corridor_from_doc(doc)
    if kind is None:
        raise MissingField("kind")
    raise ScenarioError(f"unknown scenario kind {kind!r}")


def parse_single(text: str) -> SingleScenario:
    doc = _load(text)
    if doc.get("kind", "single") != "single":
        raise ScenarioError("not a single-agent document")
    return _single_from_doc(doc)


def parse_corridor(text: str) -> CorridorScenario:
    doc = _load(text)
    if doc.get("kind", "corridor") != "corridor":
        raise ScenarioError("not a corridor document")
    return _corridor_from_doc(doc)


def to_document(sc: Scenario) -> str:
    if isinstance(sc, SingleScenario):
        doc = {
            "kind": "single",
            "T": sc.T,
            "start": list(sc.start.as_tuple()),
            "destination": list(sc.destination.as_tuple()),
            "obstacle": {"center": list(sc.obstacle_center.as_tuple()),
                         "radius": sc.obstacle_radius},
            "agent_radius": sc.agent_radius,
            "tau": sc.tau,
        }
    else:
        doc = {
            "kind": "corridor",
            "T": sc.T,
            "destination": list(sc.destination.as_tuple()),
            "tau": sc.tau,
            "agents": [{"start": list(p.as_tuple()), "radius": L}
                       for p, L in zip(sc.starts, sc.radii)],
        }
    return json.dumps(doc, indent=2)


def load_fixture(name: str) -> Scenario:
    """Load one of the bundled example scenarios (``ex31`` ... ``ex54``)."""
    text = resources.files("crowdsweep.fixtures").joinpath(f"{name}.json").read_text("utf-8")
    return parse_scenario(text)


FIXTURES = ("ex31", "ex32", "ex33", "ex51", "ex52", "ex53", "ex54")


def _load(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed document: {exc}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("document must be a JSON object")
    return doc


def _single_from_doc(doc: dict) -> SingleScenario:
    _check_keys(doc, _SINGLE_KEYS, "scenario")
    obstacle = _require(doc, "obstacle")
    if not isinstance(obstacle, dict):
        raise ScenarioError("obstacle must be an object")
    _check_keys(obstacle, {"center", "radius"}, "obstacle")
    sc = SingleScenario(
        T=_num(doc, "T"),
        start=_point(doc, "start"),
        destination=_point(doc, "destination"),
        obstacle_center=_point(obstacle, "center"),
        obstacle_radius=_num(obstacle, "radius"),
        agent_radius=_num(doc, "agent_radius"),
        tau=_num(doc, "tau"),
    )
    return sc.validate()


def _corridor_from_doc(doc: dict) -> CorridorScenario:
    _check_keys(doc, _CORRIDOR_KEYS, "scenario")
    agents = _require(doc, "agents")
    if not isinstance(agents, list):
        raise ScenarioError("agents must be a list")
    if len(agents) not in (2, 3):
        raise BadAgentCount(f"corridor solvers handle 2 or 3 agents, got {len(agents)}")
    starts, radii = [], []
    for a in agents:
        if not isinstance(a, dict):
            raise ScenarioError("each agent must be an object")
        _check_keys(a, {"start", "radius"}, "agent")
        starts.append(_point(a, "start"))
        radii.append(_num(a, "radius"))
    dest = _point(doc, "destination")
    _, rho = corridor_reduce(starts, dest)
    order = sorted(range(len(starts)), key=lambda k: -rho[k])
    sc = CorridorScenario(
        T=_num(doc, "T"),
        starts=tuple(starts[k] for k in order),
        radii=tuple(radii[k] for k in order),
        destination=dest,
        tau=_num(doc, "tau"),
        original_index=tuple(order),
    )
    return sc.validate()


def _check_keys(doc: dict, allowed: set, what: str) -> None:
    extra = set(doc) - allowed
    if extra:
        raise UnknownField(f"unknown {what} key(s): {', '.join(sorted(extra))}")


def _require(doc: dict, key: str):
    if key not in doc:
        raise MissingField(key)
    return doc[key]


def _num(doc: dict, key: str) -> float:
    v = _require(doc, key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{key} must be a number")
    v = float(v)
    if not math.isfinite(v):
        raise NonFinite(key)
    return v


def _point(doc: dict, key: str) -> Vec2:
    v = _require(doc, key)
    if not isinstance(v, list) or len(v) != 2:
        raise ScenarioError(f"{key} must be a pair [x, y]")
    if any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in v):
        raise ScenarioError(f"{key} must hold numbers")
    x, y = float(v[0]), float(v[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise NonFinite(key)
    return Vec2(x, y)


def _check_positive(name: str, v: float) -> None:
    if not math.isfinite(v):
        raise NonFinite(name)
    if v <= 0:
        raise ScenarioError(f"{name} must be positive")


def _check_nonneg(name: str, v: float) -> None:
    if not math.isfinite(v):
        raise NonFinite(name)
    if v < 0:
        raise ScenarioError(f"{name} must be non-negative")

