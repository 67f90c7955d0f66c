"""Exception hierarchy.

Scenario problems derive from :class:`ScenarioError` (bad input, exit code 2 in
the CLI); everything raised while solving or simulating derives from
:class:`SolverError` (exit code 1).
"""


class CrowdSweepError(Exception):
    pass


class GeometryError(CrowdSweepError, ValueError):
    pass


class DegenerateDirection(GeometryError):
    pass


class InfiniteIntersections(GeometryError):
    pass


class ScenarioError(CrowdSweepError, ValueError):
    pass


class MissingField(ScenarioError):
    pass


class UnknownField(ScenarioError):
    pass


class NonFinite(ScenarioError):
    pass


class InfeasibleStart(ScenarioError):
    pass


class DestinationInsideObstacle(ScenarioError):
    pass


class NotCollinear(ScenarioError):
    pass


class InitialOverlap(ScenarioError):
    pass


class BadAgentCount(ScenarioError):
    pass


class InvalidPlacement(ScenarioError):
    """Agent sits on or beyond the destination along the corridor axis."""


class SolverError(CrowdSweepError):
    pass


class NonPositiveControl(SolverError, ValueError):
    pass


class ArcExceedsHorizon(SolverError):
    pass


class BelowContactBound(SolverError, ValueError):
    pass


class ContactWouldOccur(SolverError, ValueError):
    pass


class EmptyInterval(SolverError, ValueError):
    pass


class ProjectionStalled(SolverError):
    pass
