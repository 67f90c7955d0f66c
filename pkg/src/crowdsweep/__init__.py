"""Optimal control of crowd motion with contact: closed-form solvers and a sweeping-process oracle."""
from .errors import CrowdSweepError, ScenarioError, SolverError
from .geometry import Vec2
from .scenario import (FIXTURES, CorridorScenario, SingleScenario, SolveReport,
                       load_fixture, parse_scenario, to_document)

__version__ = "0.1.0"


def solve(sc):
    """Dispatch to the solver matching the scenario kind."""
    if isinstance(sc, SingleScenario):
        from .single_agent import solve as _solve
        return _solve(sc)
    if sc.n == 2:
        from .corridor_two import solve_two
        return solve_two(sc)
    from .corridor_three import solve_three
    return solve_three(sc)
