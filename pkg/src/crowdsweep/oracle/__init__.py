"""Independent numerical ground truth for the closed-form solvers."""
from ._backend import NAME as BACKEND
from .search import (corridor_objective, corridor_terminal_rho, grid_refine_search,
                     ratio_line_objective, single_objective)
from .sim import (Scene, SimConfig, SimTrace, catching_up_step, desired_velocity,
                  project_admissible, scene_from, simulate, simulated_cost)

__all__ = [
    "BACKEND", "Scene", "SimConfig", "SimTrace", "catching_up_step", "corridor_objective",
    "corridor_terminal_rho", "desired_velocity", "grid_refine_search", "project_admissible",
    "ratio_line_objective", "scene_from", "simulate", "simulated_cost", "single_objective",
]
