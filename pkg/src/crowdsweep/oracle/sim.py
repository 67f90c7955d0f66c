"""Catching-up discretization of the controlled sweeping process.

One step is ``x <- P_C(x + h U(x))`` where ``P_C`` is computed by cyclic
constraint corrections. Multipliers are recovered as projection
displacement divided by the step.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import NonPositiveControl, ProjectionStalled
from ..scenario import CorridorScenario, SingleScenario
from . import _backend

HEADINGS = ("radial", "frozen")


@dataclass(frozen=True)
class SimConfig:
    h: float = 1e-3
    max_iter: int = 50
    tol: float = 1e-10
    stride: int = 1
    heading: Optional[str] = None  # None: radial for one agent, frozen on a corridor

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValueError("step must be positive")
        if self.max_iter < 1 or self.stride < 1:
            raise ValueError("max_iter and stride must be at least 1")
        if self.heading is not None and self.heading not in HEADINGS:
            raise ValueError(f"heading must be one of {HEADINGS}")


@dataclass(frozen=True)
class Scene:
    """Flat arrays describing agents, their destinations and round obstacles."""

    starts: np.ndarray
    dests: np.ndarray
    speeds: np.ndarray
    radii: np.ndarray
    obs_centers: np.ndarray
    obs_radii: np.ndarray
    T: float
    tau: float
    labels: tuple[str, ...] = field(default=())

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def m(self) -> int:
        return len(self.obs_radii)

    def initial_dirs(self) -> np.ndarray:
        d = self.starts - self.dests
        nrm = np.linalg.norm(d, axis=1, keepdims=True)
        return np.divide(d, nrm, out=np.zeros_like(d), where=nrm > 0)


def scene_from(sc: Union[SingleScenario, CorridorScenario]) -> Scene:
    if isinstance(sc, SingleScenario):
        starts = np.array([sc.start.as_tuple()])
        dests = np.array([sc.destination.as_tuple()])
        speeds = np.array([sc.speed])
        radii = np.array([sc.agent_radius])
        oc = np.array([sc.obstacle_center.as_tuple()])
        orr = np.array([sc.obstacle_radius])
    else:
        starts = np.array([p.as_tuple() for p in sc.starts])
        dests = np.repeat([sc.destination.as_tuple()], sc.n, axis=0)
        speeds = np.array(sc.speeds)
        radii = np.array(sc.radii)
        oc = np.zeros((0, 2))
        orr = np.zeros(0)
    return Scene(starts, dests.astype(float), speeds, radii, oc, orr, float(sc.T),
                 float(sc.tau), constraint_labels(len(radii), len(orr)))


def constraint_labels(n: int, m: int) -> tuple[str, ...]:
    labels = [f"obs{i + 1}.{k + 1}" for i in range(n) for k in range(m)]
    labels += [f"{i + 1}{j + 1}" for i in range(n) for j in range(i + 1, n)]
    return tuple(labels)


def _heading(sc, cfg: SimConfig) -> str:
    if cfg.heading is not None:
        return cfg.heading
    return "radial" if isinstance(sc, SingleScenario) else "frozen"


@dataclass(frozen=True)
class SimTrace:
    times: np.ndarray
    positions: np.ndarray          # (samples, n, 2)
    eta_hat: np.ndarray            # (samples, constraints)
    active: np.ndarray             # (samples, constraints) bool
    labels: tuple[str, ...]
    running_cost: float

    @property
    def final(self) -> np.ndarray:
        return self.positions[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.positions.shape[1]
        head = ["t"] + [f"{c}{i + 1}" for i in range(n) for c in ("x", "y")]
        head += ["active_flags"] + [f"eta_hat_{k + 1}" for k in range(len(self.labels))]
        w.writerow(head)
        for r in range(len(self.times)):
            row = [repr(float(self.times[r]))]
            row += [repr(float(v)) for v in self.positions[r].ravel()]
            row.append(";".join("1" if a else "0" for a in self.active[r]))
            row += [repr(float(v)) for v in self.eta_hat[r]]
            w.writerow(row)
        return buf.getvalue()


def desired_velocity(config: np.ndarray, controls: Sequence[float], scene: Scene,
                     heading: str = "radial") -> np.ndarray:
    """Stacked desired velocities ``-a_i s_i e_i``; zero for an agent sitting on its destination."""
    x = np.asarray(config, dtype=float).reshape(-1, 2)
    out = np.zeros_like(x)
    umag = np.asarray(controls, dtype=float) * scene.speeds
    _backend.py.desired(x, scene.dests, scene.initial_dirs(), heading == "frozen", umag, out)
    return out


def project_admissible(config: np.ndarray, scene: Scene, max_iter: int = 50,
                       tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Project onto the admissible set. Returns (config, per-constraint displacement)."""
    x = np.array(config, dtype=float).reshape(-1, 2)
    disp = [0.0] * _backend.py.constraint_count(scene.n, scene.m)
    left = _backend.py.project(x, scene.radii, scene.obs_centers, scene.obs_radii,
                               max_iter, tol, disp)
    if left > tol:
        raise ProjectionStalled(f"violation {left:.3g} remains after {max_iter} sweeps")
    return x, np.array(disp)


def catching_up_step(config: np.ndarray, controls: Sequence[float], scene: Scene, h: float,
                     heading: str = "radial", max_iter: int = 50, tol: float = 1e-10):
    """One catching-up step. Returns (new config, recovered multipliers)."""
    x = np.asarray(config, dtype=float).reshape(-1, 2)
    y = x + h * desired_velocity(x, controls, scene, heading)
    y, disp = project_admissible(y, scene, max_iter, tol)
    return y, disp / h


def simulate(sc: Union[SingleScenario, CorridorScenario], controls: Sequence[float],
             cfg: SimConfig = SimConfig(), kernel=None) -> SimTrace:
    """Run the catching-up scheme on ``[0, T]`` with constant controls."""
    scene = scene_from(sc)
    controls = np.asarray(controls, dtype=float)
    if controls.shape != (scene.n,):
        raise ValueError(f"expected {scene.n} controls")
    if np.any(controls < 0):
        raise NonPositiveControl("controls must be non-negative")
    if cfg.h > scene.T / 10.0:
        raise ValueError(f"step {cfg.h} exceeds T/10")
    nsteps = max(1, math.ceil(scene.T / cfg.h - 1e-9))
    last_dt = scene.T - cfg.h * (nsteps - 1)
    k = kernel or _backend.kernel
    times, pos, eta, status, step = k.simulate_loop(
        scene.starts, scene.dests, scene.initial_dirs(), _heading(sc, cfg) == "frozen",
        controls * scene.speeds, scene.radii, scene.obs_centers, scene.obs_radii,
        cfg.h, nsteps, last_dt, cfg.stride, cfg.max_iter, cfg.tol)
    if status != 0:
        raise ProjectionStalled(f"projection did not converge at step {step}")
    eta = np.maximum(eta, 0.0)
    running = 0.5 * scene.tau * scene.T * float(controls @ controls)
    return SimTrace(np.asarray(times), np.asarray(pos), np.asarray(eta), np.asarray(eta) > 0.0,
                    scene.labels, running)


def simulated_cost(trace: SimTrace, sc, controls: Sequence[float], energy: str = "bolza") -> float:
    """Terminal squared distance plus control energy (exact for constant controls).

    ``energy="scaled"`` divides the energy by the last control, matching the
    ``scaled`` convention of the three-agent solver.
    """
    scene = scene_from(sc)
    controls = np.asarray(controls, dtype=float)
    terminal = 0.5 * float(np.sum((trace.final - scene.dests) ** 2))
    effort = 0.5 * scene.tau * scene.T * float(controls @ controls)
    if energy == "scaled":
        effort /= controls[-1]
    elif energy != "bolza":
        raise ValueError(f"unknown energy convention {energy!r}")
    return terminal + effort
