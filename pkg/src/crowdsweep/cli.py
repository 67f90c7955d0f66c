"""Command-line front end.

    crowdsweep solve    --config ex31.json [--tau-sweep 1:10:1] [--out table.csv]
    crowdsweep sweep    --config ex51.json --tau-sweep 1:10:1
    crowdsweep simulate --config ex31.json --controls 2.675632 --h 0.001 --out trace.csv
    crowdsweep verify   --config ex51.json --h 0.001

Exit codes: 0 success, 1 solver error or failed verification, 2 bad input.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from typing import Optional, Sequence, TextIO

import numpy as np

from . import corridor_three, single_agent
from .corridor_two import solve_two
from .errors import CrowdSweepError, ScenarioError, SolverError
from .scenario import CorridorScenario, SingleScenario, SolveReport, parse_scenario

SIX = Decimal("0.000001")
EMPTY = "empty"


@dataclass(frozen=True)
class SweepSpec:
    start: float
    stop: float
    step: float

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ScenarioError(f"tau sweep must be A:B:STEP, got {text!r}")
        try:
            a, b, s = (Decimal(p) for p in parts)
        except InvalidOperation:
            raise ScenarioError(f"tau sweep must be numeric, got {text!r}") from None
        if not (a.is_finite() and b.is_finite() and s.is_finite()):
            raise ScenarioError("tau sweep values must be finite")
        if s <= 0 or a > b or a < 0:
            raise ScenarioError("tau sweep needs 0 <= A <= B and STEP > 0")
        return cls(a, b, s)

    def values(self) -> list[float]:
        out, k = [], 0
        while True:
            v = self.start + k * self.step
            if v > self.stop:
                return out
            out.append(float(v))
            k += 1


def fmt(x: Optional[float]) -> str:
    """Six fractional digits, half-to-even on the exact binary value."""
    if x is None:
        return EMPTY
    if not math.isfinite(x):
        raise ValueError(f"cannot format {x}")
    d = Decimal(x).quantize(SIX, rounding=ROUND_HALF_EVEN)
    if d == 0:
        d = abs(d)
    return f"{d:f}"


def table_header(n_controls: int) -> list[str]:
    if n_controls == 1:
        return ["tau", "a", "t_f", "t_l", "J"]
    if n_controls == 2:
        return ["tau", "a1", "a2", "t_f12", "J"]
    return ["tau", "a1", "a2", "a3", "t_f12", "t_f23", "J"]


def table_row(r: SolveReport) -> list[str]:
    sch = r.schedule
    if len(r.controls) == 1:
        times = [sch.t_f, sch.t_l]
    elif len(r.controls) == 2:
        times = [sch.t_f12]
    else:
        times = [sch.t_f12, sch.t_f23]
    return [fmt(r.tau)] + [fmt(a) for a in r.controls] + [fmt(t) for t in times] + [fmt(r.cost)]


def emit_table(reports: Sequence[SolveReport], stream: TextIO) -> None:
    if not reports:
        raise ValueError("no reports to emit")
    lines = [",".join(table_header(len(reports[0].controls)))]
    lines += [",".join(table_row(r)) for r in reports]
    stream.write("\n".join(lines) + "\n")


def solve_any(sc, energy: str = "bolza") -> SolveReport:
    if isinstance(sc, SingleScenario):
        return single_agent.solve(sc)
    if sc.n == 2:
        return solve_two(sc)
    return corridor_three.solve_three(sc, energy=energy)


def trajectory_csv(report: SolveReport, T: float, dt: float) -> str:
    steps = max(1, int(round(T / dt)))
    n = len(report.trajectories)
    head = ["t"] + [f"{c}{i + 1}" for i in range(n) for c in ("x", "y")]
    lines = [",".join(head)]
    for k in range(steps + 1):
        t = min(k * dt, T)
        row = [repr(t)]
        for tr in report.trajectories:
            p = tr.position(t)
            row += [repr(p.x), repr(p.y)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


# --- verify ------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float
    ok: bool


def sup_deviation(trace, trajectories) -> float:
    worst = 0.0
    for k, t in enumerate(trace.times):
        for i, tr in enumerate(trajectories):
            p = tr.position(float(t))
            worst = max(worst, math.hypot(trace.positions[k, i, 0] - p.x,
                                          trace.positions[k, i, 1] - p.y))
    return worst


def _analytic_clearance(sc, report: SolveReport, samples: int = 2001) -> float:
    times = np.linspace(0.0, sc.T, samples)
    worst = math.inf
    pts = [[tr.position(float(t)) for t in times] for tr in report.trajectories]
    if isinstance(sc, SingleScenario):
        for p in pts[0]:
            worst = min(worst, (p - sc.obstacle_center).norm() - sc.contact_radius)
        return worst
    for i in range(sc.n - 1):
        for p, q in zip(pts[i], pts[i + 1]):
            worst = min(worst, (p - q).norm() - (sc.radii[i] + sc.radii[i + 1]))
    return worst


def verify_checks(sc, h: float, energy: str = "bolza", tol_traj: float = 0.05,
                  tol_cost: float = 0.5) -> list[Check]:
    from .oracle import SimConfig, simulate, simulated_cost

    report = solve_any(sc, energy)
    trace = simulate(sc, report.controls, SimConfig(h=h))
    dev = sup_deviation(trace, report.trajectories)
    gap = abs(simulated_cost(trace, sc, report.controls,
                             energy if isinstance(sc, CorridorScenario) and sc.n == 3 else "bolza")
              - report.cost)
    clear = _analytic_clearance(sc, report)
    eta_min = min((v for samples in report.eta.values() for _, v in samples), default=0.0)
    checks = [
        Check("trajectory_sup_deviation", dev, tol_traj, dev <= tol_traj),
        Check("cost_gap", gap, tol_cost, gap <= tol_cost),
        Check("analytic_min_clearance", clear, -1e-9, clear >= -1e-9),
        Check("eta_min", eta_min, 0.0, eta_min >= 0.0),
    ]
    if isinstance(sc, CorridorScenario) and report.branch == "contact":
        s = sc.speeds
        a = report.controls
        err = max(abs(a[i] * s[-1] - a[-1] * s[i]) for i in range(sc.n - 1))
        checks.append(Check("ratio_identity_residual", err, 1e-9, err <= 1e-9))
    if isinstance(sc, SingleScenario):
        checks.append(_mid_arc_check(sc, report, h))
    return checks


def _mid_arc_check(sc: SingleScenario, report: SolveReport, h: float) -> Check:
    """Controls whose horizon ends mid-arc, evaluated by simulation; must not beat the optimum."""
    geom = single_agent.contact_geometry(sc)
    if geom is None:
        return Check("mid_arc_best_minus_optimum", math.inf, 0.0, True)
    lo = geom.pre_distance / (sc.speed * sc.T)
    hi = single_agent.control_lower_bound(sc, geom)
    best = math.inf
    for a in np.linspace(lo, hi, 23)[1:-1]:
        best = min(best, single_agent.cost(sc, geom, float(a), h=h))
    margin = best - report.cost
    return Check("mid_arc_best_minus_optimum", margin, 0.0, margin >= 0.0)


# --- entry points --------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crowdsweep", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="scenario JSON file")
        sp.add_argument("--out", help="output file (default: stdout)")

    for name, need_sweep in (("solve", False), ("sweep", True)):
        sp = sub.add_parser(name, help="solve a scenario, optionally over a tau sweep")
        common(sp)
        sp.add_argument("--tau-sweep", required=need_sweep, metavar="A:B:STEP")
        sp.add_argument("--trajectory", help="write the first row's trajectory CSV here")
        sp.add_argument("--dt", type=float, default=0.01, help="trajectory sampling step")
        sp.add_argument("--energy", choices=corridor_three.ENERGIES, default="bolza",
                        help="energy convention for three agents")

    sp = sub.add_parser("simulate", help="catching-up simulation for given controls")
    common(sp)
    sp.add_argument("--controls", required=True, help="v1[,v2[,v3]]")
    sp.add_argument("--h", type=float, default=1e-3)
    sp.add_argument("--heading", choices=("radial", "frozen"))
    sp.add_argument("--stride", type=int, default=1)

    sp = sub.add_parser("verify", help="compare the closed form with the simulation")
    common(sp)
    sp.add_argument("--h", type=float, default=1e-3)
    sp.add_argument("--energy", choices=corridor_three.ENERGIES, default="bolza")
    sp.add_argument("--tol-traj", type=float, default=0.05)
    sp.add_argument("--tol-cost", type=float, default=0.5)
    return p


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(text)


def _cmd_solve(args) -> int:
    import io
    sc = _load(args.config)
    taus = SweepSpec.parse(args.tau_sweep).values() if args.tau_sweep else [sc.tau]
    if args.dt <= 0:
        raise ScenarioError("--dt must be positive")
    reports = [solve_any(sc.with_tau(t), args.energy) for t in taus]
    buf = io.StringIO()
    emit_table(reports, buf)
    _write(args.out, buf.getvalue())
    if args.trajectory:
        _write(args.trajectory, trajectory_csv(reports[0], sc.T, args.dt))
    return 0


def _parse_controls(text: str, n: int) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ScenarioError(f"controls must be numbers, got {text!r}") from None
    if len(vals) != n:
        raise ScenarioError(f"scenario has {n} agent(s), got {len(vals)} control(s)")
    if any(not math.isfinite(v) or v < 0 for v in vals):
        raise ScenarioError("controls must be finite and non-negative")
    return vals


def _cmd_simulate(args) -> int:
    from .oracle import SimConfig, simulate
    sc = _load(args.config)
    n = 1 if isinstance(sc, SingleScenario) else sc.n
    controls = _parse_controls(args.controls, n)
    try:
        cfg = SimConfig(h=args.h, stride=args.stride, heading=args.heading)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    if args.h > sc.T / 10:
        raise ScenarioError(f"--h must not exceed T/10 = {sc.T / 10}")
    _write(args.out, simulate(sc, controls, cfg).to_csv())
    return 0


def _cmd_verify(args) -> int:
    sc = _load(args.config)
    if not (args.h > 0 and args.h <= sc.T / 10):
        raise ScenarioError(f"--h must lie in (0, T/10]")
    checks = verify_checks(sc, args.h, args.energy, args.tol_traj, args.tol_cost)
    lines = [f"{c.name}: {c.value:.6g} (limit {c.limit:g}) {'PASS' if c.ok else 'FAIL'}"
             for c in checks]
    ok = all(c.ok for c in checks)
    lines.append(f"verdict: {'PASS' if ok else 'FAIL'}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0 if ok else 1


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"solve": _cmd_solve, "sweep": _cmd_solve, "simulate": _cmd_simulate,
                "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, CrowdSweepError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
