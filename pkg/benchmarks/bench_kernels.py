"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from crowdsweep.oracle import _backend, scene_from
from crowdsweep.oracle.search import corridor_offsets
from crowdsweep.scenario import load_fixture


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def sim_case(kernel, name: str, controls, h: float):
    sc = load_fixture(name)
    scene = scene_from(sc)
    nsteps = int(round(sc.T / h))
    frozen = name.startswith("ex5")
    args = (scene.starts, scene.dests, scene.initial_dirs(), frozen,
            np.asarray(controls) * scene.speeds, scene.radii, scene.obs_centers,
            scene.obs_radii, h, nsteps, h, 1, 50, 1e-10)
    return lambda: kernel.simulate_loop(*args)


def grid_case(kernel, name: str, points: int):
    sc = load_fixture(name)
    off = corridor_offsets(sc)
    w0 = -np.asarray(sc.rho) - off
    axes = [np.linspace(0.0, 3.0, points)] * sc.n
    return lambda: kernel.corridor_grid_cost(w0, off, np.asarray(sc.speeds), axes,
                                             float(sc.T), float(sc.tau), False)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _backend.compiled is None:
        print("compiled kernel not built; only the fallback is timed")
    kernels = [("python", _backend.py)] + ([("cython", _backend.compiled)] if _backend.compiled else [])
    cases = [
        ("simulate ex31 h=1e-3", lambda k: sim_case(k, "ex31", [2.6756317], 1e-3)),
        ("simulate ex53 h=1e-3", lambda k: sim_case(k, "ex53", [1.306309, 0.653154, 0.272148], 1e-3)),
        ("grid ex53 41^3", lambda k: grid_case(k, "ex53", 41)),
        ("grid ex51 201^2", lambda k: grid_case(k, "ex51", 201)),
    ]
    print(f"{'case':<24}" + "".join(f"{n:>12}" for n, _ in kernels) + "     speedup")
    for label, make in cases:
        secs = [best_of(make(k), args.repeat) for _, k in kernels]
        ratio = f"{secs[0] / secs[1]:10.1f}x" if len(secs) > 1 else ""
        print(f"{label:<24}" + "".join(f"{s * 1e3:10.2f}ms" for s in secs) + "  " + ratio)


if __name__ == "__main__":
    main()
