"""Pure-Python kernels. Same signatures as the compiled ``_kernel`` module."""
from __future__ import annotations

import math

import numpy as np

STATUS_OK = 0
STATUS_STALLED = 1


def constraint_count(n: int, m: int) -> int:
    return n * m + n * (n - 1) // 2


def desired(x, dest, dirs, frozen, umag, out):
    n = len(umag)
    for i in range(n):
        if frozen:
            out[i][0] = -umag[i] * dirs[i][0]
            out[i][1] = -umag[i] * dirs[i][1]
            continue
        dx = x[i][0] - dest[i][0]
        dy = x[i][1] - dest[i][1]
        nrm = math.hypot(dx, dy)
        if nrm == 0.0:
            out[i][0] = out[i][1] = 0.0
        else:
            out[i][0] = -umag[i] * dx / nrm
            out[i][1] = -umag[i] * dy / nrm


def project(x, radii, obs_c, obs_r, max_iter, tol, disp):
    """Gauss-Seidel sweeps: obstacles first, then pairs with an equal split.

    ``disp[c]`` accumulates the per-agent displacement of constraint ``c``.
    Returns the remaining maximal violation.
    """
    n, m = len(radii), len(obs_r)
    viol = 0.0
    for _ in range(max_iter):
        viol = 0.0
        c = 0
        for i in range(n):
            for k in range(m):
                R = radii[i] + obs_r[k]
                dx = x[i][0] - obs_c[k][0]
                dy = x[i][1] - obs_c[k][1]
                d = math.hypot(dx, dy)
                if d < R - tol:
                    if d == 0.0:
                        dx, dy, d = 0.0, 1.0, 1.0
                    push = R - d
                    x[i][0] = obs_c[k][0] + dx / d * R
                    x[i][1] = obs_c[k][1] + dy / d * R
                    disp[c] += push
                    viol = max(viol, push)
                c += 1
        for i in range(n):
            for j in range(i + 1, n):
                S = radii[i] + radii[j]
                dx = x[i][0] - x[j][0]
                dy = x[i][1] - x[j][1]
                d = math.hypot(dx, dy)
                if d < S - tol:
                    if d == 0.0:
                        dx, dy, d = 1.0, 0.0, 1.0
                    half = 0.5 * (S - d)
                    ex, ey = dx / d, dy / d
                    x[i][0] += half * ex
                    x[i][1] += half * ey
                    x[j][0] -= half * ex
                    x[j][1] -= half * ey
                    disp[c] += half
                    viol = max(viol, 2.0 * half)
                c += 1
        if viol <= tol:
            return 0.0
    return _violation(x, radii, obs_c, obs_r)


def _violation(x, radii, obs_c, obs_r):
    n, m = len(radii), len(obs_r)
    worst = 0.0
    for i in range(n):
        for k in range(m):
            d = math.hypot(x[i][0] - obs_c[k][0], x[i][1] - obs_c[k][1])
            worst = max(worst, radii[i] + obs_r[k] - d)
        for j in range(i + 1, n):
            d = math.hypot(x[i][0] - x[j][0], x[i][1] - x[j][1])
            worst = max(worst, radii[i] + radii[j] - d)
    return worst


def simulate_loop(x0, dest, dirs, frozen, umag, radii, obs_c, obs_r,
                  h, nsteps, last_dt, stride, max_iter, tol):
    """Catching-up iterations. Returns (times, positions, eta, status, step)."""
    n, m = len(radii), len(obs_r)
    nc = constraint_count(n, m)
    x = [[float(p[0]), float(p[1])] for p in x0]
    dest = [[float(p[0]), float(p[1])] for p in dest]
    dirs = [[float(p[0]), float(p[1])] for p in dirs]
    umag = [float(u) for u in umag]
    radii = [float(r) for r in radii]
    obs_c = [[float(p[0]), float(p[1])] for p in obs_c]
    obs_r = [float(r) for r in obs_r]
    nsamp = nsteps // stride + 1 + (1 if nsteps % stride else 0)
    times = np.empty(nsamp)
    pos = np.empty((nsamp, n, 2))
    eta = np.zeros((nsamp, nc))
    times[0] = 0.0
    pos[0] = x
    u = [[0.0, 0.0] for _ in range(n)]
    t = 0.0
    row = 1
    for step in range(1, nsteps + 1):
        dt = last_dt if step == nsteps else h
        desired(x, dest, dirs, frozen, umag, u)
        for i in range(n):
            x[i][0] += dt * u[i][0]
            x[i][1] += dt * u[i][1]
        disp = [0.0] * nc
        left = project(x, radii, obs_c, obs_r, max_iter, tol, disp)
        t = t + dt if step < nsteps else h * (nsteps - 1) + last_dt
        if left > tol:
            return times[:row], pos[:row], eta[:row], STATUS_STALLED, step
        if step % stride == 0 or step == nsteps:
            times[row] = t
            pos[row] = x
            eta[row] = [v / dt for v in disp]
            row += 1
    return times[:row], pos[:row], eta[:row], STATUS_OK, nsteps


def corridor_terminal(w0, u, T):
    """Terminal positions of sticky 1-D particles for a batch of desired speeds.

    ``w0`` are initial positions with the contact distances removed (so touching
    means equal), non-decreasing from the rearmost agent. ``u`` has one row of
    forward speeds per candidate. The terminal configuration is the isotonic
    (non-decreasing) regression of free flight, evaluated with the min-max
    formula. Returns ``(N, n)`` terminal positions in the ``w`` coordinate.
    """
    free = np.asarray(w0)[None, :] + T * np.asarray(u)
    N, n = free.shape
    csum = np.concatenate([np.zeros((N, 1)), np.cumsum(free, axis=1)], axis=1)
    out = np.empty_like(free)
    for i in range(n):
        best = np.full(N, -np.inf)
        for j in range(i + 1):
            low = np.full(N, np.inf)
            for k in range(i, n):
                low = np.minimum(low, (csum[:, k + 1] - csum[:, j]) / (k + 1 - j))
            best = np.maximum(best, low)
        out[:, i] = best
    return out


def corridor_grid_cost(w0, offsets, speeds, axes, T, tau, scaled):
    """Cost on the tensor grid spanned by ``axes`` (one array per agent), C order."""
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    w = corridor_terminal(w0, grid * np.asarray(speeds)[None, :], T)
    rho = w + np.asarray(offsets)[None, :]
    effort = 0.5 * tau * T * np.sum(grid ** 2, axis=1)
    if scaled:
        with np.errstate(divide="ignore", invalid="ignore"):
            effort = np.where(grid[:, -1] > 0, effort / grid[:, -1], np.inf)
    return 0.5 * np.sum(rho ** 2, axis=1) + effort
