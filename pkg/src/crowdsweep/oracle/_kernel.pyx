# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same signatures as ``_pykernel``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

STATUS_OK = 0
STATUS_STALLED = 1

cnp.import_array()


def constraint_count(int n, int m):
    return n * m + n * (n - 1) // 2


cdef inline double _hypot(double x, double y) nogil:
    return sqrt(x * x + y * y)


cdef double _project(double[:, ::1] x, double[::1] radii, double[:, ::1] obs_c,
                     double[::1] obs_r, int max_iter, double tol, double[::1] disp) nogil:
    cdef Py_ssize_t n = radii.shape[0], m = obs_r.shape[0]
    cdef Py_ssize_t i, j, k, c
    cdef int it
    cdef double viol = 0.0, R, S, dx, dy, d, push, half, ex, ey, worst
    for it in range(max_iter):
        viol = 0.0
        c = 0
        for i in range(n):
            for k in range(m):
                R = radii[i] + obs_r[k]
                dx = x[i, 0] - obs_c[k, 0]
                dy = x[i, 1] - obs_c[k, 1]
                d = _hypot(dx, dy)
                if d < R - tol:
                    if d == 0.0:
                        dx = 0.0
                        dy = 1.0
                        d = 1.0
                    push = R - d
                    x[i, 0] = obs_c[k, 0] + dx / d * R
                    x[i, 1] = obs_c[k, 1] + dy / d * R
                    disp[c] += push
                    if push > viol:
                        viol = push
                c += 1
        for i in range(n):
            for j in range(i + 1, n):
                S = radii[i] + radii[j]
                dx = x[i, 0] - x[j, 0]
                dy = x[i, 1] - x[j, 1]
                d = _hypot(dx, dy)
                if d < S - tol:
                    if d == 0.0:
                        dx = 1.0
                        dy = 0.0
                        d = 1.0
                    half = 0.5 * (S - d)
                    ex = dx / d
                    ey = dy / d
                    x[i, 0] += half * ex
                    x[i, 1] += half * ey
                    x[j, 0] -= half * ex
                    x[j, 1] -= half * ey
                    disp[c] += half
                    if 2.0 * half > viol:
                        viol = 2.0 * half
                c += 1
        if viol <= tol:
            return 0.0
    worst = 0.0
    for i in range(n):
        for k in range(m):
            d = radii[i] + obs_r[k] - _hypot(x[i, 0] - obs_c[k, 0], x[i, 1] - obs_c[k, 1])
            if d > worst:
                worst = d
        for j in range(i + 1, n):
            d = radii[i] + radii[j] - _hypot(x[i, 0] - x[j, 0], x[i, 1] - x[j, 1])
            if d > worst:
                worst = d
    return worst


def simulate_loop(x0, dest, dirs, bint frozen, umag, radii, obs_c, obs_r,
                  double h, int nsteps, double last_dt, int stride, int max_iter, double tol):
    cdef double[:, ::1] x = np.array(x0, dtype=np.float64, order="C").reshape(-1, 2).copy()
    cdef double[:, ::1] dst = np.ascontiguousarray(dest, dtype=np.float64).reshape(-1, 2)
    cdef double[:, ::1] dr = np.ascontiguousarray(dirs, dtype=np.float64).reshape(-1, 2)
    cdef double[::1] um = np.ascontiguousarray(umag, dtype=np.float64)
    cdef double[::1] rad = np.ascontiguousarray(radii, dtype=np.float64)
    cdef double[:, ::1] oc = np.ascontiguousarray(obs_c, dtype=np.float64).reshape(-1, 2)
    cdef double[::1] orr = np.ascontiguousarray(obs_r, dtype=np.float64)
    cdef Py_ssize_t n = rad.shape[0], m = orr.shape[0]
    cdef Py_ssize_t nc = n * m + n * (n - 1) // 2
    cdef Py_ssize_t nsamp = nsteps // stride + 1 + (1 if nsteps % stride else 0)
    times_a = np.empty(nsamp)
    pos_a = np.empty((nsamp, n, 2))
    eta_a = np.zeros((nsamp, nc))
    cdef double[::1] times = times_a
    cdef double[:, :, ::1] pos = pos_a
    cdef double[:, ::1] eta = eta_a
    cdef double[::1] disp = np.zeros(max(nc, 1))
    cdef Py_ssize_t i, c, row = 1
    cdef int step
    cdef double t = 0.0, dt, dx, dy, nrm, left
    times[0] = 0.0
    for i in range(n):
        pos[0, i, 0] = x[i, 0]
        pos[0, i, 1] = x[i, 1]
    with nogil:
        for step in range(1, nsteps + 1):
            dt = last_dt if step == nsteps else h
            for i in range(n):
                if frozen:
                    x[i, 0] -= dt * um[i] * dr[i, 0]
                    x[i, 1] -= dt * um[i] * dr[i, 1]
                else:
                    dx = x[i, 0] - dst[i, 0]
                    dy = x[i, 1] - dst[i, 1]
                    nrm = _hypot(dx, dy)
                    if nrm > 0.0:
                        x[i, 0] -= dt * um[i] * dx / nrm
                        x[i, 1] -= dt * um[i] * dy / nrm
            for c in range(nc):
                disp[c] = 0.0
            left = _project(x, rad, oc, orr, max_iter, tol, disp)
            if step < nsteps:
                t = t + dt
            else:
                t = h * (nsteps - 1) + last_dt
            if left > tol:
                with gil:
                    return times_a[:row], pos_a[:row], eta_a[:row], STATUS_STALLED, step
            if step % stride == 0 or step == nsteps:
                times[row] = t
                for i in range(n):
                    pos[row, i, 0] = x[i, 0]
                    pos[row, i, 1] = x[i, 1]
                for c in range(nc):
                    eta[row, c] = disp[c] / dt
                row += 1
    return times_a[:row], pos_a[:row], eta_a[:row], STATUS_OK, nsteps


cdef void _merge(const double* w, const double* u, int n, double T, double* out) noexcept nogil:
    """Event-driven sticky merge: clusters move at the mean speed, never split."""
    cdef double pos[16]
    cdef double vel[16]
    cdef double csum[16]
    cdef int cstart[16]
    cdef int ccount[16]
    cdef int nclus = n, k, r, q, best
    cdef double t = 0.0, dt, closing, gap
    for k in range(n):
        cstart[k] = k
        ccount[k] = 1
        csum[k] = u[k]
        pos[k] = w[k]
        vel[k] = u[k]
    while True:
        k = 0
        while k < nclus - 1:
            if pos[k + 1] - pos[k] <= 1e-12 * (1.0 + abs(pos[k])) and vel[k] > vel[k + 1]:
                csum[k] += csum[k + 1]
                ccount[k] += ccount[k + 1]
                vel[k] = csum[k] / ccount[k]
                for q in range(k + 1, nclus - 1):
                    cstart[q] = cstart[q + 1]
                    ccount[q] = ccount[q + 1]
                    csum[q] = csum[q + 1]
                    pos[q] = pos[q + 1]
                    vel[q] = vel[q + 1]
                nclus -= 1
                if k > 0:
                    k -= 1
            else:
                k += 1
        dt = INFINITY
        best = -1
        for k in range(nclus - 1):
            closing = vel[k] - vel[k + 1]
            if closing > 0:
                gap = pos[k + 1] - pos[k]
                if gap < 0:
                    gap = 0
                if gap / closing < dt:
                    dt = gap / closing
                    best = k
        if best < 0 or t + dt >= T:
            dt = T - t
            for k in range(nclus):
                pos[k] += vel[k] * dt
            break
        for k in range(nclus):
            pos[k] += vel[k] * dt
        pos[best + 1] = pos[best]
        t += dt
    for k in range(nclus):
        for r in range(ccount[k]):
            out[cstart[k] + r] = pos[k]


cdef void _isotonic(const double* w, const double* u, int n, double T, double* out) noexcept nogil:
    """Same terminal state via the min-max formula for the isotonic regression of free flight."""
    cdef double csum[17]
    cdef int i, j, k
    cdef double best, low, avg
    csum[0] = 0.0
    for i in range(n):
        csum[i + 1] = csum[i] + w[i] + T * u[i]
    for i in range(n):
        best = -INFINITY
        for j in range(i + 1):
            low = INFINITY
            for k in range(i, n):
                avg = (csum[k + 1] - csum[j]) / (k + 1 - j)
                if avg < low:
                    low = avg
            if low > best:
                best = low
        out[i] = best


def corridor_terminal(w0, u, double T):
    """Terminal positions (``w`` coordinate) for each row of desired speeds."""
    cdef double[::1] w = np.ascontiguousarray(w0, dtype=np.float64)
    cdef double[:, ::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t N = uu.shape[0], n = uu.shape[1], row
    if n > 16:
        raise ValueError("at most 16 agents")
    out_a = np.empty((N, n))
    cdef double[:, ::1] out = out_a
    with nogil:
        for row in range(N):
            _merge(&w[0], &uu[row, 0], <int>n, T, &out[row, 0])
    return out_a


def corridor_grid_cost(w0, offsets, speeds, axes, double T, double tau, bint scaled):
    """Cost on the tensor grid spanned by ``axes`` (one array per agent), C order."""
    cdef double[::1] w = np.ascontiguousarray(w0, dtype=np.float64)
    cdef double[::1] off = np.ascontiguousarray(offsets, dtype=np.float64)
    cdef double[::1] s = np.ascontiguousarray(speeds, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    if n > 16 or len(axes) != n:
        raise ValueError("one axis per agent, at most 16 agents")
    cdef int lens[16]
    cdef double* ax[16]
    keep = [np.ascontiguousarray(v, dtype=np.float64) for v in axes]
    cdef double[::1] tmp
    cdef Py_ssize_t total = 1, i, idx, rem
    for i in range(n):
        tmp = keep[i]
        lens[i] = <int>tmp.shape[0]
        ax[i] = &tmp[0]
        total *= lens[i]
    out_a = np.empty(total)
    cdef double[::1] out = out_a
    cdef double a[16]
    cdef double u[16]
    cdef double res[16]
    cdef double term, effort, rho
    with nogil:
        for idx in range(total):
            rem = idx
            for i in range(n - 1, -1, -1):
                a[i] = ax[i][rem % lens[i]]
                rem = rem // lens[i]
            effort = 0.0
            for i in range(n):
                u[i] = a[i] * s[i]
                effort += a[i] * a[i]
            _isotonic(&w[0], u, <int>n, T, res)
            term = 0.0
            for i in range(n):
                rho = res[i] + off[i]
                term += rho * rho
            effort *= 0.5 * tau * T
            if scaled:
                effort = effort / a[n - 1] if a[n - 1] > 0 else INFINITY
            out[idx] = 0.5 * term + effort
    return out_a
