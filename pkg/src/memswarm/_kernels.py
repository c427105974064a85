"""Compiled inner loop for memristive network transients.

Mirrors :func:`memswarm.memnet.step` stage for stage; the numpy version is
the reference and the test suite checks the two against each other.
"""

import numpy as np
from numba import njit

OK = 0
BLOWUP = 1
SINGULAR = 2


@njit(cache=True)
def _cholesky_solve(L, b, v):
    # in-place lower Cholesky of the reduced Laplacian; False if not SPD
    m = b.size
    for j in range(m):
        d = L[j, j]
        for k in range(j):
            d -= L[j, k] * L[j, k]
        if not d > 0.0:
            return False
        d = np.sqrt(d)
        L[j, j] = d
        for i in range(j + 1, m):
            s = L[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
            L[i, j] = s / d
    for i in range(m):
        s = b[i]
        for k in range(i):
            s -= L[i, k] * v[k]
        v[i] = s / L[i, i]
    for i in range(m - 1, -1, -1):
        s = v[i]
        for k in range(i + 1, m):
            s -= L[k, i] * v[k]
        v[i] = s / L[i, i]
    return True


@njit(cache=True)
def _rates(x, tail, head, b, son, soff, kappa, gamma, i_t, dx, cur, sig, L, v):
    nb = x.size
    m = b.size
    for j in range(nb):
        if not np.isfinite(x[j]):
            return BLOWUP
        sig[j] = soff[j] + x[j] * (son[j] - soff[j])
    L[:, :] = 0.0
    for j in range(nb):
        p = tail[j]
        q = head[j]
        s = sig[j]
        if p >= 0:
            L[p, p] += s
        if q >= 0:
            L[q, q] += s
        if p >= 0 and q >= 0:
            L[p, q] -= s
            L[q, p] -= s
    if m > 0 and not _cholesky_solve(L, b, v):
        return SINGULAR
    for j in range(nb):
        vp = v[tail[j]] if tail[j] >= 0 else 0.0
        vq = v[head[j]] if head[j] >= 0 else 0.0
        current = sig[j] * (vp - vq)
        cur[j] = current
        mag = abs(current)
        if mag < i_t[j]:
            r = -gamma[j] * x[j]
        else:
            r = np.sign(current) * kappa[j] * (mag - i_t[j]) - gamma[j] * x[j]
        if (x[j] <= 0.0 and r < 0.0) or (x[j] >= 1.0 and r > 0.0):
            r = 0.0
        if not np.isfinite(r):
            return BLOWUP
        dx[j] = r
    return OK


@njit(cache=True)
def simulate_kernel(x0, tail, head, b, son, soff, kappa, gamma, i_t, dt, n_steps, stride, steady_tol):
    """Fixed-step RK4 with a DC re-solve per stage.

    Returns (status, steps_taken, clamp_events, times, states, currents,
    conductances, final_state).  Samples are taken every ``stride`` steps
    starting at step 0, plus the stopping step when ``steady_tol > 0``
    ends the run early.
    """
    nb = x0.size
    m = b.size
    n_rec = n_steps // stride + 2
    times = np.empty(n_rec)
    X = np.empty((n_rec, nb))
    I = np.empty((n_rec, nb))
    S = np.empty((n_rec, nb))
    L = np.empty((m, m))
    v = np.zeros(m)
    k1 = np.empty(nb)
    k2 = np.empty(nb)
    k3 = np.empty(nb)
    k4 = np.empty(nb)
    cur = np.empty(nb)
    sig = np.empty(nb)
    tmp = np.empty(nb)
    x = x0.copy()
    clamps = 0

    st = _rates(x, tail, head, b, son, soff, kappa, gamma, i_t, k1, cur, sig, L, v)
    if st != OK:
        return st, 0, clamps, times[:0], X[:0], I[:0], S[:0], x
    times[0] = 0.0
    X[0] = x
    I[0] = cur
    S[0] = sig
    n = 1
    for k in range(1, n_steps + 1):
        for j in range(nb):
            tmp[j] = x[j] + 0.5 * dt * k1[j]
        st = _rates(tmp, tail, head, b, son, soff, kappa, gamma, i_t, k2, cur, sig, L, v)
        if st == OK:
            for j in range(nb):
                tmp[j] = x[j] + 0.5 * dt * k2[j]
            st = _rates(tmp, tail, head, b, son, soff, kappa, gamma, i_t, k3, cur, sig, L, v)
        if st == OK:
            for j in range(nb):
                tmp[j] = x[j] + dt * k3[j]
            st = _rates(tmp, tail, head, b, son, soff, kappa, gamma, i_t, k4, cur, sig, L, v)
        if st != OK:
            return st, k - 1, clamps, times[:n], X[:n], I[:n], S[:n], x
        for j in range(nb):
            xn = x[j] + (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if not np.isfinite(xn):
                return BLOWUP, k - 1, clamps, times[:n], X[:n], I[:n], S[:n], x
            if xn < 0.0:
                xn = 0.0
                clamps += 1
            elif xn > 1.0:
                xn = 1.0
                clamps += 1
            x[j] = xn
        st = _rates(x, tail, head, b, son, soff, kappa, gamma, i_t, k1, cur, sig, L, v)
        if st != OK:
            return st, k, clamps, times[:n], X[:n], I[:n], S[:n], x
        steady = False
        if steady_tol > 0.0:
            steady = True
            for j in range(nb):
                if abs(k1[j]) >= steady_tol:
                    steady = False
                    break
        if k % stride == 0 or steady:
            times[n] = k * dt
            X[n] = x
            I[n] = cur
            S[n] = sig
            n += 1
        if steady:
            return OK, k, clamps, times[:n], X[:n], I[:n], S[:n], x
    return OK, n_steps, clamps, times[:n], X[:n], I[:n], S[:n], x
