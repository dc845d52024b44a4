"""Compiled O(N^2) kernels.

Loop bodies mirror the numpy implementations in ``_kernels_numpy``
exactly; tests assert agreement to near machine precision.  Loops are
serial on purpose: a fixed reduction order keeps results bitwise stable
between runs.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def log_kernel_matrix(nodes, diag):
    n = nodes.shape[0]
    K = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        K[i, i] = diag[i]
        for j in range(i + 1, n):
            v = -np.log(np.abs(nodes[i] - nodes[j]))
            K[i, j] = v
            K[j, i] = v
    return K


@njit(cache=True)
def offdiag_energy(nodes, weights):
    n = nodes.shape[0]
    acc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            acc -= weights[i] * weights[j] * np.log(np.abs(nodes[i] - nodes[j]))
    return 2.0 * acc


@njit(cache=True)
def potential_batch(nodes, weights, points):
    n = nodes.shape[0]
    m = points.shape[0]
    out = np.empty(m, dtype=np.float64)
    for k in range(m):
        acc = 0.0
        for i in range(n):
            acc -= weights[i] * np.log(np.abs(points[k] - nodes[i]))
        out[k] = acc
    return out


@njit(cache=True)
def cauchy_batch(nodes, weights, points):
    n = nodes.shape[0]
    m = points.shape[0]
    out = np.empty(m, dtype=np.complex128)
    for k in range(m):
        acc = 0.0 + 0.0j
        for i in range(n):
            acc += weights[i] / (nodes[i] - points[k])
        out[k] = acc
    return out


@njit(cache=True)
def node_cauchy(nodes, weights):
    """C_i = sum_{j != i} w_j / (z_i - z_j)."""
    n = nodes.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(n):
            if j != i:
                acc += weights[j] / (nodes[i] - nodes[j])
        out[i] = acc
    return out


@njit(cache=True)
def variation_sum(nodes, weights, h, hprime):
    """Re sum_{i != j} w_i w_j (h_i - h_j)/(z_i - z_j), the i = j pairs
    contributing w_i^2 Re h'(z_i)."""
    n = nodes.shape[0]
    acc = 0.0
    for i in range(n):
        acc += weights[i] * weights[i] * hprime[i].real
        for j in range(i + 1, n):
            q = (h[i] - h[j]) / (nodes[i] - nodes[j])
            acc += 2.0 * weights[i] * weights[j] * q.real
    return acc


@njit(cache=True)
def fw_simplex(K, phi, mass, w0, max_iter, gap_tol):
    """Pairwise Frank-Wolfe for  min  w'Kw + 2 phi'w  on the scaled simplex.

    Each step shifts weight from the worst vertex of the current support
    to the best vertex, with the exact minimizer of the quadratic model
    as step size, so the objective never increases.  Returns the iterate,
    the per-iteration objective trace, and the final duality gap.
    """
    n = K.shape[0]
    w = w0.copy()
    Kw = K @ w
    f = w @ Kw + 2.0 * (phi @ w)
    trace = np.empty(max_iter, dtype=np.float64)
    gap = np.inf
    used = 0
    for it in range(max_iter):
        best = 0
        worst = -1
        gbest = np.inf
        gworst = -np.inf
        for i in range(n):
            g = 2.0 * (Kw[i] + phi[i])
            if g < gbest:
                gbest = g
                best = i
            if w[i] > 0.0 and g > gworst:
                gworst = g
                worst = i
        # duality gap of the linear minimization oracle
        gap = 2.0 * (w @ Kw + phi @ w) - mass * gbest
        if gap <= gap_tol or worst < 0 or worst == best:
            trace[it] = f
            used = it + 1
            break
        slope = gbest - gworst
        curv = 2.0 * (K[best, best] + K[worst, worst] - 2.0 * K[best, worst])
        if curv > 0.0:
            step = -slope / curv
        else:
            step = w[worst]
        if step > w[worst]:
            step = w[worst]
        if step <= 0.0:
            trace[it] = f
            used = it + 1
            break
        f += step * slope + step * step * 0.5 * curv
        w[best] += step
        w[worst] -= step
        if w[worst] < 0.0:
            w[worst] = 0.0
        for i in range(n):
            Kw[i] += step * (K[i, best] - K[i, worst])
        trace[it] = f
        used = it + 1
    return w, trace[:used], gap
