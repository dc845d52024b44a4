"""Vectorized reference implementations of the O(N^2) kernels.

Same contracts as ``_kernels_numba``; selected when the compiled
backend is disabled or unavailable.
"""

from __future__ import annotations

import numpy as np


def log_kernel_matrix(nodes, diag):
    d = np.abs(nodes[:, None] - nodes[None, :])
    np.fill_diagonal(d, 1.0)
    K = -np.log(d)
    np.fill_diagonal(K, diag)
    return K


def offdiag_energy(nodes, weights):
    d = np.abs(nodes[:, None] - nodes[None, :])
    np.fill_diagonal(d, 1.0)
    q = (weights[:, None] * weights[None, :]) * np.log(d)
    return -(q.sum() - np.trace(q))


def potential_batch(nodes, weights, points):
    d = np.abs(points[:, None] - nodes[None, :])
    return -(np.log(d) @ weights)


def cauchy_batch(nodes, weights, points):
    return (1.0 / (nodes[None, :] - points[:, None])) @ weights.astype(np.complex128)


def node_cauchy(nodes, weights):
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    r = 1.0 / diff
    np.fill_diagonal(r, 0.0)
    return r @ weights.astype(np.complex128)


def variation_sum(nodes, weights, h, hprime):
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    q = (h[:, None] - h[None, :]) / diff
    np.fill_diagonal(q, 0.0)
    ww = weights[:, None] * weights[None, :]
    acc = float(np.sum(ww * q.real))
    acc += float(np.sum(weights * weights * hprime.real))
    return acc


def fw_simplex(K, phi, mass, w0, max_iter, gap_tol):
    n = K.shape[0]
    w = w0.copy()
    Kw = K @ w
    f = float(w @ Kw + 2.0 * (phi @ w))
    trace = []
    gap = np.inf
    for _ in range(max_iter):
        g = 2.0 * (Kw + phi)
        best = int(np.argmin(g))
        on_support = w > 0.0
        if not on_support.any():
            trace.append(f)
            break
        gmask = np.where(on_support, g, -np.inf)
        worst = int(np.argmax(gmask))
        gap = float(g @ w - mass * g[best])
        if gap <= gap_tol or worst == best:
            trace.append(f)
            break
        slope = float(g[best] - g[worst])
        curv = 2.0 * float(K[best, best] + K[worst, worst] - 2.0 * K[best, worst])
        step = -slope / curv if curv > 0.0 else w[worst]
        step = min(step, w[worst])
        if step <= 0.0:
            trace.append(f)
            break
        f += step * slope + step * step * 0.5 * curv
        w[best] += step
        w[worst] = max(w[worst] - step, 0.0)
        Kw += step * (K[:, best] - K[:, worst])
        trace.append(f)
    return w, np.asarray(trace, dtype=np.float64), gap
