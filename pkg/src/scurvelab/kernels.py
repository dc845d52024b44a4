"""Hot numeric kernels, dispatched to the compiled or vectorized backend.

See ``_backend`` for how the backend is chosen.  Functions here take
plain numpy arrays: ``nodes`` complex128, ``weights``/``diag`` float64.
"""

from __future__ import annotations

import numpy as np

from ._backend import BACKEND

if BACKEND == "numba":
    from . import _kernels_numba as _impl
else:
    from . import _kernels_numpy as _impl


def _cplx(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def _real(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def log_kernel_matrix(nodes, diag):
    """Symmetric matrix with -log|z_i - z_j| off the diagonal."""
    return _impl.log_kernel_matrix(_cplx(nodes), _real(diag))


def offdiag_energy(nodes, weights):
    """sum_{i != j} w_i w_j log(1/|z_i - z_j|)."""
    return float(_impl.offdiag_energy(_cplx(nodes), _real(weights)))


def potential_batch(nodes, weights, points):
    """Logarithmic potential sum_i w_i log(1/|p - z_i|) at each point."""
    return _impl.potential_batch(_cplx(nodes), _real(weights), _cplx(points))


def cauchy_batch(nodes, weights, points):
    """Cauchy transform sum_i w_i/(z_i - p) at each point."""
    return _impl.cauchy_batch(_cplx(nodes), _real(weights), _cplx(points))


def node_cauchy(nodes, weights):
    """Self-excluded Cauchy sums C_i = sum_{j != i} w_j/(z_i - z_j)."""
    return _impl.node_cauchy(_cplx(nodes), _real(weights))


def variation_sum(nodes, weights, h, hprime):
    """Discrete variational double sum; see ``scurve.energy_variation``."""
    return float(
        _impl.variation_sum(_cplx(nodes), _real(weights), _cplx(h), _cplx(hprime))
    )


def fw_simplex(K, phi, mass, w0=None, max_iter=2000, gap_tol=1e-10):
    """Pairwise Frank-Wolfe descent for the simplex quadratic program.

    Returns ``(w, trace, gap)`` where ``trace`` is the monotone
    per-iteration objective and ``gap`` the final duality gap.
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    phi = _real(phi)
    if w0 is None:
        w0 = np.full(K.shape[0], mass / K.shape[0])
    w, trace, gap = _impl.fw_simplex(
        K, phi, float(mass), _real(w0), int(max_iter), float(gap_tol)
    )
    return w, trace, float(gap)
