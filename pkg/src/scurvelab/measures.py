"""Discrete measures and equilibrium weight solves on curve systems.

The weighted logarithmic energy

    E_phi(mu) = integral integral log 1/|x - y| dmu(x) dmu(y) + 2 integral phi dmu

is discretized on fixed quadrature nodes with free nonnegative weights
summing to a prescribed mass.  Off-diagonal kernel entries use the
midpoint rule, upgraded to Gauss-Legendre cell averages for cells within
two neighbors of each other; the diagonal carries the self energy of a
uniformly charged cell, log(1/l_i) + 3/2.  With that diagonal the
minimized quadratic value approximates the continuum energy directly,
while the bare point-pair energy of the solution (``discrete_energy``)
sits below it by the documented offset ``self_energy_offset``.

Optimality of the weights is the discrete equilibrium characterization:
the regularized potential plus phi equals a constant w on the support of
the solution and is at least w on the rest of the system.  The solver
runs a monotone Frank-Wolfe warmup on the scaled simplex followed by an
active-set polish that drives both optimality residuals to round-off.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from ._backend import BACKEND
from .contours import ContourSystem, Quadrature, discretize, _GL7_W
from .errors import (
    ConvergenceError,
    DegenerateConfigError,
    SingularFieldError,
    UnboundedEnergyError,
)
from .fields import ExternalField

_GLW_NORM = _GL7_W / _GL7_W.sum()


@dataclass
class DiscreteMeasure:
    """Point masses ``weights[i]`` at ``nodes[i]`` (weights nonnegative)."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=complex).ravel()
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if self.nodes.size != self.weights.size:
            raise ValueError("nodes and weights must have equal length")
        if self.nodes.size == 0:
            raise DegenerateConfigError("empty measure")
        if np.any(~np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise ValueError("weights must be finite and nonnegative")

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def restricted(self, mask) -> "DiscreteMeasure":
        return DiscreteMeasure(self.nodes[mask], self.weights[mask])

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.nodes, factor * self.weights)

    # serialization ------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("re,im,weight\n")
        for z, w in zip(self.nodes, self.weights):
            buf.write(f"{z.real:.17g},{z.imag:.17g},{w:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DiscreteMeasure":
        rows = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1, ndmin=2)
        return cls(rows[:, 0] + 1j * rows[:, 1], rows[:, 2])


def _min_pair_distance(nodes: np.ndarray) -> float:
    if nodes.size < 2:
        return np.inf
    from scipy.spatial import cKDTree

    xy = np.column_stack([nodes.real, nodes.imag])
    d, _ = cKDTree(xy).query(xy, k=2)
    return float(d[:, 1].min())


def _guard_configuration(mu: DiscreteMeasure):
    active = mu.weights > 0
    if active.sum() >= 2:
        scale = max(1.0, float(np.max(np.abs(mu.nodes[active]))))
        if _min_pair_distance(mu.nodes[active]) <= 1e-14 * scale:
            raise DegenerateConfigError(
                "degenerate configuration: coincident nodes with positive weight"
            )


def discrete_energy(mu: DiscreteMeasure) -> float:
    """Point-pair energy  sum_{i != j} w_i w_j log 1/|z_i - z_j|."""
    _guard_configuration(mu)
    return kernels.offdiag_energy(mu.nodes, mu.weights)


def weighted_energy(mu: DiscreteMeasure, field: ExternalField) -> float:
    """discrete_energy plus the field term 2 sum_i phi(z_i) w_i."""
    phi = field.value(mu.nodes)
    hot = (mu.weights > 0) & ~np.isfinite(phi)
    if hot.any():
        raise SingularFieldError("field singular at node")
    return discrete_energy(mu) + 2.0 * float(np.sum(phi * mu.weights, where=mu.weights > 0))


def self_energy_offset(mu: DiscreteMeasure, spacings: Optional[np.ndarray] = None) -> float:
    """Spacing-dependent difference between the cell-quadrature energy and
    the point-pair energy: sum_i w_i^2 (log(1/l_i) + 3/2).

    Without explicit spacings the local cell length is estimated from the
    two nearest neighbors, which is adequate for measures that came from a
    curve discretization.
    """
    if spacings is None:
        from scipy.spatial import cKDTree

        xy = np.column_stack([mu.nodes.real, mu.nodes.imag])
        k = min(3, mu.nodes.size)
        d, _ = cKDTree(xy).query(xy, k=k)
        spacings = d[:, 1:].mean(axis=1) if k > 1 else np.ones(mu.nodes.size)
    spacings = np.maximum(np.asarray(spacings, dtype=float), 1e-300)
    return float(np.sum(mu.weights**2 * (-np.log(spacings) + 1.5)))


def potential(mu: DiscreteMeasure, z):
    """Logarithmic potential sum_i w_i log 1/|z - z_i|.

    Returns +inf at a node carrying positive weight.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    out = kernels.potential_batch(mu.nodes, mu.weights, z_arr)
    scale = max(1.0, float(np.max(np.abs(mu.nodes))))
    for k, p in enumerate(z_arr):
        d = np.abs(mu.nodes - p)
        hit = (d <= 1e-14 * scale) & (mu.weights > 0)
        if hit.any():
            out[k] = np.inf
    return out if np.ndim(z) else float(out[0])


def cauchy_transform(mu: DiscreteMeasure, z):
    """C_mu(z) = sum_i w_i / (z_i - z); errors out at an atom."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    scale = max(1.0, float(np.max(np.abs(mu.nodes))))
    for p in z_arr:
        d = np.abs(mu.nodes - p)
        if ((d <= 1e-14 * scale) & (mu.weights > 0)).any():
            raise ValueError("evaluation at atom")
    out = kernels.cauchy_batch(mu.nodes, mu.weights, z_arr)
    return out if np.ndim(z) else complex(out[0])


# ---------------------------------------------------------------------------
# equilibrium solve


@dataclass
class EquilibriumResult:
    """Solution of the discrete equilibrium problem on fixed nodes.

    ``constant_w`` is the flat level of (regularized potential + phi) on
    the support; ``energy`` is the minimized cell-quadrature energy,
    which equals ``constant_w * mass + sum(phi * w)``.  ``residual_eq``
    and ``residual_ineq`` are the optimality defects on and off the
    support.  ``trace`` holds the monotone objective values of accepted
    iterates.
    """

    measure: DiscreteMeasure
    constant_w: float
    energy: float
    support: np.ndarray
    residual_eq: float
    residual_ineq: float
    trace: np.ndarray
    quadrature: Optional[Quadrature] = None
    converged: bool = True
    backend: str = BACKEND

    def density(self) -> np.ndarray:
        """Weights divided by local spacing (needs the quadrature)."""
        if self.quadrature is None:
            raise ValueError("no quadrature attached to this result")
        return self.measure.weights / self.quadrature.spacings

    def support_nodes(self) -> np.ndarray:
        return self.measure.nodes[self.support]

    def summary_dict(self) -> dict:
        return {
            "constant_w": float(self.constant_w),
            "energy": float(self.energy),
            "residual_eq": float(self.residual_eq),
            "residual_ineq": float(self.residual_ineq),
            "mass": self.measure.mass,
            "n_nodes": int(self.measure.nodes.size),
            "n_support": int(self.support.sum()),
            "converged": bool(self.converged),
        }


def build_kernel_matrix(quad: Quadrature) -> np.ndarray:
    """Cell-quadrature energy kernel for a discretized system.

    Midpoint entries off the diagonal, symmetric Gauss-Legendre cell
    averages for neighboring cells, uniform-cell self energy on the
    diagonal.
    """
    diag = -np.log(np.maximum(quad.spacings, 1e-300)) + 1.5
    K = kernels.log_kernel_matrix(quad.nodes, diag)
    pairs = quad.near_pairs(2)
    if pairs:
        idx = np.asarray(pairs)
        i, j = idx[:, 0], idx[:, 1]
        aij = -np.log(np.abs(quad.nodes[i, None] - quad.cell_samples[j])) @ _GLW_NORM
        aji = -np.log(np.abs(quad.nodes[j, None] - quad.cell_samples[i])) @ _GLW_NORM
        K[i, j] = K[j, i] = 0.5 * (aij + aji)
    return K


def _bordered_solve(K, phi, mass, idx):
    m = idx.size
    M = np.empty((m + 1, m + 1))
    M[:m, :m] = 2.0 * K[np.ix_(idx, idx)]
    M[:m, m] = 1.0
    M[m, :m] = 1.0
    M[m, m] = 0.0
    rhs = np.concatenate([-2.0 * phi[idx], [mass]])
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return sol[:m], -0.5 * sol[m]


def solve_kernel_qp(K: np.ndarray, phi: np.ndarray, mass: float,
                    tol: float = 1e-8, max_iter: int = 5000,
                    fw_iters: int = 300):
    """Minimize w'Kw + 2 phi'w over {w >= 0, sum w = mass}.

    Returns (w, constant, residual_eq, residual_ineq, trace, converged).
    Frank-Wolfe supplies a monotone warmup; the active-set phase then
    alternates exact face solves with single worst-violator insertions
    until both optimality residuals vanish to round-off.
    """
    n = K.shape[0]
    if not np.all(np.isfinite(phi)):
        if np.any(np.isneginf(phi)):
            raise UnboundedEnergyError("energy unbounded")
        raise SingularFieldError("field singular at node")
    scale = 1.0 + float(np.abs(phi).max(initial=0.0)) + float(np.abs(K).max())

    w, trace_fw, _ = kernels.fw_simplex(
        K, phi, mass, max_iter=min(fw_iters, max_iter), gap_tol=1e-12 * scale * mass
    )
    trace = list(trace_fw)
    f_best = trace[-1] if trace else np.inf

    def objective(wv):
        return float(wv @ (K @ wv) + 2.0 * (phi @ wv))

    S = np.ones(n, dtype=bool)
    dual_tol = max(1e-13 * scale, 0.05 * tol)
    w_out, c_out = None, None
    rounds_cap = max(64, min(max_iter, 4 * n))
    converged = False
    for rnd in range(rounds_cap):
        idx = np.where(S)[0]
        if idx.size == 0:
            raise DegenerateConfigError("active set emptied out")
        ws, c = _bordered_solve(K, phi, mass, idx)
        if ws.min() < 0.0:
            drop = ws < 0.0
            if drop.all():
                drop = ws < ws.min() * 0.5
            S[idx[drop]] = False
            continue
        w = np.zeros(n)
        w[idx] = ws
        f = objective(w)
        if f <= f_best:
            trace.append(f)
            f_best = f
        w_out, c_out = w, c
        g = K @ w + phi
        slack = c - g
        slack[S] = -np.inf
        worst = float(slack.max())
        if worst > dual_tol:
            if rnd < 40:
                # batch phase: admit every clear violator at once
                S[slack > max(dual_tol, 0.3 * worst)] = True
            else:
                # anti-cycling tail: single worst violator
                S[int(np.argmax(slack))] = True
            continue
        converged = True
        break

    if w_out is None:
        raise ConvergenceError("no convergence", result=None)
    g = K @ w_out + phi
    on = w_out > 0
    residual_eq = float(np.max(np.abs(g[on] - c_out), initial=0.0))
    residual_ineq = float(np.max(c_out - g[~on], initial=0.0))
    residual_ineq = max(0.0, residual_ineq)
    return w_out, float(c_out), residual_eq, residual_ineq, np.asarray(trace), converged


def solve_on(quad: Quadrature, field: ExternalField, mass: float = 1.0,
             tol: float = 1e-8, max_iter: int = 5000,
             fw_iters: int = 300) -> EquilibriumResult:
    """Equilibrium weights on an existing discretization."""
    if mass <= 0:
        raise ValueError("mass must be positive")
    scale = max(1.0, float(np.max(np.abs(quad.nodes))))
    if _min_pair_distance(quad.nodes) <= 1e-14 * scale:
        raise DegenerateConfigError("degenerate configuration: coincident nodes")
    field.guard_finite(quad.nodes, scale=scale)
    phi = field.value(quad.nodes)
    K = build_kernel_matrix(quad)

    try:
        w, c, res_eq, res_ineq, trace, ok = solve_kernel_qp(
            K, phi, mass, tol=tol, max_iter=max_iter, fw_iters=fw_iters
        )
    except ConvergenceError:
        raise
    mu = DiscreteMeasure(quad.nodes, w)
    support = w > max(tol, 1e-3 * mass / quad.size)
    energy = float(w @ (K @ w) + 2.0 * (phi @ w))
    result = EquilibriumResult(
        measure=mu,
        constant_w=c,
        energy=energy,
        support=support,
        residual_eq=res_eq,
        residual_ineq=res_ineq,
        trace=trace,
        quadrature=quad,
        converged=ok and res_eq <= tol and res_ineq <= tol,
    )
    if not result.converged:
        raise ConvergenceError("no convergence", result=result)
    return result


def solve_equilibrium(system: ContourSystem, field: ExternalField,
                      mass: float = 1.0, n_nodes: int = 400,
                      tol: float = 1e-8, max_iter: int = 5000,
                      fw_iters: int = 300, counts=None) -> EquilibriumResult:
    """Discretize a contour system and solve for equilibrium weights.

    Nodes are placed by arclength with endpoint clustering; weights then
    minimize the discretized weighted energy over the scaled simplex.
    The result carries the support mask at threshold
    max(tol, 1e-3 mass / N) and both optimality residuals.  ``counts``
    pins the per-arc node allocation (see ``discretize``).
    """
    quad = discretize(system, n_nodes, counts=counts)
    return solve_on(quad, field, mass=mass, tol=tol, max_iter=max_iter,
                    fw_iters=fw_iters)
