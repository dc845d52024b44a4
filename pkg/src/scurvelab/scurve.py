"""S-curve search: maximize equilibrium energy over a contour family.

Among all admissible compacts joining a fixed anchor set, the extremal
one carries an equilibrium measure whose total potential has equal
normal derivatives from both sides of the support (the S-property).
This module implements the outer loop of that max-min principle:

* ``energy_variation`` evaluates the directional derivative functional

      D_h = Re( sum_{i != j} w_i w_j (h(z_i) - h(z_j)) / (z_i - z_j)
              - 2 sum_i Phi'(z_i) h(z_i) w_i ),

  with the i = j difference quotient replaced by h'(z_i).  A measure is
  numerically critical when D_h vanishes for every admissible field h.
  Note the orientation: transporting the configuration along h changes
  the energy at the rate -D_h, so ascent steps follow -conj of the
  assembled gradient.
* ``finite_diff_variation`` checks the same quantity from two inner
  equilibrium solves on the original and transported contour.
* ``sproperty_residual`` probes the equality of one-sided normal
  derivatives of (potential + external field) along the support.
* ``maximize_energy`` runs gradient ascent on the spline control points
  with backtracking line search, reporting collapse ("collapse
  detected") and blow-up ("energy unbounded") of the family, the two
  ways a maximizing sequence can degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .contours import (
    BumpField,
    ContourSystem,
    FamilySpec,
    allocate_counts,
    apply_variation,
    family_project,
)
from .errors import (
    CollapseError,
    ConvergenceError,
    DegenerateConfigError,
    SingularFieldError,
    UnboundedEnergyError,
)
from .fields import ExternalField, zero_field
from .measures import DiscreteMeasure, EquilibriumResult, solve_equilibrium


def energy_variation(mu: DiscreteMeasure, field: ExternalField, h) -> float:
    """Directional derivative functional of the weighted energy.

    ``h`` must provide ``h(z)`` and ``h.deriv(z)`` (any of the variation
    field classes or an ``AnalyticVariation``).  Nodes must stay clear
    of the singular sets of both the field and ``h``.
    """
    nodes, weights = mu.nodes, mu.weights
    hv = np.asarray(h(nodes), dtype=complex)
    hp = np.asarray(h.deriv(nodes), dtype=complex)
    dphi = field.cderiv(nodes)
    live = weights > 0
    if not (
        np.all(np.isfinite(hv[live]))
        and np.all(np.isfinite(hp[live]))
        and np.all(np.isfinite(dphi[live]))
    ):
        raise SingularFieldError("singular evaluation")
    core = kernels.variation_sum(nodes, weights, hv, hp)
    return -core + 2.0 * float(np.sum((dphi * hv).real * weights, where=live))


def critical_residual(mu: DiscreteMeasure, field: ExternalField,
                      basis: Sequence) -> List[float]:
    """energy_variation of ``mu`` against every basis field.

    The measure is numerically critical for the family spanned by the
    basis when all returned magnitudes are below tolerance.
    """
    return [energy_variation(mu, field, h) for h in basis]


def finite_diff_variation(contour: ContourSystem, field: ExternalField,
                          h, t: float, n_nodes: int = 400,
                          tol: float = 1e-8) -> float:
    """(E[K^t] - E[K]) / t for the transported contour K^t = (id + t h)(K).

    Both energies come from inner equilibrium solves at the same node
    count.  As t -> 0 this converges to the transport derivative of the
    equilibrium energy, which vanishes together with energy_variation at
    a critical configuration.
    """
    base = solve_equilibrium(contour, field, n_nodes=n_nodes, tol=tol)
    moved = apply_variation(contour, h, t)
    pert = solve_equilibrium(moved, field, n_nodes=n_nodes, tol=tol)
    return (pert.energy - base.energy) / t


# ---------------------------------------------------------------------------
# S-property diagnostics


def sproperty_residual(result: EquilibriumResult,
                       contour: Optional[ContourSystem] = None,
                       field: Optional[ExternalField] = None,
                       probe_offset: Optional[float] = None,
                       trim: int = 3) -> float:
    """Max mismatch of one-sided normal derivatives of V + phi.

    Probes sit at arclength midpoints between consecutive support nodes,
    with ``trim`` pairs dropped at every end of a support run so that
    arc endpoints (where the density may blow up) are excluded.  Each
    one-sided derivative uses a second-order stencil at distances d and
    2d off the curve, d = ``probe_offset`` or three local spacings; the
    on-curve value cancels in the two-sided difference.
    """
    quad = result.quadrature
    if quad is None:
        raise ValueError("result has no quadrature attached")
    system = contour if contour is not None else quad.system
    field = field if field is not None else zero_field()
    nodes, weights = result.measure.nodes, result.measure.weights
    sup = result.support
    scale = max(1.0, float(np.max(np.abs(nodes))))

    probes, offs, normals = [], [], []
    for ki, (lo, hi) in enumerate(quad.arc_slices):
        n = hi - lo
        if n < 2:
            continue
        arc = system.arcs[ki]
        L = arc.length
        on = sup[lo:hi]
        pairs = [(a, a + 1) for a in range(n - 1) if on[a] and on[a + 1]]
        wraps = quad.closed[ki] and on[n - 1] and on[0]
        if wraps and on.all():
            pairs.append((n - 1, 0))
        elif pairs and trim > 0:
            # split into consecutive runs, trim both ends of each run
            runs, cur = [], [pairs[0]]
            for p in pairs[1:]:
                if p[0] == cur[-1][1]:
                    cur.append(p)
                else:
                    runs.append(cur)
                    cur = [p]
            runs.append(cur)
            pairs = [p for run in runs for p in run[trim:len(run) - trim]]
        for a, b in pairs:
            sa, sb = quad.arc_pos[lo + a], quad.arc_pos[lo + b]
            if b < a:
                sb += L
            s_mid = 0.5 * (sa + sb) % L
            d = probe_offset
            if d is None:
                d = 3.0 * 0.5 * (quad.spacings[lo + a] + quad.spacings[lo + b])
            local = 0.5 * (quad.spacings[lo + a] + quad.spacings[lo + b])
            for attempt in range(4):
                zeta = complex(arc.point_at_s(s_mid))
                nrm = 1j * complex(arc.tangent_at_s(s_mid))
                pts = zeta + d * nrm * np.array([1.0, 2.0, -1.0, -2.0])
                dmin = min(np.abs(nodes - p).min() for p in pts)
                if dmin > 0.5 * local or attempt == 3:
                    break
                s_mid = (s_mid + 0.3 * local) % L
            probes.append(zeta)
            offs.append(d)
            normals.append(nrm)

    if not probes:
        raise DegenerateConfigError("no interior probe points on the support")

    probes = np.asarray(probes)
    offs = np.asarray(offs)
    normals = np.asarray(normals)
    stencil = np.array([1.0, 2.0, -1.0, -2.0])
    pts = probes[:, None] + offs[:, None] * normals[:, None] * stencil[None, :]
    flat = pts.ravel()
    f = kernels.potential_batch(nodes, weights, flat) + field.value(flat)
    f = f.reshape(pts.shape)
    resid = np.abs(4.0 * f[:, 0] - f[:, 1] - 4.0 * f[:, 2] + f[:, 3]) / (2.0 * offs)
    return float(resid.max())


# ---------------------------------------------------------------------------
# outer ascent


@dataclass
class SearchOptions:
    """Knobs for maximize_energy.

    ``step`` is the initial maximum control-point displacement as a
    fraction of the configuration scale; ``tol`` bounds the bump-basis
    variation residuals at convergence.  ``diameter_cap`` and
    ``collapse_tol`` default to 10x and 0.02x the initial scale.
    """

    tol: float = 2e-3
    max_iter: int = 120
    step: float = 0.15
    n_nodes: int = 240
    inner_tol: float = 1e-8
    energy_cap: float = 50.0
    diameter_cap: Optional[float] = None
    collapse_tol: Optional[float] = None
    bump_factor: float = 0.8
    armijo: float = 0.1
    backtracks: int = 10
    record_every: int = 0


@dataclass
class SCurveResult:
    contour: ContourSystem
    equilibrium: EquilibriumResult
    s_residual: float
    variation_residuals: List[float]
    trace: List[Tuple[int, float]]
    converged: bool = True
    message: str = ""
    snapshots: List[ContourSystem] = dc_field(default_factory=list)

    def summary_dict(self) -> dict:
        return {
            "energy": float(self.equilibrium.energy),
            "constant_w": float(self.equilibrium.constant_w),
            "s_residual": float(self.s_residual),
            "max_variation_residual": float(
                max(self.variation_residuals, default=0.0)
            ),
            "iterations": int(self.trace[-1][0]) if self.trace else 0,
            "converged": bool(self.converged),
            "message": self.message,
        }

    def trace_csv(self) -> str:
        lines = ["iteration,energy"]
        lines += [f"{it},{en:.17g}" for it, en in self.trace]
        return "\n".join(lines) + "\n"


def _node_forces(res: EquilibriumResult, field: ExternalField) -> np.ndarray:
    """Complex per-node coefficients g_i with D_h = Re sum g_i h(z_i) + diag."""
    nodes, w = res.measure.nodes, res.measure.weights
    C = kernels.node_cauchy(nodes, w)
    return 2.0 * w * (C - field.cderiv(nodes))


def _normalize_end(arc, e: int) -> int:
    return e if e >= 0 else arc.control.size + e


def _collect_dofs(system: ContourSystem, family: FamilySpec):
    """Group control points into independently movable degrees of freedom."""
    pinned = {(ki, ci) for ki, ci, _ in family.pinned}
    dofs: List[List[Tuple[int, int]]] = []
    tied = set()
    for group in family.junctions:
        members = [(ki, _normalize_end(system.arcs[ki], ei)) for ki, ei in group]
        members = [m for m in members if m not in pinned]
        if members:
            dofs.append(members)
            tied.update(members)
    for ki, arc in enumerate(system.arcs):
        for ci in range(arc.control.size):
            if (ki, ci) in pinned or (ki, ci) in tied:
                continue
            dofs.append([(ki, ci)])
    return dofs


def _control_gradient(res: EquilibriumResult, field: ExternalField,
                      system: ContourSystem, dofs) -> np.ndarray:
    """Per-DOF complex gradients G with dE/dt = -Re(G conj(-G)) = |G|^2
    along the ascent step delta = -conj(G)."""
    quad = res.quadrature
    g = _node_forces(res, field)
    basis = {}
    for ki, (lo, hi) in enumerate(quad.arc_slices):
        if hi - lo < 1 or ki in quad.collapsed:
            continue
        params = system.arcs[ki].param_at_s(quad.arc_pos[lo:hi])
        basis[ki] = (lo, system.arcs[ki].basis_matrix(params))
    G = np.zeros(len(dofs), dtype=complex)
    for di, dof in enumerate(dofs):
        for ki, ci in dof:
            if ki not in basis:
                continue
            lo, B = basis[ki]
            G[di] += np.sum(g[lo:lo + B.shape[0]] * B[:, ci])
    return G


def _junction_gradient(system: ContourSystem, field: ExternalField,
                       dof, inner, eps: float) -> complex:
    """Central-difference energy gradient for a tied endpoint group.

    Moving a junction shortens some arcs and extends others, a set
    change the fixed-knot spline response does not represent, so the
    derivative comes from four extra inner solves instead.
    """
    grads = []
    for direc in (1.0, 1j):
        pair = []
        for sgn in (1.0, -1.0):
            controls = [arc.control.copy() for arc in system.arcs]
            for ki, ci in dof:
                controls[ki][ci] += sgn * eps * direc
            arcs = [a.moved(c) for a, c in zip(system.arcs, controls)]
            cand = ContourSystem(arcs, anchors=system.anchors.copy())
            pair.append(inner(cand).energy)
        grads.append((pair[0] - pair[1]) / (2.0 * eps))
    return complex(-grads[0], grads[1])


def variation_basis(system: ContourSystem, family: FamilySpec,
                    field: ExternalField, factor: float = 0.8):
    """Admissible bump fields centered at the free control points.

    The bump radius stays ``factor`` times short of the nearest anchor
    or field singularity, so every element vanishes where admissibility
    requires.  Coincident centers (junctions) are merged.
    """
    keep_away = list(family.anchors) + list(field.singular_points())
    scale = max(1.0, system.diameter())
    pinned = {(ki, ci) for ki, ci, _ in family.pinned}
    centers = []
    for ki, arc in enumerate(system.arcs):
        for ci in range(arc.control.size):
            if (ki, ci) in pinned:
                continue
            c = complex(arc.control[ci])
            if all(abs(c - o) > 1e-9 * scale for o in centers):
                centers.append(c)
    fields = []
    for c in centers:
        r = factor * min(
            (abs(c - complex(a)) for a in keep_away), default=0.5 * scale
        )
        if r > 1e-8 * scale:
            fields.append(BumpField(c, r))
    return fields


def _bump_residuals(res: EquilibriumResult, field: ExternalField,
                    bumps) -> np.ndarray:
    """Worst-direction |D_h| per bump center, maximized over unit directions."""
    nodes, w = res.measure.nodes, res.measure.weights
    g = _node_forces(res, field)
    out = np.empty(len(bumps))
    for k, b in enumerate(bumps):
        psi = b(nodes)
        hz, _ = b.wirtinger(nodes)
        out[k] = abs(np.sum(g * psi) + np.sum(w * w * hz))
    return out


def _move_controls(system: ContourSystem, dofs, delta, t: float) -> ContourSystem:
    controls = [arc.control.copy() for arc in system.arcs]
    for dof, d in zip(dofs, delta):
        for ki, ci in dof:
            controls[ki][ci] += t * d
    arcs = [arc.moved(c) for arc, c in zip(system.arcs, controls)]
    return ContourSystem(arcs, anchors=system.anchors.copy())


def _project_normal(system: ContourSystem, dofs, delta: np.ndarray) -> np.ndarray:
    """Keep only the normal component of single-point steps.

    Tangential control motion reparametrizes the curve without moving
    the set, so it cannot raise the energy but steadily bunches control
    points; dropping it stabilizes the ascent.  Junction groups keep
    their full displacement.
    """
    out = delta.copy()
    for di, dof in enumerate(dofs):
        if len(dof) != 1:
            continue
        ki, ci = dof[0]
        arc = system.arcs[ki]
        s_c = arc.arclength_at_param(arc.spline.x[ci])
        nrm = 1j * complex(arc.tangent_at_s(s_c))
        out[di] = nrm * float(np.real(np.conj(nrm) * delta[di]))
    return out


def _redistribute(system: ContourSystem, family: FamilySpec) -> ContourSystem:
    """Respace control points uniformly by arclength.

    Endpoints of open arcs stay put exactly; arcs with interior pins are
    left alone.  This is a reparametrization, so it moves the curve only
    at second order, and it keeps the control polygon well conditioned
    across ascent steps.
    """
    pinned_by_arc = {}
    for ki, ci, _ in family.pinned:
        pinned_by_arc.setdefault(ki, set()).add(ci)
    arcs = []
    for ki, arc in enumerate(system.arcs):
        m = arc.control.size
        pins = pinned_by_arc.get(ki, set())
        if m < 4:
            arcs.append(arc)
        elif arc.closed:
            if pins:
                arcs.append(arc)
            else:
                s = arc.length * np.arange(m) / m
                arcs.append(arc.moved(arc.point_at_s(s)))
        else:
            if any(0 < ci < m - 1 for ci in pins):
                arcs.append(arc)
            else:
                ctrl = arc.point_at_s(np.linspace(0.0, arc.length, m))
                ctrl[0] = arc.control[0]
                ctrl[-1] = arc.control[-1]
                arcs.append(arc.moved(ctrl))
    return ContourSystem(arcs, anchors=system.anchors.copy())


def maximize_energy(family: FamilySpec, field: ExternalField,
                    opts: Optional[SearchOptions] = None) -> SCurveResult:
    """Gradient ascent of the equilibrium energy over the family.

    Each outer iteration assembles the exact directional derivatives of
    the inner equilibrium energy with respect to the spline control
    points, takes the steepest admissible step, and backtracks on the
    re-solved energy until the Armijo test passes.  Projection onto the
    family constraints keeps anchors pinned and junctions tied.  The
    search stops when every bump-basis variation residual falls below
    ``opts.tol``.

    Raises CollapseError("collapse detected") when a component shrinks
    below ``collapse_tol`` and UnboundedEnergyError("energy unbounded")
    when the energy climbs past ``energy_cap`` or keeps climbing after
    the configuration outgrows ``diameter_cap``; both carry the partial
    result.
    """
    if family.template is None:
        raise ValueError("family has no template contour")
    opts = opts if opts is not None else SearchOptions()
    system = family_project(family.template, family)
    anchor_scale = (
        float(np.max(np.abs(family.anchors))) if family.anchors.size else 0.0
    )
    scale0 = max(system.diameter(), anchor_scale, 1e-9)
    diameter_cap = opts.diameter_cap if opts.diameter_cap else 10.0 * scale0
    collapse_tol = opts.collapse_tol if opts.collapse_tol else 0.02 * scale0

    counts_lock = {"counts": allocate_counts(system, opts.n_nodes)}

    def inner(sysm):
        return solve_equilibrium(
            sysm, field, n_nodes=opts.n_nodes, tol=opts.inner_tol,
            counts=counts_lock["counts"],
        )

    def partial(sysm, eq, trace, resids, msg):
        return SCurveResult(
            contour=sysm, equilibrium=eq, s_residual=float("nan"),
            variation_residuals=list(resids), trace=trace,
            converged=False, message=msg,
        )

    res = inner(system)
    trace: List[Tuple[int, float]] = [(0, res.energy)]
    snapshots: List[ContourSystem] = []
    step_cap = opts.step * scale0
    floor = 1e-6 * scale0
    step_junc = step_cap
    step_ctrl = step_cap
    converged = False
    relocks = 4
    message = ""
    solve_errors = (ConvergenceError, DegenerateConfigError, SingularFieldError)
    bumps = variation_basis(system, family, field, factor=opts.bump_factor)
    resids = _bump_residuals(res, field, bumps)

    for it in range(1, opts.max_iter + 1):
        if resids.size == 0 or resids.max() <= opts.tol:
            converged = True
            break
        dofs = _collect_dofs(system, family)
        moved = False

        # tied endpoint groups first, each with its own 1D ascent: their
        # steps live on a different scale than single control points
        for dof in (d for d in dofs if len(d) > 1):
            try:
                Gj = _junction_gradient(system, field, dof, inner, 1e-3 * scale0)
            except solve_errors:
                continue
            gmag = abs(Gj)
            if gmag < 1e-14:
                continue
            u = -np.conj(Gj) / gmag
            s = step_junc
            while s > floor:
                try:
                    cand = family_project(
                        _move_controls(system, [dof], [u], s), family
                    )
                    cres = inner(cand)
                except solve_errors:
                    s *= 0.5
                    continue
                if cres.energy >= res.energy + opts.armijo * s * gmag:
                    system, res = cand, cres
                    moved = True
                    step_junc = min(max(2.0 * s, 1e-4 * scale0), step_cap)
                    break
                s *= 0.5

        # interior control points: cardinal-basis gradient, normal motion
        single = [d for d in dofs if len(d) == 1]
        if single:
            G = _control_gradient(res, field, system, single)
            delta = _project_normal(system, single, -np.conj(G))
            slope = float(np.sum(-np.real(G * delta)))
            if slope <= 0.0:
                delta = -np.conj(G)
                slope = float(np.sum(np.abs(G) ** 2))
            dmax = float(np.abs(delta).max(initial=0.0))
            if dmax > 0.0 and slope > 0.0:
                t = step_ctrl / dmax
                while t * dmax > floor:
                    try:
                        cand = family_project(
                            _redistribute(
                                _move_controls(system, single, delta, t), family
                            ),
                            family,
                        )
                        cres = inner(cand)
                    except solve_errors:
                        t *= 0.5
                        continue
                    if cres.energy >= res.energy + opts.armijo * t * slope:
                        system, res = cand, cres
                        moved = True
                        step_ctrl = min(
                            max(1.5 * t * dmax, 1e-4 * scale0), step_cap
                        )
                        break
                    t *= 0.5

        if not moved:
            # the locked node allocation biases the discrete landscape
            # once the geometry has drifted; re-lock it and try again
            fresh = allocate_counts(system, opts.n_nodes)
            if relocks > 0 and not np.array_equal(fresh, counts_lock["counts"]):
                counts_lock["counts"] = fresh
                relocks -= 1
                res = inner(system)
                bumps = variation_basis(system, family, field,
                                        factor=opts.bump_factor)
                resids = _bump_residuals(res, field, bumps)
                continue
            message = "line search stalled"
            break
        if res.energy > trace[-1][1]:
            trace.append((it, res.energy))
        if opts.record_every and it % opts.record_every == 0:
            snapshots.append(system)

        bumps = variation_basis(system, family, field, factor=opts.bump_factor)
        resids = _bump_residuals(res, field, bumps)

        comp_d = system.component_diameters()
        if comp_d and min(comp_d) < collapse_tol:
            raise CollapseError(
                "collapse detected",
                result=partial(system, res, trace, resids, "collapse detected"),
            )
        if res.energy > opts.energy_cap:
            raise UnboundedEnergyError(
                "energy unbounded",
                result=partial(system, res, trace, resids, "energy unbounded"),
            )
        if system.diameter() > diameter_cap:
            grew = len(trace) >= 4 and trace[-1][1] > trace[-4][1]
            if grew:
                raise UnboundedEnergyError(
                    "energy unbounded",
                    result=partial(system, res, trace, resids, "energy unbounded"),
                )
            message = "diameter cap reached"
            break

    if resids.size and resids.max() <= opts.tol:
        converged = True
    s_res = sproperty_residual(res, system, field)
    return SCurveResult(
        contour=system,
        equilibrium=res,
        s_residual=s_res,
        variation_residuals=list(resids),
        trace=trace,
        converged=converged,
        message=message,
        snapshots=snapshots,
    )
