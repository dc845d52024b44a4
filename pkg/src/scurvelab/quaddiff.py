"""Quadratic differentials attached to critical measures.

For a critical measure mu in an external field with analytic completion
Phi, the function

    R(z) = (C_mu(z) + Phi'(z))^2

extends holomorphically across the support; the support itself lies on
critical trajectories of the differential -R(z) dz^2, and the measure's
density is |sqrt(R)| / pi along them.  This module evaluates R either
straight from a discrete measure or as a fitted rational function V/A
(or V/A^2 for logarithmic fields), traces trajectories of -R dz^2 with
branch tracking, computes periods of sqrt(R), and solves the Chebotarev
problem (the minimal-capacity continuum through a finite anchor set) by
Newton iteration on the zeros of V.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import kernels
from .contours import Arc, ContourSystem
from .errors import ConvergenceError, DegenerateConfigError
from .fields import ExternalField, zero_field
from .measures import DiscreteMeasure, solve_equilibrium


@dataclass
class QuadDiff:
    """Evaluator for R(z), either measure-backed or rational.

    ``FromMeasure`` evaluates (C_mu + Phi')^2 by direct summation, with
    a one-sided Richardson step for points within a few cells of the
    support where the raw sum sees the principal value instead of the
    boundary limit.  ``Rational`` evaluates V(z) / A(z)^denom_power with
    ``numerator`` holding ascending coefficients of V and ``anchors``
    the zeros of A.
    """

    kind: str
    mu: Optional[DiscreteMeasure] = None
    field: Optional[ExternalField] = None
    numerator: Optional[np.ndarray] = None
    anchors: Optional[np.ndarray] = None
    denom_power: int = 1
    fit_residual: float = 0.0
    _local: Optional[np.ndarray] = dc_field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("FromMeasure", "Rational"):
            raise ValueError("kind must be FromMeasure or Rational")
        if self.kind == "FromMeasure":
            if self.mu is None:
                raise ValueError("FromMeasure needs a measure")
            if self.field is None:
                self.field = zero_field()
            if self.mu.nodes.size >= 2:
                from scipy.spatial import cKDTree

                xy = np.column_stack([self.mu.nodes.real, self.mu.nodes.imag])
                d, _ = cKDTree(xy).query(xy, k=2)
                self._local = d[:, 1]
        else:
            self.numerator = np.asarray(self.numerator, dtype=complex).ravel()
            self.anchors = np.asarray(self.anchors, dtype=complex).ravel()

    # evaluation ---------------------------------------------------------

    def _raw_measure(self, z: np.ndarray) -> np.ndarray:
        c = kernels.cauchy_batch(self.mu.nodes, self.mu.weights, z)
        return (c + self.field.cderiv(z)) ** 2

    def raw(self, z):
        """Direct evaluation without near-support handling."""
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.kind == "Rational":
            num = npoly.polyval(z_arr, self.numerator)
            den = np.ones_like(z_arr)
            for a in self.anchors:
                den = den * (z_arr - a)
            out = num / den**self.denom_power
        else:
            out = self._raw_measure(z_arr)
        return out if np.ndim(z) else complex(out[0])

    def __call__(self, z):
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        out = self.raw(z_arr).copy()
        if self.kind == "FromMeasure" and self._local is not None:
            from scipy.spatial import cKDTree

            nodes = self.mu.nodes
            xy = np.column_stack([nodes.real, nodes.imag])
            tree = cKDTree(xy)
            pq = np.column_stack([z_arr.real, z_arr.imag])
            d, idx = tree.query(pq, k=2)
            near = d[:, 0] < 2.5 * self._local[idx[:, 0]]
            for k in np.where(near)[0]:
                i0, i1 = idx[k]
                tang = nodes[i1] - nodes[i0]
                if tang == 0:
                    continue
                nrm = 1j * tang / abs(tang)
                side = np.real(np.conj(nrm) * (z_arr[k] - nodes[i0]))
                if side < 0:
                    nrm = -nrm
                delta = 3.0 * self._local[i0]
                r1, r2 = self._raw_measure(
                    np.array([z_arr[k] + delta * nrm, z_arr[k] + 2 * delta * nrm])
                )
                out[k] = 2.0 * r1 - r2
        return out if np.ndim(z) else complex(out[0])

    def zeros(self) -> np.ndarray:
        if self.kind != "Rational":
            raise ValueError("zeros available for rational form only")
        if self.numerator.size < 2:
            return np.array([], dtype=complex)
        return npoly.polyroots(self.numerator)

    def poles(self) -> np.ndarray:
        if self.kind != "Rational":
            raise ValueError("poles available for rational form only")
        return self.anchors.copy()

    def to_dict(self) -> dict:
        if self.kind == "Rational":
            return {
                "kind": self.kind,
                "numerator": [[c.real, c.imag] for c in self.numerator],
                "anchors": [[a.real, a.imag] for a in self.anchors],
                "denom_power": self.denom_power,
                "fit_residual": self.fit_residual,
            }
        return {"kind": self.kind, "n_nodes": int(self.mu.nodes.size)}


def build_R(mu: DiscreteMeasure, field: Optional[ExternalField] = None) -> QuadDiff:
    """Measure-backed evaluator for (C_mu + Phi')^2."""
    return QuadDiff(kind="FromMeasure", mu=mu, field=field)


def rational_R(numerator, anchors, denom_power: int = 1) -> QuadDiff:
    """Rational evaluator V(z)/A(z)^denom_power with A = prod(z - a_k)."""
    return QuadDiff(
        kind="Rational", numerator=numerator, anchors=anchors,
        denom_power=denom_power,
    )


# ---------------------------------------------------------------------------
# holomorphy diagnostics


def holomorphy_residual(R: QuadDiff, contour: ContourSystem,
                        offset: float) -> float:
    """Max relative jump of R across the contour at probe distance ``offset``.

    Probes sample each arc in arclength, excluding the neighborhoods of
    open-arc endpoints.  At each probe the one-sided values at distances
    offset and 2*offset enter the extrapolated jump

        |2 (R(+d) - R(-d)) - (R(+2d) - R(-2d))| / (1 + |R(+d)|),

    which cancels the O(d R') drift of an analytic R and retains any
    genuine discontinuity.  Continuity of R across the support is the
    analytic form of the S-property, so a small residual certifies it.
    """
    worst = 0.0
    for arc in contour.arcs:
        L = arc.length
        lo = 0.0 if arc.closed else min(0.45 * L, max(2.0 * offset, 0.05 * L))
        m = int(np.clip(L / max(offset, 1e-12), 8, 200))
        s = np.linspace(lo, L - lo, m)
        zeta = arc.point_at_s(s)
        nrm = 1j * arc.tangent_at_s(s)
        p1 = R.raw(zeta + offset * nrm)
        m1 = R.raw(zeta - offset * nrm)
        p2 = R.raw(zeta + 2.0 * offset * nrm)
        m2 = R.raw(zeta - 2.0 * offset * nrm)
        jump = 2.0 * (p1 - m1) - (p2 - m2)
        resid = np.abs(jump) / (1.0 + np.abs(p1))
        worst = max(worst, float(np.max(resid)))
    return worst


# ---------------------------------------------------------------------------
# rational fitting


def fit_rational_R(R: QuadDiff, field: ExternalField, anchors,
                   threshold: float = 1e-2) -> QuadDiff:
    """Least-squares rational form of a measure-backed R.

    For a zero field, R A is fitted by a polynomial of degree p - 2
    (simple poles at the anchors); for a logarithmic field, R A^2 by
    degree 2p - 2 (double poles).  Sampling happens on two circles
    comfortably outside the anchor set; the recorded ``fit_residual`` is
    the max relative error there.  A residual above ``threshold`` means
    R is not rational of the expected degree.
    """
    anchors = np.asarray(anchors, dtype=complex).ravel()
    p = anchors.size
    if field.kind == "zero":
        power, degree = 1, p - 2
    elif field.kind == "log_charges":
        power, degree = 2, 2 * p - 2
    else:
        raise ValueError("rational form needs a zero or logarithmic field")
    degree = max(degree, 0)

    center = anchors.mean()
    spread = max(float(np.max(np.abs(anchors - center))), 1e-3)
    if R.kind == "FromMeasure":
        spread = max(
            spread, float(np.max(np.abs(R.mu.nodes - center)))
        )
    theta = np.linspace(0.0, 2 * np.pi, 128, endpoint=False)
    ring = np.exp(1j * theta)
    z = np.concatenate([center + 1.8 * spread * ring,
                        center + 2.5 * spread * ring])
    den = np.ones_like(z)
    for a in anchors:
        den = den * (z - a)
    y = R.raw(z) * den**power

    # scaled Vandermonde for conditioning
    r0 = 2.5 * spread
    cols = np.stack([((z - center) / r0) ** k for k in range(degree + 1)],
                    axis=1)
    coef_scaled, *_ = np.linalg.lstsq(cols, y, rcond=None)
    resid = float(np.max(np.abs(cols @ coef_scaled - y) / (1.0 + np.abs(y))))
    # shift back to coefficients in z
    shifted = np.zeros(degree + 1, dtype=complex)
    basis = np.array([1.0 + 0j])
    for k in range(degree + 1):
        shifted[: k + 1] += coef_scaled[k] * basis / r0**k
        basis = npoly.polymul(basis, np.array([-center, 1.0]))[: degree + 1]
    if resid > threshold:
        raise ConvergenceError(
            f"R not rational of expected degree (fit residual {resid:.2e})"
        )
    return QuadDiff(
        kind="Rational", numerator=shifted, anchors=anchors,
        denom_power=power, fit_residual=resid,
    )


# ---------------------------------------------------------------------------
# trajectories and periods


@dataclass
class Trajectory:
    points: np.ndarray
    kind: str
    start: complex
    terminated_reason: str

    @property
    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.points))))

    def to_csv(self) -> str:
        lines = ["re,im"]
        lines += [f"{z.real:.17g},{z.imag:.17g}" for z in self.points]
        return "\n".join(lines) + "\n"


def _track(value: complex, ref: complex) -> complex:
    """Square root of ``value`` on the branch nearest to ``ref``."""
    s = np.sqrt(value)
    return -s if abs(s + ref) < abs(s - ref) else s


_GL3_X = np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
_GL3_W = np.array([5.0, 8.0, 5.0]) / 9.0


def trace_trajectory(R: QuadDiff, z0: complex, sign: int = 1,
                     max_len: float = 10.0, step: Optional[float] = None,
                     closure_tol: float = 1e-3) -> Trajectory:
    """Unit-speed integration of the direction field of -R dz^2.

    Follows dz/ds = i / sqrt(R) with the square-root branch continued
    step by step (nearest argument) and the step size capped so that
    arg R turns by at most pi/4 per step.  After every step the real
    part of the accumulated integral of sqrt(R) dz, which vanishes along
    exact trajectories, is pulled back to zero by a first-order
    correction.  Stops at ``max_len``, on approaching a zero or pole of
    R, or when the path closes onto its start.
    """
    z0 = complex(z0)
    r0 = complex(R(z0))
    if not np.isfinite(r0) or r0 == 0:
        raise ValueError("trajectory start lies at a zero or pole of R")
    rmag0 = abs(r0)
    scale = max(1.0, abs(z0))
    sq = sign * np.sqrt(r0)
    u0 = 1j / sq
    u0 /= abs(u0)
    h0 = step if step is not None else max_len / 2000.0
    h = h0

    pts = [z0]
    z = z0
    s_len = 0.0
    itg = 0.0 + 0.0j
    reason = "max_length"
    kind = "generic"
    u_prev = u0
    for _ in range(200000):
        if s_len >= max_len:
            break
        rz = complex(R(z))
        if not np.isfinite(rz) or abs(rz) <= 1e-12 * rmag0 or abs(rz) >= 1e12 * rmag0:
            reason = "critical_point"
            kind = "critical"
            break
        sq = _track(rz, sq)
        u1 = 1j / sq
        u1 /= abs(u1)
        # midpoint step with turn-angle control
        accepted = False
        for _ in range(40):
            zm = z + 0.5 * h * u1
            rm = complex(R(zm))
            if not np.isfinite(rm) or rm == 0:
                h *= 0.5
                continue
            sqm = _track(rm, sq)
            um = 1j / sqm
            um /= abs(um)
            z_new = z + h * um
            rn = complex(R(z_new))
            if not np.isfinite(rn):
                h *= 0.5
                continue
            if abs(rn) > 1e-12 * rmag0:
                turn = abs(np.angle(rn / rz))
                if turn > np.pi / 4 and h > 1e-14 * scale:
                    h *= 0.5
                    continue
            accepted = True
            break
        if not accepted or h <= 1e-14 * scale:
            reason = "critical_point"
            kind = "critical"
            break
        # accumulate integral of sqrt(R) dz over the segment, then cancel
        # the drift of its real part
        dz = z_new - z
        seg = 0.0 + 0.0j
        sq_g = sq
        for x, wgl in zip(_GL3_X, _GL3_W):
            zg = z + (0.5 + 0.5 * x) * dz
            rg = complex(R(zg))
            if np.isfinite(rg) and rg != 0:
                sq_g = _track(rg, sq_g)
                seg += 0.5 * wgl * sq_g * dz
        itg += seg
        drift = itg.real
        rn = complex(R(z_new))
        if np.isfinite(rn) and abs(rn) > 1e-12 * rmag0:
            sq_n = _track(rn, sq_g)
            corr = -drift / sq_n
            if abs(corr) < 0.5 * h:
                z_new = z_new + corr
                itg -= drift
        s_len += abs(z_new - z)
        pts.append(z_new)
        u_prev = (z_new - z) / abs(z_new - z)
        # closure: distance from the start to the segment just laid down
        if s_len > 6.0 * h0:
            t_proj = np.clip(
                np.real(np.conj(z_new - z) * (z0 - z)) / abs(z_new - z) ** 2,
                0.0, 1.0,
            )
            gap = abs(z0 - (z + t_proj * (z_new - z)))
            if gap < closure_tol * scale and np.real(np.conj(u_prev) * u0) > 0.8:
                pts.append(z0)
                z = z_new
                reason = "closed"
                kind = "closed"
                break
        z = z_new
        sq = sq_g
        h = min(2.0 * h, h0)
    return Trajectory(
        points=np.asarray(pts), kind=kind, start=z0, terminated_reason=reason
    )


def _integrate_sqrt(R: QuadDiff, a: complex, b: complex, sq_ref: complex,
                    depth: int = 0):
    """Integral of sqrt(R) dz along the straight segment [a, b] with
    branch continuation from ``sq_ref``; splits until the argument of R
    turns by less than pi/4 between consecutive evaluation points."""
    za = 0.5 * (a + b) - 0.5 * (b - a) * np.sqrt(0.6)
    ra = complex(R.raw(a) if hasattr(R, "raw") else R(a))
    rm = complex(R(0.5 * (a + b)))
    rb = complex(R(b))
    bad = (
        not (np.isfinite(ra) and np.isfinite(rm) and np.isfinite(rb))
        or ra == 0 or rm == 0 or rb == 0
        or abs(np.angle(rm / ra)) > np.pi / 4
        or abs(np.angle(rb / rm)) > np.pi / 4
    )
    if bad:
        if depth >= 30:
            raise ValueError(
                "branch tracking failed: path too coarse near a zero or pole"
            )
        mid = 0.5 * (a + b)
        left, sq_ref = _integrate_sqrt(R, a, mid, sq_ref, depth + 1)
        right, sq_ref = _integrate_sqrt(R, mid, b, sq_ref, depth + 1)
        return left + right, sq_ref
    total = 0.0 + 0.0j
    sq = sq_ref
    for x, wgl in zip(_GL3_X, _GL3_W):
        zg = 0.5 * (a + b) + 0.5 * (b - a) * x
        sq = _track(complex(R(zg)), sq)
        total += 0.5 * wgl * sq * (b - a)
    sq = _track(rb, sq)
    return total, sq


def period(R: QuadDiff, path) -> complex:
    """Contour integral of sqrt(R) dz along a polyline path.

    The square root is continued along the whole path by nearest
    argument, starting from the principal branch at the first vertex;
    segments subdivide automatically near zeros of R.
    """
    path = np.asarray(path, dtype=complex).ravel()
    if path.size < 2:
        raise ValueError("path needs at least two vertices")
    r0 = complex(R(path[0]))
    if not np.isfinite(r0) or r0 == 0:
        raise ValueError("path starts at a zero or pole of R")
    sq = np.sqrt(r0)
    total = 0.0 + 0.0j
    for a, b in zip(path[:-1], path[1:]):
        if a == b:
            continue
        seg, sq = _integrate_sqrt(R, a, b, sq)
        total += seg
    return complex(total)


# ---------------------------------------------------------------------------
# Chebotarev continua


@lru_cache(maxsize=32)
def _jacobi_rule(n: int, alpha: float, beta: float):
    from scipy.special import roots_jacobi

    x, w = roots_jacobi(n, alpha, beta)
    return x, w


def _sqrt_chain(vals: np.ndarray) -> np.ndarray:
    out = np.empty_like(vals)
    ref = np.sqrt(vals[0])
    for i, v in enumerate(vals):
        ref = _track(complex(v), ref)
        out[i] = ref
    return out


def _anchor_integral(vcoef: np.ndarray, anchors: np.ndarray, a: complex,
                     v: complex, n: int = 80) -> complex:
    """integral from anchor a to junction v of sqrt(V/A) dz on the chord.

    The integrand has an inverse square-root singularity at a and a
    square-root zero at v; both are absorbed into a Gauss-Jacobi rule,
    leaving the analytic factor to be sampled.
    """
    x, w = _jacobi_rule(n, 0.5, -0.5)
    t = 0.5 * (x + 1.0)
    z = a + (v - a) * t
    others = anchors[np.abs(anchors - a) > 1e-14 * (1 + abs(a))]
    num = npoly.polyval(z, vcoef)
    den = np.ones_like(z)
    for b in others:
        den = den * (z - b)
    g2 = num / den
    g = _sqrt_chain(g2)
    phi = g / np.sqrt(np.maximum(1.0 - t, 1e-300))
    core = 0.5 * np.sum(w * phi)
    return np.sqrt(complex(v - a)) * complex(core)


def _bridge_integral(vcoef: np.ndarray, anchors: np.ndarray, v1: complex,
                     v2: complex, n: int = 80) -> complex:
    """integral between two junctions, square-root zeros at both ends."""
    x, w = _jacobi_rule(n, 0.5, 0.5)
    t = 0.5 * (x + 1.0)
    z = v1 + (v2 - v1) * t
    num = npoly.polyval(z, vcoef)
    den = np.ones_like(z)
    for b in anchors:
        den = den * (z - b)
    g2 = num / den
    g = _sqrt_chain(g2)
    phi = g / np.sqrt(np.maximum(t * (1.0 - t), 1e-300))
    core = 0.25 * np.sum(w * phi)
    return complex(v2 - v1) * complex(core)


def _newton_lsq(fun, x0: np.ndarray, tol: float = 1e-11,
                max_iter: int = 60) -> Tuple[np.ndarray, float]:
    x = x0.astype(float).copy()
    f = fun(x)
    best = float(np.max(np.abs(f)))
    for _ in range(max_iter):
        if best <= tol:
            break
        m, n = f.size, x.size
        J = np.empty((m, n))
        eps = 1e-7 * (1.0 + np.abs(x))
        for j in range(n):
            xp = x.copy()
            xp[j] += eps[j]
            J[:, j] = (fun(xp) - f) / eps[j]
        try:
            dx = np.linalg.lstsq(J, -f, rcond=None)[0]
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        improved = False
        for _ in range(12):
            xn = x + lam * dx
            fn = fun(xn)
            r = float(np.max(np.abs(fn)))
            if r < best:
                x, f, best = xn, fn, r
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
    return x, best


def _critical_directions(R: QuadDiff, v: complex, order: int,
                         scale: float) -> np.ndarray:
    """Angles of the order+2 critical rays of -R dz^2 at a zero of R.

    Near a zero of order n, R ~ c (z - v)^n and the trajectory rays solve
    arg(c) + (n + 2) theta = pi (mod 2 pi)."""
    h = 1e-3 * scale
    samples = []
    for phi in (0.1, 1.7, 3.9):
        zp = v + h * np.exp(1j * phi)
        samples.append(complex(R(zp)) / (h * np.exp(1j * phi)) ** order)
    c = np.mean(samples)
    k = np.arange(order + 2)
    return (np.pi - np.angle(c) + 2 * np.pi * k) / (order + 2)


def _trace_leg(R: QuadDiff, start: complex, target: complex,
               scale: float, order: int = 1, n_ctrl: int = 12,
               avoid: Sequence[complex] = ()) -> Arc:
    """Critical trajectory from a junction toward an anchor (or a second
    junction), returned as a spline arc with snapped endpoints.

    The launch direction is the critical ray at the junction closest to
    the chord; starting on the ray keeps the trace on the correct sector
    of the trajectory structure.  A trace that brushes one of the
    ``avoid`` points (other junctions) has slipped into a wrong sector
    and is rejected."""
    thetas = _critical_directions(R, start, order, scale)
    chord = np.angle(target - start)
    gaps = np.abs(np.angle(np.exp(1j * (thetas - chord))))
    theta = thetas[int(np.argmin(gaps))]
    ray = np.exp(1j * theta)
    eps = 1e-5 * scale
    z_init = start + eps * ray
    r_init = complex(R(z_init))
    sq = np.sqrt(r_init)
    u = 1j / sq
    u /= abs(u)
    sgn = 1 if np.real(np.conj(ray) * u) >= 0 else -1
    traj = trace_trajectory(
        R, z_init, sign=sgn, max_len=6.0 * scale,
        step=min(0.01 * scale, abs(target - start) / 50.0),
    )
    pts = traj.points
    if abs(pts[-1] - target) > 0.05 * scale:
        raise ConvergenceError("trajectory leg failed to reach its endpoint")
    for az in avoid:
        if np.min(np.abs(pts - az)) < 0.02 * scale:
            raise ConvergenceError("trajectory leg crosses another junction")
    s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(pts)))])
    grid = np.linspace(0.0, s[-1], n_ctrl)
    ctrl = np.interp(grid, s, pts.real) + 1j * np.interp(grid, s, pts.imag)
    ctrl[0] = start
    ctrl[-1] = target
    return Arc(ctrl)


def _half_trace(R: QuadDiff, s: complex, t: complex, scale: float,
                order: int) -> np.ndarray:
    thetas = _critical_directions(R, s, order, scale)
    chord = np.angle(t - s)
    theta = thetas[int(np.argmin(np.abs(np.angle(np.exp(1j * (thetas - chord))))))]
    ray = np.exp(1j * theta)
    z_init = s + 1e-5 * scale * ray
    sq = np.sqrt(complex(R(z_init)))
    u = 1j / sq
    u /= abs(u)
    sgn = 1 if np.real(np.conj(ray) * u) >= 0 else -1
    traj = trace_trajectory(R, z_init, sign=sgn, max_len=1.5 * abs(t - s),
                            step=abs(t - s) / 60.0)
    return traj.points


def _trace_bridge(R: QuadDiff, v1: complex, v2: complex, scale: float,
                  n_ctrl: int = 12) -> Arc:
    """Trajectory connecting two zeros of R.

    A zero-to-zero trajectory is a saddle connection, so one-sided
    shooting drifts past the far end; tracing half way from each end and
    joining at the closest approach stays on the connection."""
    A = _half_trace(R, v1, v2, scale, 1)
    B = _half_trace(R, v2, v1, scale, 1)
    D = np.abs(A[:, None] - B[None, :])
    i, j = np.unravel_index(int(np.argmin(D)), D.shape)
    if D[i, j] > 0.03 * scale:
        raise ConvergenceError("bridge trajectory halves failed to meet")
    pts = np.concatenate([A[: i + 1], B[: j + 1][::-1]])
    pts[0] = v1
    pts[-1] = v2
    s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(pts)))])
    grid = np.linspace(0.0, s[-1], n_ctrl)
    ctrl = np.interp(grid, s, pts.real) + 1j * np.interp(grid, s, pts.imag)
    ctrl[0] = v1
    ctrl[-1] = v2
    return Arc(ctrl)


def _assemble_tree(vcoef: np.ndarray, anchors: np.ndarray,
                   legs: Sequence[Tuple[complex, complex]]) -> ContourSystem:
    R = rational_R(vcoef, anchors, denom_power=1)
    scale = max(1.0, float(np.max(np.abs(anchors))))
    zr = npoly.polyroots(np.asarray(vcoef, dtype=complex)) if len(vcoef) > 1 else []

    def zero_order(z: complex) -> int:
        if not len(zr):
            return 0
        return int(np.sum(np.abs(np.asarray(zr) - z) < 1e-6 * scale))

    arcs = []
    for s, t in legs:
        if zero_order(t) > 0:
            arcs.append(_trace_bridge(R, s, t, scale))
        else:
            avoid = [z for z in np.atleast_1d(zr)
                     if abs(z - s) >= 1e-6 * scale]
            arcs.append(
                _trace_leg(R, s, t, scale, order=max(zero_order(s), 1),
                           avoid=avoid)
            )
    return ContourSystem(arcs, anchors=anchors)


def chebotarev_solve(anchors, tol: float = 1e-8,
                     n_nodes: int = 240):
    """Minimal-capacity continuum through 2 to 4 anchor points.

    Solves for the monic polynomial V of degree p - 2 such that
    R = V/A has vanishing real periods Re int_a^v sqrt(V/A) dz along
    every leg of the tree, then assembles the continuum from critical
    trajectories of -R dz^2.  For four anchors all three pairings plus
    the degenerate single-junction tree are tried and the
    lowest-capacity (highest-energy) assembly wins.

    Returns (V coefficients ascending, ContourSystem).
    """
    anchors = np.asarray(anchors, dtype=complex).ravel()
    p = anchors.size
    if p < 2 or p > 4:
        raise ValueError("anchor count must be between 2 and 4")
    scale = max(1.0, float(np.max(np.abs(anchors))))
    for i in range(p):
        for j in range(i + 1, p):
            if abs(anchors[i] - anchors[j]) < 1e-12 * scale:
                raise DegenerateConfigError("anchors must be distinct")

    if p == 2:
        a, b = anchors
        ctrl = a + (b - a) * np.linspace(0.0, 1.0, 5)
        system = ContourSystem([Arc(ctrl)], anchors=anchors)
        return np.array([1.0 + 0.0j]), system

    centroid = complex(anchors.mean())
    spread = float(np.max(np.abs(anchors - centroid)))

    if p == 3:
        def conditions(x):
            v = complex(x[0], x[1])
            vc = np.array([-v, 1.0], dtype=complex)
            return np.array(
                [np.real(_anchor_integral(vc, anchors, a, v)) for a in anchors]
            )

        starts = [centroid] + [
            centroid + 0.3 * spread * np.exp(2j * np.pi * k / 5)
            for k in range(5)
        ]
        best_x, best_r = None, np.inf
        for s0 in starts:
            x, r = _newton_lsq(conditions, np.array([s0.real, s0.imag]))
            if r < best_r:
                best_x, best_r = x, r
            if best_r <= tol:
                break
        if best_r > tol:
            raise ConvergenceError(
                f"chebotarev conditions stalled at residual {best_r:.2e}"
            )
        v = complex(best_x[0], best_x[1])
        vcoef = np.array([-v, 1.0], dtype=complex)
        system = _assemble_tree(vcoef, anchors, [(v, a) for a in anchors])
        return vcoef, system

    # p == 4: try the three pairings and the degenerate single junction
    candidates = []
    pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    for pair1, pair2 in pairings:
        def conditions(x, pair1=pair1, pair2=pair2):
            v1 = complex(x[0], x[1])
            v2 = complex(x[2], x[3])
            vc = npoly.polymul(
                np.array([-v1, 1.0], dtype=complex),
                np.array([-v2, 1.0], dtype=complex),
            )
            vals = [
                np.real(_anchor_integral(vc, anchors, anchors[i], v1))
                for i in pair1
            ]
            vals += [
                np.real(_anchor_integral(vc, anchors, anchors[i], v2))
                for i in pair2
            ]
            vals.append(np.real(_bridge_integral(vc, anchors, v1, v2)))
            return np.array(vals)

        g1 = anchors[list(pair1)].mean()
        g2 = anchors[list(pair2)].mean()
        x0 = np.array([
            0.7 * g1.real + 0.3 * centroid.real,
            0.7 * g1.imag + 0.3 * centroid.imag,
            0.7 * g2.real + 0.3 * centroid.real,
            0.7 * g2.imag + 0.3 * centroid.imag,
        ])
        x, r = _newton_lsq(conditions, x0)
        if r <= max(tol, 1e-8):
            v1 = complex(x[0], x[1])
            v2 = complex(x[2], x[3])
            vcoef = npoly.polymul(
                np.array([-v1, 1.0], dtype=complex),
                np.array([-v2, 1.0], dtype=complex),
            )
            legs = [(v1, anchors[i]) for i in pair1]
            legs += [(v2, anchors[i]) for i in pair2]
            if abs(v1 - v2) > 1e-6 * scale:
                legs.append((v1, v2))
            candidates.append((vcoef, legs, r))

    def conditions_single(x):
        v = complex(x[0], x[1])
        vc = npoly.polymul(
            np.array([-v, 1.0], dtype=complex),
            np.array([-v, 1.0], dtype=complex),
        )
        return np.array(
            [np.real(_anchor_integral(vc, anchors, a, v)) for a in anchors]
        )

    x, r = _newton_lsq(conditions_single, np.array([centroid.real, centroid.imag]))
    if r <= max(tol, 1e-8):
        v = complex(x[0], x[1])
        vcoef = npoly.polymul(
            np.array([-v, 1.0], dtype=complex),
            np.array([-v, 1.0], dtype=complex),
        )
        candidates.append((vcoef, [(v, a) for a in anchors], r))

    if not candidates:
        raise ConvergenceError("no chebotarev candidate converged")

    best = None
    for vcoef, legs, r in candidates:
        try:
            system = _assemble_tree(vcoef, anchors, legs)
            res = solve_equilibrium(system, zero_field(), n_nodes=n_nodes)
        except (ConvergenceError, DegenerateConfigError, ValueError):
            continue
        if best is None or res.energy > best[2]:
            best = (vcoef, system, res.energy)
    if best is None:
        raise ConvergenceError("no chebotarev assembly admitted a solve")
    return best[0], best[1]
