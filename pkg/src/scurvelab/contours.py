"""Curve systems: arcs, discretizations, variations and families.

A contour system is a finite union of arcs, each a cubic spline through
control points (chord-length parametrized, periodic for closed arcs).
Anchors are distinguished points pinned to control points; searches over
families of systems never move them.

Discretization places quadrature cells along each arc by arclength with
endpoint clustering on open arcs (uniform on closed ones), following the
cosine grading s(theta) = L (1 - cos theta)/2.  Nodes sit at cell
midpoints in the graded variable; the cell lengths double as local
spacing for density reconstruction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateConfigError

_GL7_X, _GL7_W = np.polynomial.legendre.leggauss(7)


# ---------------------------------------------------------------------------
# arcs


class Arc:
    """Cubic spline arc through complex control points.

    ``closed`` arcs are interpolated periodically; the first control
    point is not repeated in ``control``.
    """

    def __init__(self, control, closed: bool = False):
        control = np.asarray(control, dtype=complex).ravel()
        if control.size < 2:
            raise DegenerateConfigError("arc needs at least two control points")
        self.control = control
        self.closed = bool(closed)
        self._spline = None
        self._stable = None

    def _build(self):
        pts = self.control
        if self.closed:
            pts = np.concatenate([pts, pts[:1]])
        chord = np.abs(np.diff(pts))
        # coincident neighbors would give a stationary parameter
        chord = np.maximum(chord, 1e-300)
        t = np.concatenate([[0.0], np.cumsum(chord)])
        total = t[-1]
        if total <= 0:
            raise DegenerateConfigError("arc has zero length")
        t /= total
        bc = "periodic" if self.closed else "not-a-knot"
        if pts.size == 2:
            # cubic interpolation needs 3 points; a 2 point arc is a chord
            self._spline = CubicSpline(t, pts, bc_type="natural")
        else:
            self._spline = CubicSpline(t, pts, bc_type=bc)
        m = max(512, 48 * self.control.size)
        tt = np.linspace(0.0, 1.0, m + 1)
        zz = self._spline(tt)
        seg = np.abs(np.diff(zz))
        s = np.concatenate([[0.0], np.cumsum(seg)])
        self._stable = (tt, s)

    @property
    def spline(self):
        if self._spline is None:
            self._build()
        return self._spline

    @property
    def length(self) -> float:
        if self._stable is None:
            self._build()
        return float(self._stable[1][-1])

    def param_at_s(self, s):
        """Spline parameter(s) in [0, 1] at arclength position(s) ``s``."""
        if self._stable is None:
            self._build()
        tt, sg = self._stable
        return np.interp(np.asarray(s, dtype=float), sg, tt)

    def arclength_at_param(self, t):
        """Arclength position(s) at spline parameter(s) ``t`` in [0, 1]."""
        if self._stable is None:
            self._build()
        tt, sg = self._stable
        return np.interp(np.asarray(t, dtype=float), tt, sg)

    def point_at_s(self, s):
        """Point(s) at arclength position(s) ``s`` in [0, length]."""
        return self.spline(self.param_at_s(s))

    def tangent_at_s(self, s):
        if self._stable is None:
            self._build()
        tt, sg = self._stable
        t = np.interp(np.asarray(s, dtype=float), sg, tt)
        d = self.spline(t, 1)
        mag = np.abs(d)
        mag = np.where(mag == 0, 1.0, mag)
        return d / mag

    def resample(self, n: int):
        """Evenly spaced (by arclength) points; endpoints included when open."""
        L = self.length
        if self.closed:
            s = np.arange(n) * (L / n)
        else:
            s = np.linspace(0.0, L, n)
        return self.point_at_s(s)

    def basis_matrix(self, params):
        """Cardinal spline responses at the given parameters.

        Entry [i, j] is the displacement of the curve point at parameter
        ``params[i]`` per unit move of control point j (with the knot
        vector held fixed), i.e. the interpolant of the j-th unit vector.
        """
        if self._spline is None:
            self._build()
        knots = self._spline.x
        m = self.control.size
        params = np.asarray(params, dtype=float)
        out = np.empty((params.size, m))
        for j in range(m):
            e = np.zeros(knots.size)
            e[j] = 1.0
            if self.closed and j == 0:
                e[-1] = 1.0
            if knots.size == 2:
                basis = CubicSpline(knots, e, bc_type="natural")
            elif self.closed:
                basis = CubicSpline(knots, e, bc_type="periodic")
            else:
                basis = CubicSpline(knots, e, bc_type="not-a-knot")
            out[:, j] = basis(params)
        return out

    def endpoints(self):
        if self.closed:
            return ()
        return (complex(self.control[0]), complex(self.control[-1]))

    def moved(self, new_control):
        return Arc(new_control, closed=self.closed)


# ---------------------------------------------------------------------------
# systems


class ContourSystem:
    """Finite union of arcs plus pinned anchor points."""

    def __init__(self, arcs: Sequence[Arc], anchors=()):
        if not arcs:
            raise DegenerateConfigError("contour system needs at least one arc")
        self.arcs = list(arcs)
        self.anchors = np.asarray(list(anchors), dtype=complex)
        self._check_anchors()

    def _check_anchors(self):
        if self.anchors.size == 0:
            return
        ctrl = np.concatenate([a.control for a in self.arcs])
        scale = max(1.0, float(np.max(np.abs(ctrl))))
        for a in self.anchors:
            if np.min(np.abs(ctrl - a)) > 1e-12 * scale:
                raise DegenerateConfigError(
                    f"anchor {a} does not lie on a control point of any arc"
                )

    # geometry -----------------------------------------------------------

    def sample(self, per_arc: int = 256):
        return np.concatenate([a.resample(max(8, per_arc)) for a in self.arcs])

    def diameter(self) -> float:
        pts = self.sample(128)
        i = np.argmax(np.abs(pts - pts.mean()))
        far = pts[i]
        return float(np.max(np.abs(pts - far)))

    def total_length(self) -> float:
        return float(sum(a.length for a in self.arcs))

    def components(self) -> List[List[int]]:
        """Groups of arc indices joined at shared endpoints."""
        n = len(self.arcs)
        scale = max(1.0, self.diameter())
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        ends = [a.endpoints() for a in self.arcs]
        for i in range(n):
            for j in range(i + 1, n):
                hit = any(
                    abs(p - q) <= 1e-9 * scale for p in ends[i] for q in ends[j]
                )
                if hit:
                    parent[find(i)] = find(j)
        groups = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return list(groups.values())

    def component_diameters(self) -> List[float]:
        out = []
        for group in self.components():
            pts = np.concatenate([self.arcs[i].resample(128) for i in group])
            i = np.argmax(np.abs(pts - pts.mean()))
            out.append(float(np.max(np.abs(pts - pts[i]))))
        return out

    def is_simple(self, resolution: Optional[float] = None) -> bool:
        """True when no two non-neighboring samples come closer than the
        sampling resolution (self intersections within resolution)."""
        pts, arc_id, local = [], [], []
        counts = {}
        for k, a in enumerate(self.arcs):
            p = a.resample(256)
            pts.append(p)
            arc_id.append(np.full(p.size, k))
            local.append(np.arange(p.size))
            counts[k] = p.size
        pts = np.concatenate(pts)
        arc_id = np.concatenate(arc_id)
        local = np.concatenate(local)
        if resolution is None:
            resolution = 0.25 * self.total_length() / pts.size
        from scipy.spatial import cKDTree

        tree = cKDTree(np.column_stack([pts.real, pts.imag]))
        pairs = tree.query_pairs(resolution, output_type="ndarray")
        if pairs.size == 0:
            return True
        endpoints = [e for a in self.arcs for e in a.endpoints()]
        for i, j in pairs:
            if arc_id[i] == arc_id[j]:
                n = counts[int(arc_id[i])]
                gap = abs(int(local[i]) - int(local[j]))
                if self.arcs[int(arc_id[i])].closed:
                    gap = min(gap, n - gap)
                if gap <= 3:
                    continue
            # shared endpoints between arcs are junctions, not crossings
            near_end = lambda p: endpoints and min(
                abs(p - e) for e in endpoints
            ) <= 3 * resolution
            if near_end(pts[i]) and near_end(pts[j]):
                continue
            return False
        return True

    # serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "arcs": [
                {
                    "control": [[float(c.real), float(c.imag)] for c in a.control],
                    "closed": a.closed,
                }
                for a in self.arcs
            ],
            "anchors": [[float(a.real), float(a.imag)] for a in self.anchors],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ContourSystem":
        arcs = [
            Arc([complex(x, y) for x, y in spec["control"]], closed=spec["closed"])
            for spec in d["arcs"]
        ]
        anchors = [complex(x, y) for x, y in d.get("anchors", [])]
        return cls(arcs, anchors)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ContourSystem":
        return cls.from_dict(json.loads(text))


# constructors --------------------------------------------------------------


def segment(a, b, n_ctrl: int = 2) -> ContourSystem:
    """Straight segment from a to b with pinned endpoints."""
    a, b = complex(a), complex(b)
    t = np.linspace(0.0, 1.0, max(2, n_ctrl))
    return ContourSystem([Arc(a + (b - a) * t)], anchors=[a, b])


def circle(center, radius, n_ctrl: int = 64) -> ContourSystem:
    """Closed curve through n_ctrl points of a circle (no anchors)."""
    th = 2 * np.pi * np.arange(n_ctrl) / n_ctrl
    pts = complex(center) + float(radius) * np.exp(1j * th)
    return ContourSystem([Arc(pts, closed=True)])


def arc_through(a, b, via, n_ctrl: int = 9) -> ContourSystem:
    """Circular arc from a to b passing through ``via``, anchors at a, b."""
    a, b, via = complex(a), complex(b), complex(via)
    # circumcenter of the three points, straight chord if collinear
    d = (a * (b - via).conjugate()).imag + (b * (via - a).conjugate()).imag \
        + (via * (a - b).conjugate()).imag
    if abs(d) < 1e-14 * max(abs(a - b), 1.0) ** 2:
        t = np.linspace(0.0, 1.0, max(2, n_ctrl))
        return ContourSystem([Arc(a + (b - a) * t)], anchors=[a, b])
    ux = (abs(a) ** 2 * (b - via) + abs(b) ** 2 * (via - a) + abs(via) ** 2 * (a - b))
    center = 1j * ux / d
    r = abs(a - center)
    tha, thb, thv = (np.angle(p - center) for p in (a, b, via))
    # sweep from a to b passing through via
    def unwrap(th):
        return th % (2 * np.pi)

    base = unwrap(tha)
    tb = unwrap(thb - base)
    tv = unwrap(thv - base)
    if tv > tb:
        tb -= 2 * np.pi
        tv -= 2 * np.pi
    th = base + np.linspace(0.0, tb, max(3, n_ctrl))
    pts = center + r * np.exp(1j * th)
    pts[0], pts[-1] = a, b
    return ContourSystem([Arc(pts)], anchors=[a, b])


def star_system(anchors, junction, n_ctrl: int = 5) -> ContourSystem:
    """Arcs joining each anchor to a common free junction point."""
    anchors = [complex(a) for a in anchors]
    junction = complex(junction)
    arcs = []
    for a in anchors:
        t = np.linspace(0.0, 1.0, max(2, n_ctrl))
        arcs.append(Arc(a + (junction - a) * t))
    return ContourSystem(arcs, anchors=anchors)


# ---------------------------------------------------------------------------
# discretization


@dataclass
class Quadrature:
    """Cell discretization of a contour system.

    ``nodes`` are cell midpoints, ``spacings`` cell arclengths,
    ``cell_samples`` 7 point Gauss-Legendre samples of each cell used for
    near-field quadrature corrections.
    """

    nodes: np.ndarray
    spacings: np.ndarray
    tangents: np.ndarray
    arc_of: np.ndarray
    arc_pos: np.ndarray
    cell_samples: np.ndarray
    arc_slices: List[Tuple[int, int]]
    closed: List[bool]
    collapsed: List[int]
    system: ContourSystem

    @property
    def size(self) -> int:
        return self.nodes.size

    def normals(self):
        return 1j * self.tangents

    def near_pairs(self, width: int = 2):
        """Same-arc cell pairs within ``width`` cells (wraparound when closed)."""
        pairs = []
        for k, (lo, hi) in enumerate(self.arc_slices):
            n = hi - lo
            if n < 2:
                continue
            for i in range(n):
                for off in range(1, width + 1):
                    j = i + off
                    if j < n:
                        pairs.append((lo + i, lo + j))
                    elif self.closed[k] and n > width + 1:
                        pairs.append((lo + i, lo + (j % n)))
        return pairs


def allocate_counts(system: ContourSystem, n_nodes: int) -> np.ndarray:
    """Per-arc node counts proportional to arclength (minimum 8)."""
    lengths = np.array([a.length for a in system.arcs])
    total = float(lengths.sum())
    if total <= 0:
        raise DegenerateConfigError("contour system has zero length")
    scale = max(system.diameter(), 1e-300)
    counts = np.maximum(8, np.round(n_nodes * lengths / total).astype(int))
    counts[lengths < 1e-9 * scale] = 1
    return counts


def discretize(system: ContourSystem, n_nodes: int = 400,
               counts=None) -> Quadrature:
    """Place quadrature cells along every arc of the system.

    ``counts`` overrides the per-arc allocation; fixing it across a
    family of deforming systems keeps the discretized energy a smooth
    function of the control points.
    """
    lengths = np.array([a.length for a in system.arcs])
    total = float(lengths.sum())
    if total <= 0:
        raise DegenerateConfigError("contour system has zero length")
    scale = max(system.diameter(), 1e-300)
    collapsed = [i for i, L in enumerate(lengths) if L < 1e-9 * scale]

    if counts is None:
        counts = allocate_counts(system, n_nodes)
    else:
        counts = np.asarray(counts, dtype=int).copy()
        if counts.size != len(system.arcs):
            raise ValueError("counts must have one entry per arc")
        counts[lengths < 1e-9 * scale] = 1

    nodes, spac, tang, arcof, arcpos, samples = [], [], [], [], [], []
    slices, closed_flags = [], []
    offset = 0
    glx = 0.5 * (_GL7_X + 1.0)
    for k, (arc, n) in enumerate(zip(system.arcs, counts)):
        L = arc.length
        if k in collapsed:
            z0 = arc.point_at_s(0.5 * L)
            nodes.append(np.array([z0]))
            spac.append(np.array([max(L, 1e-300)]))
            tang.append(np.array([arc.tangent_at_s(0.5 * L)]))
            arcof.append(np.array([k]))
            arcpos.append(np.array([0.5 * L]))
            samples.append(np.full((1, 7), z0, dtype=complex))
            slices.append((offset, offset + 1))
            closed_flags.append(arc.closed)
            offset += 1
            continue
        if arc.closed:
            sb = L * np.arange(n + 1) / n
            sm = 0.5 * (sb[:-1] + sb[1:])
        else:
            th = np.pi * np.arange(n + 1) / n
            sb = L * 0.5 * (1 - np.cos(th))
            sm = L * 0.5 * (1 - np.cos(0.5 * (th[:-1] + th[1:])))
        cell = np.diff(sb)
        sgl = sb[:-1, None] + cell[:, None] * glx[None, :]
        nodes.append(arc.point_at_s(sm))
        spac.append(cell)
        tang.append(arc.tangent_at_s(sm))
        arcof.append(np.full(n, k))
        arcpos.append(sm)
        samples.append(arc.point_at_s(sgl.ravel()).reshape(n, 7))
        slices.append((offset, offset + n))
        closed_flags.append(arc.closed)
        offset += n

    quad = Quadrature(
        nodes=np.concatenate(nodes),
        spacings=np.concatenate(spac),
        tangents=np.concatenate(tang),
        arc_of=np.concatenate(arcof),
        arc_pos=np.concatenate(arcpos),
        cell_samples=np.vstack(samples),
        arc_slices=slices,
        closed=closed_flags,
        collapsed=collapsed,
        system=system,
    )
    return quad


# ---------------------------------------------------------------------------
# Hausdorff distance


def _point_to_polyline(points, poly):
    """Exact distance from each point to a polyline (array of vertices)."""
    from scipy.spatial import cKDTree

    verts = np.column_stack([poly.real, poly.imag])
    tree = cKDTree(verts)
    _, idx = tree.query(np.column_stack([points.real, points.imag]), k=1)
    out = np.empty(points.size)
    a = poly[:-1]
    b = poly[1:]
    for m, (p, i) in enumerate(zip(points, idx)):
        lo = max(0, i - 2)
        hi = min(poly.size - 1, i + 2)
        best = abs(p - poly[i])
        for seg in range(lo, hi):
            d = b[seg] - a[seg]
            denom = (d * d.conjugate()).real
            if denom == 0:
                continue
            t = ((p - a[seg]) * d.conjugate()).real / denom
            t = min(1.0, max(0.0, t))
            best = min(best, abs(p - (a[seg] + t * d)))
        out[m] = best
    return out


def _polylines(system: ContourSystem, per_arc: int):
    out = []
    for arc in system.arcs:
        p = arc.resample(per_arc)
        if arc.closed:
            p = np.concatenate([p, p[:1]])
        out.append(p)
    return out


def _directed_hausdorff(sys_a: ContourSystem, polys_b, per_arc: int):
    best = 0.0
    for arc in sys_a.arcs:
        L = arc.length
        n = max(64, per_arc)
        s = np.linspace(0.0, L, n) if not arc.closed else np.arange(n) * L / n

        def dist_at(svals):
            pts = np.atleast_1d(arc.point_at_s(svals))
            d = np.full(pts.size, np.inf)
            for poly in polys_b:
                d = np.minimum(d, _point_to_polyline(pts, poly))
            return d

        d = dist_at(s)
        order = np.argsort(d)[::-1][:4]
        step = L / n
        for i in order:
            lo = max(0.0, s[i] - step)
            hi = min(L, s[i] + step)
            # golden section refinement of the local maximum
            for _ in range(40):
                m1 = lo + 0.382 * (hi - lo)
                m2 = lo + 0.618 * (hi - lo)
                if dist_at(np.array([m1]))[0] < dist_at(np.array([m2]))[0]:
                    lo = m1
                else:
                    hi = m2
            best = max(best, float(dist_at(np.array([0.5 * (lo + hi)]))[0]))
        best = max(best, float(d.max()))
    return best


def hausdorff_distance(sys_a: ContourSystem, sys_b: ContourSystem,
                       per_arc: Optional[int] = None) -> float:
    """Hausdorff distance between two systems in the Euclidean metric.

    Both systems are densely resampled (spacing about 1e-3 of the
    diameter); candidate maxima of the distance function are then refined
    along the curves so the sampling error is far below the resample
    spacing.  Symmetric and nonnegative by construction.
    """
    if per_arc is None:
        scale = max(sys_a.diameter(), sys_b.diameter(), 1e-12)
        per = int(min(4000, max(512, math.ceil(
            max(sys_a.total_length(), sys_b.total_length()) / (1e-3 * scale)
        ))))
    else:
        per = per_arc
    pa = _polylines(sys_a, per)
    pb = _polylines(sys_b, per)
    return max(_directed_hausdorff(sys_a, pb, per), _directed_hausdorff(sys_b, pa, per))


# ---------------------------------------------------------------------------
# variation fields


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _smoothstep_d(u):
    inside = (u > 0.0) & (u < 1.0)
    return np.where(inside, 6.0 * u * (1.0 - u), 0.0)


class BumpField:
    """Compactly supported displacement  h(z) = d * psi(|z - c|^2 / r^2).

    psi(u) = exp(-u/(1-u)) on [0, 1), zero beyond, so h vanishes
    identically outside the disc |z - c| < r and is smooth inside.
    """

    kind = "bump"

    def __init__(self, center, radius, direction=1.0):
        if radius <= 0:
            raise ValueError("bump radius must be positive")
        self.center = complex(center)
        self.radius = float(radius)
        self.direction = complex(direction)

    def _psi(self, u):
        out = np.zeros_like(u)
        inside = u < 1.0
        ui = u[inside]
        out[inside] = np.exp(-ui / (1.0 - ui))
        return out

    def _psi_d(self, u):
        out = np.zeros_like(u)
        inside = u < 1.0
        ui = u[inside]
        out[inside] = -np.exp(-ui / (1.0 - ui)) / (1.0 - ui) ** 2
        return out

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        u = np.abs(z - self.center) ** 2 / self.radius**2
        return self.direction * self._psi(u)

    def wirtinger(self, z):
        z = np.asarray(z, dtype=complex)
        w = z - self.center
        u = np.abs(w) ** 2 / self.radius**2
        dpsi = self._psi_d(u) / self.radius**2
        hz = self.direction * dpsi * np.conj(w)
        hzb = self.direction * dpsi * w
        return hz, hzb

    def deriv(self, z):
        return self.wirtinger(z)[0]

    def lipschitz(self, z):
        hz, hzb = self.wirtinger(z)
        return float(np.max(np.abs(hz) + np.abs(hzb), initial=0.0))


class SchifferField:
    """Rational displacement  h(z) = theta(z) A(z) / (z - pole)  with
    A(z) = prod (z - a_k) over the anchors.

    ``cutoff`` > 0 multiplies by a C^1 window theta vanishing within
    ``cutoff`` of every anchor and equal to one beyond twice that; with
    ``cutoff`` = 0 the bare rational field is used (it already vanishes
    at the anchors themselves).
    """

    kind = "schiffer"

    def __init__(self, pole, anchors, cutoff=0.0):
        self.pole = complex(pole)
        self.anchors = tuple(complex(a) for a in anchors)
        self.cutoff = float(cutoff)
        if any(abs(a - self.pole) < 1e-12 for a in self.anchors):
            raise ValueError("pole coincides with an anchor")

    def _rational(self, z):
        num = np.ones_like(z)
        for a in self.anchors:
            num = num * (z - a)
        return num / (z - self.pole)

    def _rational_d(self, z):
        num = np.ones_like(z)
        dnum = np.zeros_like(z)
        for a in self.anchors:
            dnum = dnum * (z - a) + num
            num = num * (z - a)
        den = z - self.pole
        return (dnum * den - num) / den**2

    def _theta(self, z):
        th = np.ones(z.shape, dtype=float)
        for a in self.anchors:
            r = np.abs(z - a)
            th = th * _smoothstep(r / self.cutoff - 1.0)
        return th

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        h = self._rational(z)
        if self.cutoff > 0:
            h = h * self._theta(z)
        return h

    def wirtinger(self, z):
        z = np.asarray(z, dtype=complex)
        r = self._rational(z)
        rd = self._rational_d(z)
        if self.cutoff <= 0:
            return rd, np.zeros_like(z)
        th = self._theta(z)
        # product rule across the radial windows
        thz = np.zeros_like(z)
        for a in self.anchors:
            dist = np.abs(z - a)
            other = np.ones(z.shape, dtype=float)
            for b in self.anchors:
                if b != a:
                    other = other * _smoothstep(np.abs(z - b) / self.cutoff - 1.0)
            sd = _smoothstep_d(dist / self.cutoff - 1.0) / self.cutoff
            with np.errstate(invalid="ignore", divide="ignore"):
                grad = np.where(dist > 0, np.conj(z - a) / (2 * dist), 0.0)
            thz = thz + other * sd * grad
        hz = rd * th + r * thz
        hzb = r * np.conj(thz)
        return hz, hzb

    def deriv(self, z):
        return self.wirtinger(z)[0]

    def lipschitz(self, z):
        hz, hzb = self.wirtinger(z)
        return float(np.max(np.abs(hz) + np.abs(hzb), initial=0.0))


class AnalyticVariation:
    """Wrap an analytic displacement given as (h, h')."""

    kind = "analytic"

    def __init__(self, fn: Callable, dfn: Callable):
        self.fn = fn
        self.dfn = dfn

    def __call__(self, z):
        return np.asarray(self.fn(np.asarray(z, dtype=complex)), dtype=complex)

    def wirtinger(self, z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self.dfn(z), dtype=complex), np.zeros_like(z)

    def deriv(self, z):
        return self.wirtinger(z)[0]

    def lipschitz(self, z):
        return float(np.max(np.abs(self.deriv(z)), initial=0.0))


def bump_field(center, radius, direction=1.0) -> BumpField:
    return BumpField(center, radius, direction)


def schiffer_field(pole, anchors, cutoff=0.0) -> SchifferField:
    return SchifferField(pole, anchors, cutoff)


def apply_variation(system: ContourSystem, h, t: float) -> ContourSystem:
    """Push the system forward under z -> z + t h(z).

    The control polygon is transported; for admissible fields vanishing
    near the anchors this leaves anchors in place.  Raises when
    |t| Lip(h) >= 1, which would allow the map to fold.
    """
    samples = system.sample(128)
    lip = h.lipschitz(samples) if hasattr(h, "lipschitz") else None
    if lip is not None and abs(t) * lip >= 1.0:
        raise ValueError(
            f"variation too large: |t| Lip(h) = {abs(t) * lip:.3g} >= 1"
        )
    arcs = [arc.moved(arc.control + t * h(arc.control)) for arc in system.arcs]
    return ContourSystem(arcs, anchors=system.anchors.copy())


# ---------------------------------------------------------------------------
# families


@dataclass
class FamilySpec:
    """Constraints shared by every member of a search family.

    ``pinned`` maps control points onto anchors, ``junctions`` groups arc
    endpoints that must coincide, ``exclusion`` lists (center, radius)
    discs that control points must stay out of (used to bypass repelling
    log charges), ``max_components`` caps the component count.
    """

    anchors: np.ndarray
    pinned: List[Tuple[int, int, int]]
    junctions: List[List[Tuple[int, int]]] = dc_field(default_factory=list)
    exclusion: List[Tuple[complex, float]] = dc_field(default_factory=list)
    max_components: int = 1
    template: Optional[ContourSystem] = None


def build_family(system: ContourSystem, junction_groups=(),
                 exclusion=(), max_components: int = 1) -> FamilySpec:
    """Derive a family spec from a template system.

    Control points coinciding with anchors become pinned; each junction
    group is a list of (arc index, end index) pairs with end index 0 or
    -1 for the first or last control point.
    """
    scale = max(1.0, system.diameter())
    pinned = []
    for ai, anchor in enumerate(system.anchors):
        for ki, arc in enumerate(system.arcs):
            close = np.abs(arc.control - anchor) <= 1e-9 * scale
            for ci in np.where(close)[0]:
                pinned.append((ki, int(ci), ai))
    return FamilySpec(
        anchors=system.anchors.copy(),
        pinned=pinned,
        junctions=[list(g) for g in junction_groups],
        exclusion=[(complex(c), float(r)) for c, r in exclusion],
        max_components=max_components,
        template=system,
    )


def family_project(system: ContourSystem, family: FamilySpec) -> ContourSystem:
    """Snap a candidate system back onto the family constraints."""
    controls = [arc.control.copy() for arc in system.arcs]
    for ki, ci, ai in family.pinned:
        controls[ki][ci] = family.anchors[ai]
    for group in family.junctions:
        pos = np.mean([controls[ki][ei] for ki, ei in group])
        for ki, ei in group:
            controls[ki][ei] = pos
    for center, radius in family.exclusion:
        for ctrl in controls:
            d = np.abs(ctrl - center)
            inside = d < radius
            if inside.any():
                safe = np.where(d[inside] > 0, d[inside], 1.0)
                dirn = np.where(
                    d[inside] > 0, (ctrl[inside] - center) / safe, 1.0
                )
                ctrl[inside] = center + radius * dirn
    arcs = [arc.moved(c) for arc, c in zip(system.arcs, controls)]
    out = ContourSystem(arcs, anchors=family.anchors.copy())

    comps = out.components()
    while len(comps) > family.max_components:
        # connect the two closest components at their nearest endpoints
        best = None
        for gi in range(len(comps)):
            for gj in range(gi + 1, len(comps)):
                for ki in comps[gi]:
                    for kj in comps[gj]:
                        for pi, p in enumerate((0, -1)):
                            for qj, q in enumerate((0, -1)):
                                if out.arcs[ki].closed or out.arcs[kj].closed:
                                    continue
                                dist = abs(out.arcs[ki].control[p] - out.arcs[kj].control[q])
                                if best is None or dist < best[0]:
                                    best = (dist, ki, p, kj, q)
        if best is None:
            break
        _, ki, p, kj, q = best
        mid = 0.5 * (out.arcs[ki].control[p] + out.arcs[kj].control[q])
        ci = out.arcs[ki].control.copy()
        cj = out.arcs[kj].control.copy()
        ci[p] = mid
        cj[q] = mid
        arcs = list(out.arcs)
        arcs[ki] = arcs[ki].moved(ci)
        arcs[kj] = arcs[kj].moved(cj)
        out = ContourSystem(arcs, anchors=family.anchors.copy())
        comps = out.components()
    return out
