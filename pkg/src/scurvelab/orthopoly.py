"""Complex orthogonal polynomials as an independent verification track.

Padé denominators of a Markov-type function f, polynomials orthogonal
with respect to varying weights f e^{-2n Phi} along a contour, and
Heine-Stieltjes polynomial pairs all have zero sets whose counting
measures converge to equilibrium measures.  This module computes those
polynomials directly - high-precision contour moments, Hankel solves
with rank fallback, and Newton iteration on the Heine-Stieltjes
coefficient system - so the zero distributions can be compared against
the potential-theoretic predictions made elsewhere in the package.

Complex Hankel systems are exponentially ill conditioned in the degree,
so moments and linear solves run at 256-bit precision by default.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
import mpmath
from mpmath import mp

from .contours import ContourSystem
from .errors import ConvergenceError
from .fields import ExternalField, zero_field
from .measures import DiscreteMeasure, potential

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 256


# ---------------------------------------------------------------------------
# branch function specification


@dataclass(frozen=True)
class BranchFunctionSpec:
    """f(z) = prod_k (z - a_k)^{alpha_k} * num(z) / den(z).

    Each power uses its principal branch; when the exponents sum to an
    integer the pairwise cuts cancel outside the hull of the branch
    points and f is single valued near infinity.  ``num`` and ``den``
    are ascending polynomial coefficients.
    """

    branch_points: Tuple[Tuple[complex, float], ...] = ()
    num: Tuple[complex, ...] = (1.0,)
    den: Tuple[complex, ...] = (1.0,)

    def growth_at_infinity(self) -> float:
        """Exponent of z in f as z -> infinity."""
        g = sum(alpha for _, alpha in self.branch_points)
        return g + (len(self.num) - 1) - (len(self.den) - 1)

    def validate(self):
        total = sum(alpha for _, alpha in self.branch_points)
        if abs(total - round(total)) > 1e-12:
            raise ValueError(
                "branch exponents must sum to an integer for a single-valued "
                "function at infinity"
            )
        if self.growth_at_infinity() > 1e-12:
            raise ValueError("function grows at infinity; expected O(1)")

    def singular_points(self) -> np.ndarray:
        pts = [a for a, _ in self.branch_points]
        if len(self.den) > 1:
            pts.extend(np.roots(np.asarray(self.den)[::-1]).tolist())
        return np.asarray(pts, dtype=complex)

    def eval_mp(self, z):
        """Evaluate with mpmath at full working precision."""
        out = mp.mpc(1)
        for a, alpha in self.branch_points:
            out *= mp.power(z - mp.mpc(a), mp.mpf(alpha))
        if len(self.num) > 1 or self.num[0] != 1.0:
            acc = mp.mpc(0)
            for c in reversed(self.num):
                acc = acc * z + mp.mpc(c)
            out *= acc
        if len(self.den) > 1 or self.den[0] != 1.0:
            acc = mp.mpc(0)
            for c in reversed(self.den):
                acc = acc * z + mp.mpc(c)
            out /= acc
        return out


def branch_function(branch_points, num=(1.0,), den=(1.0,)) -> BranchFunctionSpec:
    """Convenience constructor for a branch-function specification."""
    return BranchFunctionSpec(
        branch_points=tuple((complex(a), float(al)) for a, al in branch_points),
        num=tuple(complex(c) for c in num),
        den=tuple(complex(c) for c in den),
    )


def markov_sqrt_spec() -> BranchFunctionSpec:
    """f(z) = 1/sqrt(z^2 - 1), the Markov function of the arcsine law."""
    return branch_function([(-1.0, -0.5), (1.0, -0.5)])


# ---------------------------------------------------------------------------
# records


@dataclass
class MomentTable:
    """Moments mu_k = (1/2 pi i) contour-int t^k f(t) dt, k = 0..2n.

    ``f_inf`` is the constant term of the Laurent expansion of f at
    infinity (mu_{-1} in the same normalization).
    """

    moments: list
    source: str
    precision_bits: int
    f_inf: complex = 0.0

    def __post_init__(self):
        if self.precision_bits < 128:
            raise ValueError("precision_bits must be at least 128")

    def as_complex(self) -> np.ndarray:
        return np.array([complex(m) for m in self.moments])


@dataclass
class PolyRecord:
    """Monic polynomial with extended-precision coefficients and zeros."""

    coeffs: list
    zeros: list
    moment_residual: float
    precision_bits: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeffs_complex(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs])

    def zeros_complex(self) -> np.ndarray:
        return np.array([complex(z) for z in self.zeros])

    def evaluate(self, z):
        return np.polynomial.polynomial.polyval(
            np.asarray(z, dtype=complex), self.coeffs_complex()
        )

    def roundtrip_defect(self) -> float:
        """Relative distance between coeffs and the product over zeros."""
        prod = np.array([1.0 + 0j])
        for r in self.zeros_complex():
            prod = np.polynomial.polynomial.polymul(prod, [-r, 1.0])
        c = self.coeffs_complex()
        scale = float(np.max(np.abs(c))) or 1.0
        return float(np.max(np.abs(prod - c))) / scale

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": [[mp.nstr(mp.re(c), 30), mp.nstr(mp.im(c), 30)]
                       for c in self.coeffs],
            "zeros": [[float(np.real(complex(z))), float(np.imag(complex(z)))]
                      for z in self.zeros],
            "moment_residual": self.moment_residual,
            "precision_bits": self.precision_bits,
        }

    def zeros_csv(self) -> str:
        lines = ["re,im"]
        lines += [f"{complex(z).real:.17g},{complex(z).imag:.17g}"
                  for z in self.zeros]
        return "\n".join(lines) + "\n"


def _poly_roots_mp(coeffs) -> list:
    """Zeros of a monic polynomial given by ascending mp coefficients.

    mpmath's simultaneous-iteration root finder does the bulk of the
    work; one Newton sweep polishes each root afterwards.
    """
    n = len(coeffs) - 1
    if n == 0:
        return []
    desc = list(reversed(coeffs))
    roots = mpmath.polyroots(desc, maxsteps=200, extraprec=80)
    polished = []
    for r in roots:
        for _ in range(2):
            pv = mp.polyval(desc, r)
            dv = mp.polyval([c * (n - i) for i, c in enumerate(desc[:-1])], r)
            if dv != 0:
                r = r - pv / dv
        polished.append(r)
    return polished


# ---------------------------------------------------------------------------
# moments


def laurent_moments(f_spec: BranchFunctionSpec, n: int,
                    precision: int = DEFAULT_PRECISION) -> MomentTable:
    """Moments mu_0..mu_2n of f from high-precision circle quadrature.

    The trapezoid rule on a circle enclosing every finite singularity
    converges geometrically in the point count, so a fixed 4096-point
    rule leaves the quadrature error far below the working precision.
    """
    f_spec.validate()
    sing = f_spec.singular_points()
    center = complex(sing.mean()) if sing.size else 0.0
    radius = 2.0 * float(np.max(np.abs(sing - center), initial=0.5)) + 1.0
    m_pts = 4096
    with mp.workprec(precision + 64):
        c_mp = mp.mpc(center)
        r_mp = mp.mpf(radius)
        mus = [mp.mpc(0) for _ in range(2 * n + 1)]
        f_inf = mp.mpc(0)
        for j in range(m_pts):
            theta = 2 * mp.pi * j / m_pts
            e = mp.expjpi(2 * mp.mpf(j) / m_pts)
            z = c_mp + r_mp * e
            fz = f_spec.eval_mp(z)
            w = fz * r_mp * e / m_pts
            f_inf += w / z
            acc = w
            for k in range(2 * n + 1):
                mus[k] += acc
                acc *= z
        mus = [+mu for mu in mus]
        f_inf = +f_inf
    return MomentTable(moments=mus, source="contour_quadrature",
                       precision_bits=precision, f_inf=complex(f_inf))


def rational_moments_oracle(f_spec: BranchFunctionSpec, n: int) -> np.ndarray:
    """Residue-theorem moments for a purely rational spec (no branch
    points), used to cross-check the quadrature path."""
    if f_spec.branch_points:
        raise ValueError("oracle applies to rational specs only")
    num = np.asarray(f_spec.num, dtype=complex)
    den = np.asarray(f_spec.den, dtype=complex)
    poles = np.roots(den[::-1])
    out = []
    for k in range(2 * n + 1):
        tot = 0.0 + 0.0j
        for p in poles:
            others = poles[np.abs(poles - p) > 1e-12]
            dlead = den[-1] * np.prod(p - others)
            tot += p**k * np.polynomial.polynomial.polyval(p, num) / dlead
        out.append(tot)
    return np.asarray(out)


# ---------------------------------------------------------------------------
# Pade denominators


def _hankel_solve(mus, deg: int, precision: int):
    """Solve the monic-orthogonality Hankel system at a given degree.

    Returns (coeffs ascending including the leading 1, residual) or None
    when the system is numerically singular at working precision.
    """
    scale = max(abs(m) for m in mus[: 2 * deg + 1])
    if scale == 0:
        raise ValueError("trivial function")
    if deg == 0:
        return [mp.mpc(1)], 0.0
    with mp.workprec(precision):
        H = mp.matrix(deg, deg)
        rhs = mp.matrix(deg, 1)
        for k in range(deg):
            for i in range(deg):
                H[k, i] = mus[k + i]
            rhs[k] = -mus[k + deg]
        try:
            q = mp.lu_solve(H, rhs)
        except (ZeroDivisionError, ValueError):
            return None
        qmax = max(abs(q[i]) for i in range(deg))
        if qmax > mp.mpf(2) ** (precision // 3):
            return None
        resid = mp.mpf(0)
        for k in range(deg):
            d = sum(H[k, i] * q[i] for i in range(deg)) - rhs[k]
            resid = max(resid, abs(d))
        rel = resid / scale
        if rel > mp.mpf(2) ** (-precision // 2):
            return None
        coeffs = [q[i] for i in range(deg)] + [mp.mpc(1)]
        return coeffs, float(rel)


def pade_denominator(moments: MomentTable, n: int) -> PolyRecord:
    """Monic denominator Q_n of the diagonal Pade approximant.

    Q_n makes the Laurent coefficients of Q_n f - P_n vanish through
    order z^{-n}, which is the Hankel system in the moments.  On a
    numerically rank-deficient Hankel matrix (f rational of lower
    degree) the degree falls back until the system is solvable, so the
    returned record may have degree below n.
    """
    if len(moments.moments) < 2 * n + 1:
        raise ValueError("need 2n+1 moments")
    precision = moments.precision_bits
    for deg in range(n, -1, -1):
        got = _hankel_solve(moments.moments, deg, precision)
        if got is None:
            continue
        coeffs, rel = got
        with mp.workprec(precision):
            zeros = _poly_roots_mp(coeffs)
        return PolyRecord(coeffs=coeffs, zeros=zeros, moment_residual=rel,
                          precision_bits=precision)
    raise ValueError("trivial function")


# ---------------------------------------------------------------------------
# varying-weight orthogonality on contours


@lru_cache(maxsize=8)
def _gl_rule_mp(npts: int, prec: int):
    """Gauss-Legendre nodes/weights on [-1, 1] at ``prec`` bits."""
    with mp.workprec(prec + 32):
        xs, ws = [], []
        fl = np.polynomial.legendre.leggauss(npts)[0]
        for x0 in fl:
            x = mp.mpf(float(x0))
            for _ in range(60):
                p0, p1 = mp.mpf(1), x
                for k in range(2, npts + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = npts * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mp.mpf(2) ** (-prec - 8):
                    break
            p0, p1 = mp.mpf(1), x
            for k in range(2, npts + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = npts * (x * p1 - p0) / (x * x - 1)
            xs.append(x)
            ws.append(2 / ((1 - x * x) * dp * dp))
    return tuple(xs), tuple(ws)


def _phi_mp(field: ExternalField, z):
    """Analytic completion Phi(z) of the field, in mpmath arithmetic."""
    if field.kind == "zero":
        return mp.mpc(0)
    if field.kind == "polynomial":
        acc = mp.mpc(0)
        for c in reversed(field.coeffs):
            acc = acc * z + mp.mpc(c)
        return acc
    acc = mp.mpc(0)
    for a, alpha in field.charges:
        acc -= mp.mpf(alpha) * mp.log(z - mp.mpc(a))
    return acc


def _arc_quadrature_mp(arc, panels: int, npts: int, prec: int):
    """Quadrature nodes (z, dz-weight) along one arc in mpmath.

    Arclength is reparametrized by the cubic smoothstep, whose linear
    endpoint vanishing turns inverse-square-root endpoint singularities
    of the weight into analytic integrands (grading exponent 2).
    Straight arcs are generated exactly in extended precision; curved
    arcs fall back to float64 spline geometry.
    """
    ctrl = arc.control
    chord = ctrl[-1] - ctrl[0]
    straight = False
    if abs(chord) > 0:
        dev = np.max(np.abs(ctrl - ctrl[0]
                            - np.real((ctrl - ctrl[0]) * np.conj(chord))
                            / abs(chord) ** 2 * chord))
        straight = dev < 1e-13 * abs(chord)
    xs, ws = _gl_rule_mp(npts, prec)
    a_mp, b_mp = mp.mpc(ctrl[0]), mp.mpc(ctrl[-1])
    nodes = []
    for pnl in range(panels):
        u0 = mp.mpf(pnl) / panels
        u1 = mp.mpf(pnl + 1) / panels
        for x, w in zip(xs, ws):
            u = (u0 + u1) / 2 + (u1 - u0) / 2 * x
            g = u * u * (3 - 2 * u)
            dg = 6 * u * (1 - u)
            wu = w * (u1 - u0) / 2 * dg
            if straight:
                z = a_mp + (b_mp - a_mp) * g
                dz = (b_mp - a_mp) * wu
            else:
                s = float(g) * arc.length
                zf = complex(arc.point_at_s(np.array([s]))[0])
                tf = complex(arc.tangent_at_s(np.array([s]))[0])
                z = mp.mpc(zf)
                dz = mp.mpc(tf) * mp.mpf(arc.length) * wu
            nodes.append((z, dz))
    return nodes


def orthopoly_varying(contour: ContourSystem, f_spec: BranchFunctionSpec,
                      field: ExternalField, n: int,
                      precision: int = DEFAULT_PRECISION,
                      panels: int = 20, npts: int = 24) -> PolyRecord:
    """Monic Q_n orthogonal to lower powers against f e^{-2n Phi} dt.

    The contour integral of Q_n(t) t^k f(t) e^{-2n Phi(t)} vanishes for
    k < n.  For a zero field on the function's own cut this reduces to
    the Pade denominator: the one-sided boundary value of f is
    proportional to the jump, and proportional weights define the same
    orthogonality conditions.
    """
    with mp.workprec(precision + 64):
        moms = [mp.mpc(0) for _ in range(2 * n + 1)]
        for arc in contour.arcs:
            for z, dz in _arc_quadrature_mp(arc, panels, npts, precision + 64):
                fz = f_spec.eval_mp(z)
                if field.kind != "zero":
                    fz *= mp.exp(-2 * n * _phi_mp(field, z))
                acc = fz * dz
                for k in range(2 * n + 1):
                    moms[k] += acc
                    acc *= z
        got = None
        for deg in range(n, -1, -1):
            got = _hankel_solve(moms, deg, precision)
            if got is not None:
                break
        if got is None:
            raise ConvergenceError(
                "orthogonality system singular at every degree"
            )
        coeffs, rel = got
        zeros = _poly_roots_mp(coeffs)
    return PolyRecord(coeffs=coeffs, zeros=zeros, moment_residual=rel,
                      precision_bits=precision)


def orthogonality_defect(contour: ContourSystem, f_spec: BranchFunctionSpec,
                         field: ExternalField, record: PolyRecord,
                         precision: int = DEFAULT_PRECISION,
                         panels: int = 20, npts: int = 24) -> float:
    """Re-integrated max |contour-int Q t^k weight dt| / scale, k < n."""
    n = record.degree
    with mp.workprec(precision + 64):
        coeffs = [mp.mpc(c) for c in record.coeffs]
        defects = [mp.mpc(0) for _ in range(max(n, 1))]
        scale = mp.mpf(0)
        for arc in contour.arcs:
            for z, dz in _arc_quadrature_mp(arc, panels, npts, precision + 64):
                fz = f_spec.eval_mp(z)
                if field.kind != "zero":
                    fz *= mp.exp(-2 * n * _phi_mp(field, z))
                q = mp.mpc(0)
                for c in reversed(coeffs):
                    q = q * z + c
                acc = q * fz * dz
                scale = max(scale, abs(acc))
                for k in range(max(n, 1)):
                    defects[k] += acc
                    acc *= z
        worst = max(abs(d) for d in defects)
        return float(worst / max(scale, mp.mpf(1e-300)))


# ---------------------------------------------------------------------------
# Heine-Stieltjes pairs


def _hs_residual(acoef: np.ndarray, bcoef: np.ndarray, n: int,
                 factor: complex, q: np.ndarray, v: np.ndarray) -> np.ndarray:
    pp = np.polynomial.polynomial
    dq = pp.polyder(q)
    ddq = pp.polyder(q, 2)
    lhs = pp.polyadd(pp.polymul(acoef, ddq), pp.polymul(bcoef, dq))
    rhs = factor * pp.polymul(v, q)
    diff = pp.polysub(lhs, rhs)
    width = n + len(acoef) - 3
    out = np.zeros(width, dtype=complex)
    keep = diff[:width]
    out[: keep.size] = keep
    return out


def heine_stieltjes(A_poly, B_poly, n: int, n_random: int = 16,
                    seed: int = 7, tol: float = 1e-11):
    """Polynomial pairs (V, Q) with A Q'' + B Q' = n(n+alpha-1) V Q.

    ``A_poly`` is monic of degree p with distinct roots; ``B_poly`` has
    degree at most p-1 and its degree-(p-1) coefficient alpha sets the
    spectral factor.  V is monic of degree p-2 (a constant fixed by the
    leading-coefficient balance when p = 2).  Newton runs from
    structured starts: zeros clustered on each anchor-pair chord, plus
    seeded random perturbations.  Returns a list of (V coefficients,
    PolyRecord) pairs; an empty list means no start converged.
    """
    pp = np.polynomial.polynomial
    acoef = np.asarray(A_poly, dtype=complex).ravel()
    bcoef = np.asarray(B_poly, dtype=complex).ravel()
    p = acoef.size - 1
    if p < 2:
        raise ValueError("deg A must be at least 2")
    if abs(acoef[-1] - 1.0) > 1e-12:
        raise ValueError("A must be monic")
    if bcoef.size > p:
        raise ValueError("deg B must be below deg A")
    alpha = complex(bcoef[p - 1]) if bcoef.size == p else 0.0
    factor = n * (n + alpha - 1)
    if factor == 0:
        raise ValueError("degenerate spectral factor n(n+alpha-1) = 0")
    anchors = np.roots(acoef[::-1])
    nv = p - 2
    m = n + nv

    def pack(q, v):
        return np.concatenate([q[:n], v[:nv]])

    def unpack(x):
        q = np.concatenate([x[:n], [1.0 + 0j]])
        v = np.concatenate([x[n:], [1.0 + 0j]]) if nv else np.array([1.0 + 0j])
        return q, v

    def fun(x):
        q, v = unpack(x)
        return _hs_residual(acoef, bcoef, n, factor, q, v)

    scale_a = float(np.max(np.abs(anchors))) or 1.0
    rng = np.random.default_rng(seed)
    starts = []
    for i in range(p):
        for j in range(i + 1, p):
            t = (np.arange(n) + 0.5) / n
            zs = anchors[i] + (anchors[j] - anchors[i]) * t
            q0 = np.array([1.0 + 0j])
            for z in zs:
                q0 = pp.polymul(q0, [-z, 1.0])
            v0 = np.full(nv, 0.0 + 0j)
            starts.append(pack(q0, v0))
    for _ in range(n_random):
        zs = (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        zs = anchors.mean() + 0.7 * scale_a * zs / max(1.0, np.max(np.abs(zs)))
        q0 = np.array([1.0 + 0j])
        for z in zs:
            q0 = pp.polymul(q0, [-z, 1.0])
        v0 = 0.3 * scale_a * (rng.standard_normal(nv)
                              + 1j * rng.standard_normal(nv))
        starts.append(pack(q0, v0))

    found = []
    norm_ab = max(float(np.max(np.abs(acoef))), float(np.max(np.abs(bcoef))),
                  abs(factor))
    for x0 in starts:
        x = x0.astype(complex)
        f = fun(x)
        best = float(np.max(np.abs(f)))
        ok = False
        for _ in range(80):
            if best <= tol * norm_ab:
                ok = True
                break
            J = np.empty((m, m), dtype=complex)
            h = 1e-7 * (1.0 + np.abs(x))
            for jcol in range(m):
                xp = x.copy()
                xp[jcol] += h[jcol]
                J[:, jcol] = (fun(xp) - f) / h[jcol]
            try:
                dx = np.linalg.lstsq(J, -f, rcond=None)[0]
            except np.linalg.LinAlgError:
                break
            lam, improved = 1.0, False
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
        if not (ok or best <= tol * norm_ab):
            continue
        q, v = unpack(x)
        zeros = np.sort_complex(np.roots(q[::-1]))
        if any(np.max(np.abs(np.sort_complex(z2) - zeros)) < 1e-6 * scale_a
               for z2, _ in found):
            continue
        found.append((zeros, (q, v, best / norm_ab)))
    out = []
    for zeros, (q, v, rel) in found:
        rec = PolyRecord(
            coeffs=[mp.mpc(c) for c in q],
            zeros=list(zeros),
            moment_residual=rel,
            precision_bits=53,
        )
        out.append((v, rec))
    if not out:
        logger.warning(
            "heine_stieltjes: no solution from %d starts (n=%d, p=%d)",
            len(starts), n, p,
        )
    return out


# ---------------------------------------------------------------------------
# zero-counting diagnostics


def zero_counting(q: PolyRecord) -> DiscreteMeasure:
    """Unit counting measure with mass 1/n at each zero of Q_n."""
    zeros = q.zeros_complex()
    n = zeros.size
    if n == 0:
        raise ValueError("polynomial has no zeros to count")
    return DiscreteMeasure(zeros, np.full(n, 1.0 / n))


def _support_nodes(mu: DiscreteMeasure) -> np.ndarray:
    w = np.abs(mu.weights)
    cut = 1e-12 * float(w.max(initial=0.0))
    keep = mu.nodes[w > cut]
    return keep if keep.size else mu.nodes


def _guard_probes(probes: np.ndarray, supports: Sequence[np.ndarray],
                  min_dist: float = 0.1):
    for sup in supports:
        d = np.abs(probes[:, None] - sup[None, :]).min(axis=1)
        if d.min() < min_dist:
            raise ValueError(
                f"probe within {min_dist} of a support (closest {d.min():.3g})"
            )


def weak_star_distance(mu: DiscreteMeasure, nu: DiscreteMeasure,
                       probes) -> float:
    """max over probes of |V^mu(z) - V^nu(z)|.

    Potentials at probes bounded away from both supports metrize weak-*
    convergence for compactly supported unit measures.
    """
    probes = np.atleast_1d(np.asarray(probes, dtype=complex))
    _guard_probes(probes, [_support_nodes(mu), _support_nodes(nu)])
    return float(np.max(np.abs(potential(mu, probes) - potential(nu, probes))))


def nth_root_check(q: PolyRecord, lam: DiscreteMeasure, probes) -> float:
    """max over probes of |(1/n) log|Q_n(z)| + V^lam(z)|.

    Probes landing on a zero of Q_n are skipped (and logged); at least
    one usable probe is required.
    """
    probes = np.atleast_1d(np.asarray(probes, dtype=complex))
    _guard_probes(probes, [_support_nodes(lam)])
    zeros = q.zeros_complex()
    n = max(q.degree, 1)
    vals = []
    for z in probes:
        d = np.abs(z - zeros)
        if d.size and d.min() < 1e-13:
            logger.warning("nth_root_check: probe %s at a zero, skipped", z)
            continue
        loga = float(np.sum(np.log(d))) / n
        vals.append(abs(loga + float(potential(lam, z))))
    if not vals:
        raise ValueError("all probes landed on zeros")
    return float(max(vals))
