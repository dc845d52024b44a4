"""Command line scenario runner with reproducible JSON/CSV/SVG output.

Each subcommand assembles a run configuration, executes one scenario,
and writes a machine-readable ``summary.json`` into the output
directory together with CSV artifacts and, on request, an SVG picture.
Configuration precedence is command line flags over a JSON config file
over scenario defaults.  Summaries are deterministic: the same
configuration and seed produce byte-identical files, wall-clock
metadata goes to a separate ``meta.json``, and every summary embeds a
hash of the effective configuration plus the versions of the numerical
modules so archived results can be traced back to their inputs.

Scenarios
    equilibrium  weighted equilibrium measure on a fixed contour system
    scurve       max-min energy search over a family of contours
    chebotarev   minimal-capacity continuum through anchor points
    pade         diagonal Pade denominators of a branched function
    heine        Heine-Stieltjes pairs (V, Q) for A Q'' + B Q' = n(n+a-1) V Q
    szego        Szego function and oscillatory polynomial model on [-1, 1]
    verify       cross-check of equilibrium geometry against the zero
                 distribution of varying-weight orthogonal polynomials

Exit status: 0 when every declared check passed, 1 when the scenario
ran but a check failed, 2 on a usage or configuration error, 3 when the
scenario itself failed (a ``diagnostic.json`` is written in that case).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from ._backend import BACKEND
from .contours import (
    ContourSystem,
    arc_through,
    build_family,
    circle,
    segment,
    star_system,
)
from .errors import ConvergenceError, ScurvelabError
from .fields import ExternalField, log_charges, polynomial_field, zero_field
from .measures import DiscreteMeasure, solve_equilibrium
from .orthopoly import (
    BranchFunctionSpec,
    heine_stieltjes,
    laurent_moments,
    markov_sqrt_spec,
    orthopoly_varying,
    pade_denominator,
    weak_star_distance,
    zero_counting,
)
from .quaddiff import Trajectory, _anchor_integral, _bridge_integral, chebotarev_solve
from .scurve import SearchOptions, maximize_energy
from .szego import build_Wn, electrostatic_model, make_model, szego_boundary, tabulate_model_csv

logger = logging.getLogger(__name__)

SCENARIOS = ("equilibrium", "scurve", "chebotarev", "pade", "heine", "szego", "verify")

#: Per-scenario defaults for the shared solver options.  ``None`` means
#: the option is not used by that scenario.
_DEFAULTS: Dict[str, Dict[str, Optional[float]]] = {
    "equilibrium": {"n_nodes": 400, "tol": 1e-8, "max_iter": 5000,
                    "precision_bits": None, "degree": None},
    "scurve": {"n_nodes": 240, "tol": 2e-3, "max_iter": 120,
               "precision_bits": None, "degree": None},
    "chebotarev": {"n_nodes": 240, "tol": 1e-8, "max_iter": 5000,
                   "precision_bits": None, "degree": None},
    "pade": {"n_nodes": None, "tol": 1e-6, "max_iter": None,
             "precision_bits": 256, "degree": 16},
    "heine": {"n_nodes": None, "tol": 1e-11, "max_iter": None,
              "precision_bits": None, "degree": 4},
    "szego": {"n_nodes": 800, "tol": 1e-8, "max_iter": 5000,
              "precision_bits": None, "degree": 20},
    "verify": {"n_nodes": 800, "tol": 1e-8, "max_iter": 5000,
               "precision_bits": 256, "degree": None},
}


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration (usage error)."""


class ScenarioFailure(RuntimeError):
    """A scenario could not produce a result; carries a diagnostic dict."""

    def __init__(self, message: str, diagnostic: Optional[dict] = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


@dataclass
class RunConfig:
    """Effective configuration of one scenario run.

    ``field``, ``contour`` and ``params`` mirror the JSON config file:
    the first two are structured specs (see ``build_field`` and
    ``build_system``), ``params`` collects scenario-specific knobs such
    as anchors, weights or degree lists.
    """

    scenario: str
    out_dir: Path
    seed: int = 0
    n_nodes: Optional[int] = None
    tol: Optional[float] = None
    max_iter: Optional[int] = None
    precision_bits: Optional[int] = None
    degree: Optional[int] = None
    svg: bool = False
    field: Optional[dict] = None
    contour: Optional[dict] = None
    params: dict = dc_field(default_factory=dict)

    def effective_dict(self) -> dict:
        """Scientifically meaningful part of the config (hashed, embedded)."""
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "n_nodes": self.n_nodes,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "precision_bits": self.precision_bits,
            "degree": self.degree,
            "field": self.field,
            "contour": self.contour,
            "params": self.params,
        }


@dataclass
class ExitReport:
    """Outcome of ``run``: status code, written paths, and the summary."""

    scenario: str
    status: int
    ok: bool
    summary: dict
    summary_path: Optional[Path]
    artifact_paths: List[Path]
    message: str = ""


# ---------------------------------------------------------------------------
# spec parsing


def _as_complex(value, what: str = "value") -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"{what}: complex entries are [re, im] pairs")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)):
        return complex(float(value))
    raise ConfigError(f"{what}: expected a number or an [re, im] pair")


def build_field(spec: Optional[dict]) -> ExternalField:
    """External field from a config spec.

    ``{"kind": "zero"}``, ``{"kind": "polynomial", "coeffs": [...]}``
    (ascending, entries real or [re, im]), or ``{"kind": "log_charges",
    "locations": [...], "amplitudes": [...]}``.
    """
    if spec is None:
        return zero_field()
    if not isinstance(spec, dict):
        raise ConfigError("field: expected an object with a 'kind' entry")
    kind = spec.get("kind", "zero")
    if kind == "zero":
        return zero_field()
    if kind == "polynomial":
        coeffs = spec.get("coeffs")
        if not coeffs:
            raise ConfigError("field: polynomial needs nonempty 'coeffs'")
        return polynomial_field([_as_complex(c, "field.coeffs") for c in coeffs])
    if kind == "log_charges":
        locs = spec.get("locations", [])
        amps = spec.get("amplitudes", [])
        if len(locs) != len(amps) or not locs:
            raise ConfigError("field: log_charges needs matching nonempty "
                              "'locations' and 'amplitudes'")
        pairs = [(_as_complex(a, "field.locations"), float(al))
                 for a, al in zip(locs, amps)]
        return log_charges(pairs)
    raise ConfigError(f"field: unknown kind {kind!r}")


def build_system(spec: Optional[dict], default: Optional[dict] = None) -> ContourSystem:
    """Contour system from a config spec.

    ``{"kind": "segment", "a": ..., "b": ...}``, ``{"kind": "circle",
    "center": ..., "radius": ...}``, ``{"kind": "arc", "a": ..., "b":
    ..., "via": ...}`` or ``{"kind": "star", "anchors": [...],
    "junction": ...}``.
    """
    if spec is None:
        spec = default
    if spec is None:
        raise ConfigError("contour: no specification given")
    if not isinstance(spec, dict):
        raise ConfigError("contour: expected an object with a 'kind' entry")
    kind = spec.get("kind")
    if kind == "segment":
        return segment(_as_complex(spec.get("a", -1.0), "contour.a"),
                       _as_complex(spec.get("b", 1.0), "contour.b"))
    if kind == "circle":
        radius = float(spec.get("radius", 1.0))
        if radius <= 0:
            raise ConfigError("contour: circle radius must be positive")
        return circle(_as_complex(spec.get("center", 0.0), "contour.center"), radius)
    if kind == "arc":
        return arc_through(_as_complex(spec.get("a", -1.0), "contour.a"),
                           _as_complex(spec.get("b", 1.0), "contour.b"),
                           _as_complex(spec.get("via", 0.35j), "contour.via"))
    if kind == "star":
        anchors = spec.get("anchors")
        if not anchors or len(anchors) < 2:
            raise ConfigError("contour: star needs at least two anchors")
        pts = [_as_complex(a, "contour.anchors") for a in anchors]
        junction = spec.get("junction")
        jc = (_as_complex(junction, "contour.junction") if junction is not None
              else sum(pts) / len(pts))
        return star_system(pts, jc)
    raise ConfigError(f"contour: unknown kind {spec.get('kind')!r}")


def build_branch_function(spec: Optional[dict]) -> BranchFunctionSpec:
    """Branched function from a config spec.

    ``{"kind": "markov_sqrt"}`` is 1/sqrt(z^2 - 1) on the cut [-1, 1];
    ``{"kind": "rational", "num": [...], "den": [...]}`` is a rational
    function; ``{"kind": "branch", "points": [[re, im, alpha], ...],
    "num": [...], "den": [...]}`` is the general product form.
    """
    if spec is None:
        return markov_sqrt_spec()
    if not isinstance(spec, dict):
        raise ConfigError("function: expected an object with a 'kind' entry")
    kind = spec.get("kind", "markov_sqrt")
    if kind == "markov_sqrt":
        return markov_sqrt_spec()
    num = tuple(_as_complex(c, "function.num") for c in spec.get("num", [1.0]))
    den = tuple(_as_complex(c, "function.den") for c in spec.get("den", [1.0]))
    if kind == "rational":
        f = BranchFunctionSpec(branch_points=(), num=num, den=den)
    elif kind == "branch":
        pts = []
        for row in spec.get("points", []):
            if not isinstance(row, (list, tuple)) or len(row) != 3:
                raise ConfigError("function: branch points are [re, im, alpha] rows")
            pts.append((complex(float(row[0]), float(row[1])), float(row[2])))
        f = BranchFunctionSpec(branch_points=tuple(pts), num=num, den=den)
    else:
        raise ConfigError(f"function: unknown kind {kind!r}")
    try:
        f.validate()
    except ValueError as exc:
        raise ConfigError(f"function: {exc}") from exc
    return f


_WEIGHT_KINDS = ("one", "semicircle", "parabola", "polynomial", "power")


def build_weight(spec: Optional[dict]):
    """Weight on [-1, 1] from a config spec; returns a vectorized callable.

    Kinds: ``one`` (w = 1), ``semicircle`` (sqrt(1 - x^2)), ``parabola``
    (1 - x^2), ``polynomial`` with real ascending ``coeffs``, ``power``
    with ``a``, ``b``, ``scale`` for scale (1-x)^a (1+x)^b.
    """
    if spec is None:
        spec = {"kind": "one"}
    if not isinstance(spec, dict):
        raise ConfigError("weight: expected an object with a 'kind' entry")
    kind = spec.get("kind", "one")
    if kind == "one":
        return lambda x: np.ones_like(np.asarray(x, dtype=float))
    if kind == "semicircle":
        return lambda x: np.sqrt(np.clip(1.0 - np.asarray(x, dtype=float) ** 2, 0.0, None))
    if kind == "parabola":
        return lambda x: 1.0 - np.asarray(x, dtype=float) ** 2
    if kind == "polynomial":
        coeffs = spec.get("coeffs")
        if not coeffs:
            raise ConfigError("weight: polynomial needs nonempty 'coeffs'")
        cs = np.asarray([float(c) for c in coeffs])
        return lambda x: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), cs)
    if kind == "power":
        a = float(spec.get("a", 0.0))
        b = float(spec.get("b", 0.0))
        scale = float(spec.get("scale", 1.0))
        if scale <= 0:
            raise ConfigError("weight: power scale must be positive")

        def w(x):
            x = np.asarray(x, dtype=float)
            return scale * np.clip(1.0 - x, 0.0, None) ** a * np.clip(1.0 + x, 0.0, None) ** b

        return w
    raise ConfigError(f"weight: unknown kind {kind!r}; expected one of {_WEIGHT_KINDS}")


# ---------------------------------------------------------------------------
# serialization helpers


def _jsonable(value):
    """Recursively convert numpy scalars/arrays and complex numbers."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, complex):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if value is None or isinstance(value, str):
        return value
    return str(value)


def _canonical_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def config_hash(config: RunConfig) -> str:
    """Stable hash of the effective configuration (output dir excluded)."""
    return hashlib.sha256(_canonical_json(config.effective_dict()).encode()).hexdigest()


def _versions() -> dict:
    import mpmath
    import scipy

    return {
        "scurvelab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
        "kernel_backend": BACKEND,
    }


def _check(value: float, bound: float, minimum: bool = False) -> dict:
    """One declared tolerance: pass iff value <= bound (or >= for minimum)."""
    value = float(value)
    bound = float(bound)
    passed = value >= bound if minimum else value <= bound
    return {"value": value, "bound": bound,
            "direction": "min" if minimum else "max", "passed": bool(passed)}


# ---------------------------------------------------------------------------
# SVG rendering


_PALETTE = ("#1f3a5f", "#a63a2e", "#2e7d4f", "#8a6d1a", "#5b3a8a", "#36607d")
_SVG_SIZE = 640


def _artifact_points(art) -> np.ndarray:
    if isinstance(art, ContourSystem):
        return np.concatenate([arc.control for arc in art.arcs])
    if isinstance(art, Trajectory):
        return np.asarray(art.points, dtype=complex)
    if isinstance(art, DiscreteMeasure):
        return np.asarray(art.nodes, dtype=complex)
    return np.asarray(art, dtype=complex).ravel()


def _fmt(x: float) -> str:
    out = f"{x:.6g}"
    return "0" if out == "-0" else out


def _path_d(points: np.ndarray, closed: bool = False) -> str:
    cmds = [f"M {_fmt(points[0].real)},{_fmt(-points[0].imag)}"]
    cmds += [f"L {_fmt(z.real)},{_fmt(-z.imag)}" for z in points[1:]]
    if closed:
        cmds.append("Z")
    return " ".join(cmds)


def render_svg(artifacts, out_path) -> Path:
    """Deterministic SVG of contours, trajectories and measures.

    The viewBox covers the data bounds plus a five percent margin;
    artifacts cycle through a fixed palette in input order.  Contour
    systems and trajectories become path elements, discrete measures one
    circle per node with radius proportional to the node weight.  The
    same artifact list always produces the same bytes.
    """
    pts = np.concatenate([_artifact_points(a) for a in artifacts]) if artifacts \
        else np.zeros(1, dtype=complex)
    xs, ys = pts.real, -pts.imag
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    span = max(x1 - x0, y1 - y0, 1e-6)
    pad = 0.05 * span
    view = (x0 - pad, y0 - pad, (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad)
    stroke = 0.008 * span
    rmax = 0.025 * span

    body: List[str] = []
    for i, art in enumerate(artifacts):
        color = _PALETTE[i % len(_PALETTE)]
        if isinstance(art, ContourSystem):
            for arc in art.arcs:
                body.append(
                    f'<path d="{_path_d(arc.control, closed=arc.closed)}" '
                    f'fill="none" stroke="{color}" stroke-width="{_fmt(stroke)}"/>'
                )
        elif isinstance(art, Trajectory):
            body.append(
                f'<path d="{_path_d(np.asarray(art.points, dtype=complex))}" '
                f'fill="none" stroke="{color}" stroke-width="{_fmt(stroke)}"/>'
            )
        elif isinstance(art, DiscreteMeasure):
            wmax = float(np.max(art.weights)) if art.nodes.size else 0.0
            scale = rmax / wmax if wmax > 0 else 0.0
            circles = "".join(
                f'<circle cx="{_fmt(z.real)}" cy="{_fmt(-z.imag)}" '
                f'r="{_fmt(w * scale)}"/>'
                for z, w in zip(art.nodes, art.weights)
            )
            body.append(f'<g fill="{color}" fill-opacity="0.8">{circles}</g>')
        else:
            body.append(
                f'<path d="{_path_d(np.asarray(art, dtype=complex).ravel())}" '
                f'fill="none" stroke="{color}" stroke-width="{_fmt(stroke)}"/>'
            )

    text = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_SIZE}" '
        f'height="{_SVG_SIZE}" viewBox="{_fmt(view[0])} {_fmt(view[1])} '
        f'{_fmt(view[2])} {_fmt(view[3])}">\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )
    out_path = Path(out_path)
    out_path.write_text(text)
    return out_path


# ---------------------------------------------------------------------------
# scenario handlers: each returns (results, checks, files, drawables)


def _solve_with_partial(system, fld, mass, cfg):
    try:
        return solve_equilibrium(system, fld, mass=mass, n_nodes=cfg.n_nodes,
                                 tol=cfg.tol, max_iter=cfg.max_iter)
    except ConvergenceError as exc:
        if exc.result is None:
            raise
        logger.warning("equilibrium solve hit the iteration cap")
        return exc.result


def _run_equilibrium(cfg: RunConfig):
    system = build_system(cfg.contour, default={"kind": "segment", "a": -1.0, "b": 1.0})
    fld = build_field(cfg.field)
    mass = float(cfg.params.get("mass", 1.0))
    if mass <= 0:
        raise ConfigError("params.mass must be positive")
    res = _solve_with_partial(system, fld, mass, cfg)
    sup = res.support_nodes()
    results = res.summary_dict()
    if sup.size:
        results["support_min_re"] = float(sup.real.min())
        results["support_max_re"] = float(sup.real.max())
    checks = {
        "equality_residual": _check(res.residual_eq, cfg.tol),
        "inequality_residual": _check(res.residual_ineq, cfg.tol),
    }
    files = [("measure.csv", res.measure.to_csv())]
    return results, checks, files, [system, res.measure]


def _run_scurve(cfg: RunConfig):
    system = build_system(cfg.contour,
                          default={"kind": "arc", "a": -1.0, "b": 1.0, "via": [0.0, 0.35]})
    groups = cfg.params.get("junctions", [])
    try:
        family = build_family(system,
                              junction_groups=[[tuple(int(v) for v in p) for p in g]
                                               for g in groups])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"params.junctions: {exc}") from exc
    fld = build_field(cfg.field)
    extra = dict(cfg.params.get("search", {}))
    known = set(SearchOptions.__dataclass_fields__) - {"tol", "max_iter", "n_nodes"}
    unknown = set(extra) - known
    if unknown:
        raise ConfigError(f"params.search: unknown options {sorted(unknown)}")
    opts = SearchOptions(tol=cfg.tol, max_iter=cfg.max_iter, n_nodes=cfg.n_nodes, **extra)
    result = maximize_energy(family, fld, opts)
    results = result.summary_dict()
    checks = {"max_variation_residual": _check(
        results["max_variation_residual"], cfg.tol)}
    files = [
        ("trace.csv", result.trace_csv()),
        ("measure.csv", result.equilibrium.measure.to_csv()),
        ("contour.csv", _system_csv(result.contour)),
    ]
    return results, checks, files, [result.contour, result.equilibrium.measure]


def _system_csv(system: ContourSystem) -> str:
    lines = ["arc,re,im"]
    for k, arc in enumerate(system.arcs):
        lines += [f"{k},{z.real:.17g},{z.imag:.17g}" for z in arc.control]
    return "\n".join(lines) + "\n"


_CUBE_ROOTS = [[1.0, 0.0], [-0.5, np.sqrt(3.0) / 2], [-0.5, -np.sqrt(3.0) / 2]]


def _run_chebotarev(cfg: RunConfig):
    anchors = [_as_complex(a, "params.anchors")
               for a in cfg.params.get("anchors", _CUBE_ROOTS)]
    vcoef, system = chebotarev_solve(anchors, tol=cfg.tol, n_nodes=cfg.n_nodes)
    anchors_arr = np.asarray(anchors, dtype=complex)
    zeros = (np.roots(np.asarray(vcoef, dtype=complex)[::-1])
             if len(vcoef) > 1 else np.zeros(0, dtype=complex))

    # real-period residuals: for two anchors V is constant and the chord
    # itself is the continuum, so the condition is vacuous
    residual = 0.0
    vc = np.asarray(vcoef, dtype=complex)
    if zeros.size:
        for a in anchors_arr:
            v = zeros[np.argmin(np.abs(zeros - a))]
            residual = max(residual, abs(_anchor_integral(vc, anchors_arr, a, v).real))
        if zeros.size == 2 and abs(zeros[0] - zeros[1]) > 1e-9:
            residual = max(residual, abs(_bridge_integral(
                vc, anchors_arr, zeros[0], zeros[1]).real))

    eq = _solve_with_partial(system, zero_field(), 1.0,
                             RunConfig(scenario=cfg.scenario, out_dir=cfg.out_dir,
                                       n_nodes=cfg.n_nodes, tol=min(cfg.tol, 1e-8),
                                       max_iter=cfg.max_iter))
    results = {
        "anchors": [ [a.real, a.imag] for a in anchors_arr ],
        "v_coefficients": [[c.real, c.imag] for c in np.asarray(vcoef, dtype=complex)],
        "junction_zeros": [[z.real, z.imag] for z in zeros],
        "max_abs_junction": float(np.max(np.abs(zeros))) if zeros.size else 0.0,
        "period_residual": float(residual),
        "energy": float(eq.energy),
        "robin_constant": float(eq.constant_w),
        "capacity": float(np.exp(-eq.constant_w)),
    }
    checks = {
        "period_residual": _check(residual, max(cfg.tol, 1e-8)),
        "equality_residual": _check(eq.residual_eq, 1e-6),
    }
    uniform = DiscreteMeasure(anchors_arr, np.full(anchors_arr.size, 1.0 / anchors_arr.size))
    files = [("continuum.csv", _system_csv(system)), ("measure.csv", eq.measure.to_csv())]
    return results, checks, files, [system, eq.measure, uniform]


def _run_pade(cfg: RunConfig):
    fspec = build_branch_function(cfg.params.get("function"))
    n = cfg.degree
    if n < 1:
        raise ConfigError("degree must be at least 1")
    moments = laurent_moments(fspec, n, precision=cfg.precision_bits)
    rec = pade_denominator(moments, n)
    zeros = rec.zeros_complex()
    results = {
        "degree": rec.degree,
        "requested_degree": n,
        "precision_bits": cfg.precision_bits,
        "moment_residual": float(rec.moment_residual),
        "zeros": [[z.real, z.imag] for z in zeros],
    }
    checks = {"moment_residual": _check(rec.moment_residual, cfg.tol)}
    fn_spec = cfg.params.get("function") or {"kind": "markov_sqrt"}
    is_markov = fn_spec.get("kind", "markov_sqrt") == "markov_sqrt"
    if is_markov and rec.degree >= 1:
        excess = float(np.max(np.maximum(np.abs(zeros.imag),
                                         np.abs(zeros.real) - 1.0), initial=0.0))
        # exact arcsine potential of [-1, 1] at z = 2: log 2 - log(2 + sqrt 3)
        ref = np.log(2.0) - np.log(2.0 + np.sqrt(3.0))
        nth_root = abs(float(np.mean(np.log(np.abs(2.0 - zeros)))) + ref) \
            if zeros.size else np.inf
        results["zero_excess"] = excess
        results["nth_root_deviation_at_2"] = nth_root
        checks["zero_excess"] = _check(excess, 1e-8)
        checks["nth_root_deviation_at_2"] = _check(nth_root, 2.0 / rec.degree)
    files = [("zeros.csv", "re,im\n" + "".join(
        f"{z.real:.17g},{z.imag:.17g}\n" for z in zeros))]
    drawables = [segment(-1.0, 1.0), zero_counting(rec)] if is_markov \
        else ([zero_counting(rec)] if zeros.size else [])
    return results, checks, files, drawables


def _run_heine(cfg: RunConfig):
    acoef = [_as_complex(c, "params.A") for c in cfg.params.get("A", [-1.0, 0.0, 1.0])]
    bcoef = [_as_complex(c, "params.B") for c in cfg.params.get("B", [0.0, 2.0])]
    n = cfg.degree
    if n < 1:
        raise ConfigError("degree must be at least 1")
    try:
        sols = heine_stieltjes(acoef, bcoef, n,
                               n_random=int(cfg.params.get("n_random", 16)),
                               seed=cfg.seed, tol=cfg.tol)
    except ValueError as exc:
        raise ConfigError(f"heine: {exc}") from exc
    sol_rows = []
    max_res = 0.0
    for vcoef, rec in sols:
        max_res = max(max_res, float(rec.moment_residual))
        sol_rows.append({
            "v_coefficients": [[c.real, c.imag] for c in np.asarray(vcoef, dtype=complex)],
            "q_zeros": [[z.real, z.imag] for z in rec.zeros_complex()],
            "residual": float(rec.moment_residual),
        })
    results = {
        "degree": n,
        "n_solutions": len(sols),
        "max_residual": max_res,
        "solutions": sol_rows,
    }
    checks = {
        "solution_count": _check(len(sols), 1, minimum=True),
        "max_residual": _check(max_res, max(cfg.tol * 100, 1e-9)),
    }
    lines = ["solution,re,im"]
    for i, (_, rec) in enumerate(sols):
        lines += [f"{i},{z.real:.17g},{z.imag:.17g}" for z in rec.zeros_complex()]
    files = [("zeros.csv", "\n".join(lines) + "\n")]
    anchors = np.roots(np.asarray(acoef, dtype=complex)[::-1])
    drawables = [DiscreteMeasure(anchors, np.full(anchors.size, 1.0 / anchors.size))]
    if sols:
        zs = sols[0][1].zeros_complex()
        if zs.size:
            drawables.append(DiscreteMeasure(zs, np.full(zs.size, 1.0 / zs.size)))
    return results, checks, files, drawables


def _run_szego(cfg: RunConfig):
    weight = build_weight(cfg.params.get("weight"))
    n = cfg.degree
    if n < 1:
        raise ConfigError("degree must be at least 1")
    model = make_model(weight, n, n_nodes=cfg.n_nodes, tol=cfg.tol)
    xs = np.array([-0.8, -0.5, 0.0, 0.5, 0.8])
    plus = szego_boundary(model.D_eval, xs, side=+1)
    boundary_residual = float(np.max(np.abs(np.abs(plus) ** (-2.0) - weight(xs))))
    lam, _, phase = electrostatic_model(model)
    w2 = complex(build_Wn(model, np.array([2.0 + 0.0j]))[0])
    results = model.summary_dict()
    results.update({
        "boundary_residual": boundary_residual,
        "W_at_2": [w2.real, w2.imag],
        "phase_total_over_pi": float(phase(np.array([-1.0]))[0] / np.pi),
    })
    checks = {
        "boundary_residual": _check(boundary_residual, 1e-4),
        "mass_error": _check(abs(lam.mass - n), 1e-9),
        "phase_total_error": _check(abs(results["phase_total_over_pi"] - n), 1e-9),
    }
    grid = np.linspace(-0.95, 0.95, 39)
    files = [("model.csv", tabulate_model_csv(model, grid)),
             ("measure.csv", lam.to_csv())]
    return results, checks, files, [segment(-1.0, 1.0), lam]


def _run_verify(cfg: RunConfig):
    field_spec = cfg.field or {"kind": "polynomial", "coeffs": [0.0, 0.0, 1.0]}
    fld = build_field(field_spec)
    half = float(cfg.params.get("half_length", 3.0))
    if half <= 0:
        raise ConfigError("params.half_length must be positive")
    system = segment(-half, half)
    eq = _solve_with_partial(system, fld, 1.0, cfg)
    sup = eq.support_nodes()
    if sup.size == 0:
        raise ScenarioFailure("equilibrium support is empty",
                              {"summary": eq.summary_dict()})
    a_minus, a_plus = float(sup.real.min()), float(sup.real.max())

    degrees = [int(d) for d in cfg.params.get("degrees", [4, 8, 12])]
    if len(degrees) < 2 or any(d < 1 for d in degrees) or sorted(degrees) != degrees:
        raise ConfigError("params.degrees must be an increasing list of degrees")
    fspec = markov_sqrt_spec()
    probes = np.array([2.2 + 0.0j, -2.2 + 0.0j, 1.8j, 1.4 + 1.4j]) * max(half / 3.0, 1.0)
    distances, residuals, zero_rows = [], [], []
    last_rec = None
    for n in degrees:
        rec = orthopoly_varying(system, fspec, fld, n, precision=cfg.precision_bits)
        counting = zero_counting(rec)
        distances.append(float(weak_star_distance(counting, eq.measure, probes)))
        residuals.append(float(rec.moment_residual))
        zero_rows += [f"{n},{z.real:.17g},{z.imag:.17g}" for z in rec.zeros_complex()]
        last_rec = rec
    drops = [distances[i] - distances[i + 1] for i in range(len(distances) - 1)]
    strictly_decreasing = bool(min(drops) > 0.0)

    results = {
        "equilibrium": eq.summary_dict(),
        "support_endpoints": [a_minus, a_plus],
        "degrees": degrees,
        "weak_star_distances": distances,
        "weak_star_strictly_decreasing": strictly_decreasing,
        "moment_residuals": residuals,
    }
    checks = {
        "equality_residual": _check(eq.residual_eq, cfg.tol),
        "weak_star_decrease": _check(min(drops), 0.0, minimum=True),
        "moment_residual": _check(max(residuals), 1e-6),
    }
    expected = cfg.params.get("expected_endpoints")
    if expected is None and field_spec.get("kind") == "polynomial" \
            and [float(c) for c in field_spec.get("coeffs", [])] == [0.0, 0.0, 1.0]:
        expected = [-1.0, 1.0]
    if expected is not None:
        dev = max(abs(a_minus - float(expected[0])), abs(a_plus - float(expected[1])))
        results["endpoint_deviation"] = dev
        checks["endpoint_deviation"] = _check(dev, float(cfg.params.get(
            "endpoint_tol", 5e-2)))
    files = [
        ("measure.csv", eq.measure.to_csv()),
        ("distances.csv", "degree,weak_star_distance\n" + "".join(
            f"{n},{d:.17g}\n" for n, d in zip(degrees, distances))),
        ("zeros.csv", "degree,re,im\n" + "\n".join(zero_rows) + ("\n" if zero_rows else "")),
    ]
    drawables = [system, eq.measure]
    if last_rec is not None and last_rec.zeros_complex().size:
        drawables.append(zero_counting(last_rec))
    return results, checks, files, drawables


_HANDLERS = {
    "equilibrium": _run_equilibrium,
    "scurve": _run_scurve,
    "chebotarev": _run_chebotarev,
    "pade": _run_pade,
    "heine": _run_heine,
    "szego": _run_szego,
    "verify": _run_verify,
}


# ---------------------------------------------------------------------------
# configuration assembly and the runner


def default_out_dir() -> Path:
    return Path(os.environ.get("SCURVELAB_OUT", "scurvelab_out"))


def load_config(scenario: str, args: argparse.Namespace) -> RunConfig:
    """Merge scenario defaults, an optional JSON config file, and flags."""
    base = dict(_DEFAULTS[scenario])
    merged = {
        "seed": 0, "svg": False, "field": None, "contour": None, "params": {},
        "out_dir": None, **base,
    }
    if args.config is not None:
        path = Path(args.config)
        try:
            loaded = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        file_scenario = loaded.pop("scenario", scenario)
        if file_scenario != scenario:
            raise ConfigError(
                f"config file is for scenario {file_scenario!r}, not {scenario!r}")
        unknown = set(loaded) - set(merged)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update(loaded)
    for flag, key in (("out", "out_dir"), ("seed", "seed"), ("nodes", "n_nodes"),
                      ("tol", "tol"), ("precision", "precision_bits"),
                      ("degree", "degree")):
        value = getattr(args, flag, None)
        if value is not None:
            merged[key] = value
    if args.svg:
        merged["svg"] = True

    def _opt(key, cast, positive=True):
        v = merged.get(key)
        if v is None:
            return None
        try:
            v = cast(v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key} must be a {cast.__name__}") from exc
        if positive and v <= 0:
            raise ConfigError(f"{key} must be positive")
        return v

    seed = merged.get("seed", 0)
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    params = merged.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigError("params must be an object")
    out_dir = Path(merged["out_dir"]) if merged.get("out_dir") else default_out_dir()
    return RunConfig(
        scenario=scenario,
        out_dir=out_dir,
        seed=int(seed),
        n_nodes=_opt("n_nodes", int),
        tol=_opt("tol", float),
        max_iter=_opt("max_iter", int),
        precision_bits=_opt("precision_bits", int),
        degree=_opt("degree", int),
        svg=bool(merged.get("svg", False)),
        field=merged.get("field"),
        contour=merged.get("contour"),
        params=params,
    )


def run(config: RunConfig) -> ExitReport:
    """Execute one scenario and write summary, metadata, and artifacts.

    The JSON summary is deterministic for a fixed configuration and
    seed; timestamps and timing live in ``meta.json``.  All randomness
    used by a scenario flows from ``config.seed``, which the summary
    records.
    """
    if config.scenario not in _HANDLERS:
        raise ConfigError(f"unknown scenario {config.scenario!r}")
    chash = config_hash(config)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()

    def _meta():
        return {
            "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "elapsed_seconds": round(time.monotonic() - started, 3),
            "out_dir": str(out),
        }

    try:
        results, checks, file_texts, drawables = _HANDLERS[config.scenario](config)
    except ConfigError:
        raise
    except (ScenarioFailure, ScurvelabError, ValueError) as exc:
        diagnostic = {
            "scenario": config.scenario,
            "config": _jsonable(config.effective_dict()),
            "config_hash": chash,
            "error": type(exc).__name__,
            "message": str(exc),
        }
        partial = getattr(exc, "result", None)
        if partial is not None and hasattr(partial, "summary_dict"):
            diagnostic["partial"] = _jsonable(partial.summary_dict())
        if isinstance(exc, ScenarioFailure):
            diagnostic.update(_jsonable(exc.diagnostic))
        diag_path = out / "diagnostic.json"
        diag_path.write_text(json.dumps(diagnostic, sort_keys=True, indent=2) + "\n")
        (out / "meta.json").write_text(json.dumps(_meta(), indent=2) + "\n")
        logger.error("%s failed: %s", config.scenario, exc)
        return ExitReport(scenario=config.scenario, status=3, ok=False,
                          summary=diagnostic, summary_path=diag_path,
                          artifact_paths=[], message=str(exc))

    ok = all(c["passed"] for c in checks.values())
    summary = {
        "scenario": config.scenario,
        "config": _jsonable(config.effective_dict()),
        "config_hash": chash,
        "seed": config.seed,
        "versions": _versions(),
        "results": _jsonable(results),
        "checks": checks,
        "all_checks_passed": bool(ok),
    }
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")

    paths = []
    for name, text in file_texts:
        p = out / name
        p.write_text(text)
        paths.append(p)
    if config.svg and drawables:
        paths.append(render_svg(drawables, out / "scene.svg"))
    (out / "meta.json").write_text(json.dumps(_meta(), indent=2) + "\n")

    return ExitReport(scenario=config.scenario, status=0 if ok else 1, ok=ok,
                      summary=summary, summary_path=summary_path,
                      artifact_paths=paths,
                      message="all checks passed" if ok else "some checks failed")


def make_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", metavar="PATH", help="JSON configuration file")
    shared.add_argument("--out", metavar="DIR",
                        help="output directory (default: $SCURVELAB_OUT or ./scurvelab_out)")
    shared.add_argument("--seed", type=int, metavar="N", help="RNG seed (default 0)")
    shared.add_argument("--precision", type=int, metavar="BITS",
                        help="working precision in bits for extended-precision scenarios")
    shared.add_argument("--nodes", type=int, metavar="N", help="discretization node count")
    shared.add_argument("--tol", type=float, metavar="X", help="solver tolerance")
    shared.add_argument("--degree", type=int, metavar="N",
                        help="polynomial degree (pade, heine, szego)")
    shared.add_argument("--svg", action="store_true", help="also write an SVG scene")

    parser = argparse.ArgumentParser(
        prog="scurvelab",
        description="Numerical workbench for weighted equilibrium problems "
                    "on curve systems.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="scenario", required=True)
    descriptions = {
        "equilibrium": "equilibrium measure on a fixed contour system",
        "scurve": "max-min energy search over a contour family",
        "chebotarev": "minimal-capacity continuum through anchors",
        "pade": "diagonal Pade denominators of a branched function",
        "heine": "Heine-Stieltjes polynomial pairs",
        "szego": "Szego function and oscillatory model on [-1, 1]",
        "verify": "equilibrium vs orthogonal polynomial cross-check",
    }
    for name in SCENARIOS:
        sub.add_parser(name, parents=[shared], help=descriptions[name])
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.scenario, args)
        report = run(config)
    except ConfigError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    line = f"[{report.scenario}] {report.message}"
    if report.summary_path is not None:
        line += f" ({report.summary_path})"
    stream = sys.stdout if report.ok else sys.stderr
    print(line, file=stream)
    return report.status


if __name__ == "__main__":
    sys.exit(main())
