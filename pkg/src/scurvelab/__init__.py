"""Numerical workbench for weighted logarithmic potential theory on
curve systems: equilibrium measures, S-curves, quadratic differentials,
and the classical polynomial cross-checks."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .contours import (
    Arc,
    ContourSystem,
    Quadrature,
    arc_through,
    build_family,
    circle,
    discretize,
    hausdorff_distance,
    segment,
    star_system,
)
from .errors import (
    CollapseError,
    ConvergenceError,
    DegenerateConfigError,
    ScurvelabError,
    SingularFieldError,
    UnboundedEnergyError,
)
from .fields import ExternalField, log_charges, polynomial_field, zero_field
from .measures import (
    DiscreteMeasure,
    EquilibriumResult,
    cauchy_transform,
    discrete_energy,
    potential,
    solve_equilibrium,
    solve_on,
    weighted_energy,
)
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
from .quaddiff import (
    QuadDiff,
    Trajectory,
    build_R,
    chebotarev_solve,
    fit_rational_R,
    period,
    rational_R,
    trace_trajectory,
)
from .scurve import (
    SCurveResult,
    SearchOptions,
    energy_variation,
    finite_diff_variation,
    maximize_energy,
    sproperty_residual,
)
from .szego import (
    SzegoFunction,
    SzegoModel,
    build_Wn,
    compare_interior,
    electrostatic_model,
    make_model,
    szego_boundary,
    szego_function,
)

__all__ = [
    "BACKEND",
    "__version__",
    "Arc",
    "ContourSystem",
    "Quadrature",
    "arc_through",
    "build_family",
    "circle",
    "discretize",
    "hausdorff_distance",
    "segment",
    "star_system",
    "CollapseError",
    "ConvergenceError",
    "DegenerateConfigError",
    "ScurvelabError",
    "SingularFieldError",
    "UnboundedEnergyError",
    "ExternalField",
    "log_charges",
    "polynomial_field",
    "zero_field",
    "DiscreteMeasure",
    "EquilibriumResult",
    "cauchy_transform",
    "discrete_energy",
    "weighted_energy",
    "potential",
    "solve_equilibrium",
    "solve_on",
    "BranchFunctionSpec",
    "heine_stieltjes",
    "laurent_moments",
    "markov_sqrt_spec",
    "orthopoly_varying",
    "pade_denominator",
    "weak_star_distance",
    "zero_counting",
    "QuadDiff",
    "Trajectory",
    "build_R",
    "chebotarev_solve",
    "fit_rational_R",
    "period",
    "rational_R",
    "trace_trajectory",
    "SCurveResult",
    "SearchOptions",
    "energy_variation",
    "finite_diff_variation",
    "maximize_energy",
    "sproperty_residual",
    "SzegoFunction",
    "SzegoModel",
    "build_Wn",
    "compare_interior",
    "electrostatic_model",
    "make_model",
    "szego_boundary",
    "szego_function",
]
