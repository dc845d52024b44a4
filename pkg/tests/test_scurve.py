"""Tests for energy variations, S-property diagnostics, and the search."""

import dataclasses

import numpy as np
import pytest

from scurvelab.contours import (
    AnalyticVariation,
    arc_through,
    build_family,
    bump_field,
    circle,
    hausdorff_distance,
    schiffer_field,
    segment,
)
from scurvelab.errors import (
    CollapseError,
    SingularFieldError,
    UnboundedEnergyError,
)
from scurvelab.fields import log_charges, polynomial_field, zero_field
from scurvelab.measures import solve_equilibrium
from scurvelab.scurve import (
    SearchOptions,
    critical_residual,
    energy_variation,
    finite_diff_variation,
    maximize_energy,
    sproperty_residual,
    variation_basis,
)

from oracles import ARCSINE_W


@pytest.fixture(scope="module")
def segment_equilibrium():
    seg = segment(-1.0, 1.0, n_ctrl=9)
    return seg, solve_equilibrium(seg, zero_field(), n_nodes=240)


class TestEnergyVariation:
    def test_translation_leaves_energy_unchanged(self, segment_equilibrium):
        _, eq = segment_equilibrium
        h = AnalyticVariation(lambda z: np.ones_like(z),
                              lambda z: np.zeros_like(z))
        assert energy_variation(eq.measure, zero_field(), h) == 0.0

    def test_dilation_derivative_is_minus_one(self, segment_equilibrium):
        # E[cK] = E[K] - log c for unit mass, so d/dt E[(1+t)K] = -1 at t=0
        _, eq = segment_equilibrium
        h = AnalyticVariation(lambda z: z, lambda z: np.ones_like(z))
        assert energy_variation(eq.measure, zero_field(), h) == pytest.approx(
            -1.0, abs=1e-12)

    def test_normal_bump_vanishes_at_critical_segment(self,
                                                      segment_equilibrium):
        _, eq = segment_equilibrium
        h = bump_field(0.0, 0.6, direction=1.0j)
        assert abs(energy_variation(eq.measure, zero_field(), h)) <= 2e-3

    def test_singular_field_evaluation_raises(self, segment_equilibrium):
        _, eq = segment_equilibrium
        bad = log_charges([(complex(eq.measure.nodes[3]), 1.0)])
        h = bump_field(0.0, 0.6, direction=1.0j)
        with pytest.raises(SingularFieldError):
            energy_variation(eq.measure, bad, h)


class TestCriticalResidual:
    def test_segment_is_critical_for_bump_basis(self, segment_equilibrium):
        seg, eq = segment_equilibrium
        family = build_family(seg)
        basis = variation_basis(seg, family, zero_field())
        res = critical_residual(eq.measure, zero_field(), basis)
        assert len(res) == len(basis) > 0
        assert max(abs(r) for r in res) <= 2e-3


class TestFiniteDifferenceConsistency:
    def test_bump_on_bulged_arc(self):
        arc = arc_through(-1.0, 1.0, 0.35j, n_ctrl=9)
        eq = solve_equilibrium(arc, zero_field(), n_nodes=240)
        h = bump_field(0.35j, 0.6, direction=-1.0j)
        ev = energy_variation(eq.measure, zero_field(), h)
        d1 = finite_diff_variation(arc, zero_field(), h, 2e-3, n_nodes=240)
        d2 = finite_diff_variation(arc, zero_field(), h, 1e-3, n_nodes=240)
        assert ev > 0.05  # flattening the bulge raises the energy
        assert abs((2 * d2 - d1) - ev) <= 1e-2

    def test_schiffer_on_bulged_arc(self):
        arc = arc_through(-1.0, 1.0, 0.35j, n_ctrl=9)
        eq = solve_equilibrium(arc, zero_field(), n_nodes=240)
        h = schiffer_field(2.0 + 1.0j, [-1.0, 1.0])
        ev = energy_variation(eq.measure, zero_field(), h)
        d1 = finite_diff_variation(arc, zero_field(), h, 2e-3, n_nodes=240)
        d2 = finite_diff_variation(arc, zero_field(), h, 1e-3, n_nodes=240)
        assert abs((2 * d2 - d1) - ev) <= 1e-3

    def test_tangential_bump_with_external_field(self):
        seg = segment(-0.5, 1.5, n_ctrl=9)
        fld = polynomial_field([0.0, 0.0, 1.0])
        eq = solve_equilibrium(seg, fld, n_nodes=240)
        h = bump_field(0.5, 0.8, direction=1.0)
        ev = energy_variation(eq.measure, fld, h)
        fd = finite_diff_variation(seg, fld, h, 1e-3, n_nodes=240)
        # sliding nodes along the segment leaves the set unchanged
        assert fd == pytest.approx(0.0, abs=1e-10)
        assert abs(ev - fd) <= 5e-3


class TestSProperty:
    def test_segment_residual_is_at_discretization_floor(
            self, segment_equilibrium):
        _, eq = segment_equilibrium
        assert sproperty_residual(eq) <= 1e-9

    def test_circle_with_central_charge_is_an_s_curve(self):
        circ = circle(0.0, 1.0)
        fld = log_charges([(0.0, -0.5)])
        eq = solve_equilibrium(circ, fld, n_nodes=200)
        # uniform equilibrium measure by symmetry
        assert np.std(eq.measure.weights) <= 1e-8
        assert sproperty_residual(eq, circ, fld) <= 5e-2


class TestSearch:
    def test_bulged_arc_flattens_to_segment(self):
        family = build_family(arc_through(-1.0, 1.0, 0.35j))
        res = maximize_energy(family, zero_field(),
                              SearchOptions(n_nodes=160, max_iter=80,
                                            tol=5e-3))
        assert res.converged
        assert res.equilibrium.energy == pytest.approx(ARCSINE_W, abs=5e-3)
        assert hausdorff_distance(res.contour, segment(-1.0, 1.0)) <= 2e-2
        energies = [e for _, e in res.trace]
        assert energies[-1] >= energies[0]

    def test_snapshots_recorded_on_request(self):
        family = build_family(arc_through(-1.0, 1.0, 0.35j))
        opts = SearchOptions(n_nodes=160, max_iter=80, tol=5e-3,
                             record_every=5)
        res = maximize_energy(family, zero_field(), opts)
        assert len(res.snapshots) > 0

    def test_attracting_charge_collapses_contour(self):
        family = build_family(circle(0.0, 1.0))
        with pytest.raises(CollapseError, match="collapse detected") as ei:
            maximize_energy(family, log_charges([(0.0, -0.3)]),
                            SearchOptions(n_nodes=240, max_iter=120))
        assert ei.value.result is not None
        assert not ei.value.result.converged

    def test_strong_charge_makes_energy_unbounded(self):
        family = build_family(circle(0.0, 1.0))
        with pytest.raises(UnboundedEnergyError, match="energy unbounded") as ei:
            maximize_energy(family, log_charges([(0.0, -0.7)]),
                            SearchOptions(n_nodes=120, max_iter=200))
        assert ei.value.result is not None

    def test_family_without_template_is_rejected(self):
        family = build_family(segment(-1.0, 1.0))
        bad = dataclasses.replace(family, template=None)
        with pytest.raises(ValueError, match="template"):
            maximize_energy(bad, zero_field())

    def test_summary_dict_has_stable_keys(self):
        family = build_family(arc_through(-1.0, 1.0, 0.2j))
        res = maximize_energy(family, zero_field(),
                              SearchOptions(n_nodes=120, max_iter=60,
                                            tol=5e-3))
        summary = res.summary_dict()
        assert set(summary) == {"energy", "constant_w", "s_residual",
                                "max_variation_residual", "iterations",
                                "converged", "message"}
        csv = res.trace_csv()
        assert csv.startswith("iteration,energy")
