"""Discrete measures, potentials, and the equilibrium solver."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scurvelab.contours import discretize, segment
from scurvelab.errors import (
    DegenerateConfigError,
    SingularFieldError,
    UnboundedEnergyError,
)
from scurvelab.fields import log_charges, polynomial_field, zero_field
from scurvelab.measures import (
    DiscreteMeasure,
    cauchy_transform,
    discrete_energy,
    potential,
    solve_equilibrium,
    solve_on,
)

from oracles import (
    ARCSINE_W,
    arcsine_cauchy,
    arcsine_density,
    arcsine_nodes,
    arcsine_potential,
    cell_density,
)


def fine_arcsine(m: int = 2000) -> DiscreteMeasure:
    return DiscreteMeasure(arcsine_nodes(m).astype(complex), np.full(m, 1.0 / m))


class TestDiscreteMeasure:
    def test_mass_and_scaling(self):
        mu = DiscreteMeasure(np.array([0.0j, 1.0]), np.array([0.25, 0.5]))
        assert mu.mass == pytest.approx(0.75)
        assert mu.scaled(4.0).mass == pytest.approx(3.0)

    def test_csv_roundtrip(self):
        mu = DiscreteMeasure(np.array([0.5 + 0.25j, -1.0j]), np.array([0.125, 0.375]))
        back = DiscreteMeasure.from_csv(mu.to_csv())
        np.testing.assert_array_equal(back.nodes, mu.nodes)
        np.testing.assert_array_equal(back.weights, mu.weights)

    def test_csv_header(self):
        mu = DiscreteMeasure(np.array([0.0j]), np.array([1.0]))
        assert mu.to_csv().splitlines()[0] == "re,im,weight"

    def test_mismatched_lengths_rejected(self):
        with pytest.raises((ValueError, DegenerateConfigError)):
            DiscreteMeasure(np.array([0.0j, 1.0]), np.array([1.0]))


class TestPotential:
    def test_single_atom(self):
        mu = DiscreteMeasure(np.array([0.0j]), np.array([1.0]))
        z = np.array([2.0, 0.5j, -3.0 + 4.0j])
        np.testing.assert_allclose(potential(mu, z), -np.log(np.abs(z)), rtol=1e-14)

    def test_arcsine_counting_matches_closed_form(self):
        mu = fine_arcsine()
        z = np.array([2.0, -1.5, 1.0 + 1.0j, 3.0j, -0.3 + 0.8j])
        np.testing.assert_allclose(potential(mu, z), arcsine_potential(z), atol=5e-7)

    def test_cauchy_arcsine(self):
        mu = fine_arcsine()
        z = np.array([2.0 + 0.0j, 1.5j, -2.0 + 1.0j])
        np.testing.assert_allclose(cauchy_transform(mu, z), arcsine_cauchy(z), atol=1e-6)

    def test_cauchy_at_atom_raises(self):
        mu = DiscreteMeasure(np.array([1.0 + 0.0j]), np.array([1.0]))
        with pytest.raises(ValueError, match="atom"):
            cauchy_transform(mu, 1.0 + 0.0j)

    @given(
        dx=st.floats(-3, 3, allow_nan=False),
        dy=st.floats(-3, 3, allow_nan=False),
    )
    @settings(max_examples=25, deadline=None)
    def test_translation_invariance(self, dx, dy):
        shift = complex(dx, dy)
        nodes = np.array([0.1 + 0.2j, -0.4j, 0.8])
        w = np.array([0.2, 0.3, 0.5])
        probe = 2.0 + 2.0j
        a = potential(DiscreteMeasure(nodes, w), probe)
        b = potential(DiscreteMeasure(nodes + shift, w), probe + shift)
        assert a == pytest.approx(b, abs=1e-10)

    @given(s=st.floats(0.1, 5.0, allow_nan=False))
    @settings(max_examples=25, deadline=None)
    def test_mass_linearity(self, s):
        nodes = np.array([0.1 + 0.2j, -0.4j, 0.8])
        w = np.array([0.2, 0.3, 0.5])
        mu = DiscreteMeasure(nodes, w)
        assert potential(mu.scaled(s), 2.0) == pytest.approx(s * potential(mu, 2.0))


class TestEquilibrium:
    def test_arcsine_constant(self):
        res = solve_equilibrium(segment(-1, 1), zero_field(), n_nodes=200)
        assert res.converged
        assert res.constant_w == pytest.approx(ARCSINE_W, abs=2e-3)
        assert res.measure.mass == pytest.approx(1.0, abs=1e-12)

    def test_arcsine_density(self):
        res = solve_equilibrium(segment(-1, 1), zero_field(), n_nodes=200)
        x, dens = cell_density(res, interior=0.9)
        assert np.max(np.abs(dens - arcsine_density(x))) <= 2e-2

    def test_support_is_everything_without_field(self):
        res = solve_equilibrium(segment(-1, 1), zero_field(), n_nodes=100)
        assert res.support.all()

    def test_mass_scales_constant(self):
        res1 = solve_equilibrium(segment(-1, 1), zero_field(), n_nodes=150)
        res2 = solve_equilibrium(segment(-1, 1), zero_field(), mass=2.0, n_nodes=150)
        assert res2.constant_w == pytest.approx(2.0 * res1.constant_w, abs=5e-3)
        assert res2.measure.mass == pytest.approx(2.0, abs=1e-12)

    def test_field_constant_shift_moves_w_only(self):
        base = solve_equilibrium(segment(-1, 1), zero_field(), n_nodes=150)
        shifted = solve_equilibrium(segment(-1, 1), polynomial_field([0.7]),
                                    n_nodes=150)
        assert shifted.constant_w - base.constant_w == pytest.approx(0.7, abs=1e-9)
        np.testing.assert_allclose(shifted.measure.weights, base.measure.weights,
                                   atol=1e-10)

    def test_quadratic_field_shrinks_support(self):
        res = solve_equilibrium(segment(-3, 3), polynomial_field([0, 0, 1.0]),
                                n_nodes=300)
        sup = res.support_nodes().real
        assert sup.min() == pytest.approx(-1.0, abs=3e-2)
        assert sup.max() == pytest.approx(1.0, abs=3e-2)

    def test_charge_on_a_node_is_rejected(self):
        quad = discretize(segment(-1, 1), 50)
        at_node = complex(quad.nodes[10])
        with pytest.raises(SingularFieldError, match="singular"):
            solve_on(quad, log_charges([(at_node, 1.0)]))

    def test_unbounded_energy_detected(self):
        from scurvelab.measures import build_kernel_matrix, solve_kernel_qp

        quad = discretize(segment(-1, 1), 30)
        K = build_kernel_matrix(quad)
        phi = np.zeros(quad.size)
        phi[3] = -np.inf
        with pytest.raises(UnboundedEnergyError, match="unbounded"):
            solve_kernel_qp(K, phi, 1.0)

    def test_summary_dict_keys(self):
        res = solve_equilibrium(segment(-1, 1), zero_field(), n_nodes=80)
        summary = res.summary_dict()
        for key in ("constant_w", "energy", "residual_eq", "residual_ineq",
                    "mass", "n_nodes", "n_support", "converged"):
            assert key in summary

    def test_energy_matches_constant_unweighted(self):
        # for unit mass and no field the minimal energy equals the Robin constant
        res = solve_equilibrium(segment(-1, 1), zero_field(), n_nodes=200)
        assert res.energy == pytest.approx(res.constant_w, abs=1e-10)

    def test_discrete_energy_positive_for_small_sets(self):
        mu = DiscreteMeasure(np.array([0.0j, 0.5, -0.5]), np.full(3, 1 / 3))
        assert discrete_energy(mu) > 0
