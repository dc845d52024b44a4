"""Tests for external field construction and evaluation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scurvelab.errors import SingularFieldError
from scurvelab.fields import (
    field_deriv,
    field_gradient_check,
    field_value,
    log_charges,
    polynomial_field,
    zero_field,
)


class TestConstructors:
    def test_zero_field_is_identically_zero(self):
        f = zero_field()
        z = np.array([0.0j, 1.0 + 2.0j, -3.0])
        np.testing.assert_array_equal(f.value(z), 0.0)
        np.testing.assert_array_equal(f.cderiv(z), 0.0)
        assert f.singular_points().size == 0

    def test_empty_charge_list_degrades_to_zero_field(self):
        assert log_charges([]).kind == "zero"

    def test_zero_polynomial_degrades_to_zero_field(self):
        assert polynomial_field([0.0, 0.0]).kind == "zero"
        assert polynomial_field([]).kind == "zero"

    def test_polynomial_trims_trailing_zeros(self):
        f = polynomial_field([1.0, 2.0, 0.0, 0.0])
        assert f.coeffs == (1.0 + 0j, 2.0 + 0j)

    def test_fields_are_immutable(self):
        f = polynomial_field([0.0, 0.0, 1.0])
        with pytest.raises(AttributeError):
            f.kind = "zero"


class TestValues:
    def test_single_log_charge(self):
        f = log_charges([(0.0, 1.0)])
        assert f.value(2.0) == pytest.approx(-np.log(2.0))
        assert f.value(0.5j) == pytest.approx(-np.log(0.5))
        assert f.cderiv(2.0) == pytest.approx(-0.5)

    def test_log_charge_value_is_infinite_at_the_charge(self):
        f = log_charges([(1.0j, 0.5)])
        assert f.value(1.0j) == np.inf

    def test_quadratic_field_on_and_off_axis(self):
        f = polynomial_field([0.0, 0.0, 1.0])
        assert f.value(3.0) == pytest.approx(9.0)
        # Re (x + iy)^2 = x^2 - y^2
        assert f.value(1.0 + 2.0j) == pytest.approx(-3.0)
        assert f.cderiv(1.0 + 2.0j) == pytest.approx(2.0 + 4.0j)

    def test_field_value_matches_method(self):
        f = log_charges([(0.0, 1.0), (2.0, -0.5)])
        z = np.array([1.0 + 1.0j, -2.0 + 0j])
        np.testing.assert_allclose(field_value(f, z), f.value(z))


class TestGuards:
    def test_guard_raises_on_singular_node(self):
        f = log_charges([(0.5, 1.0)])
        with pytest.raises(SingularFieldError, match="singular"):
            f.guard_finite(np.array([0.0j, 0.5 + 0j]))

    def test_field_deriv_guards_singular_points(self):
        f = log_charges([(0.5, 1.0)])
        with pytest.raises(SingularFieldError):
            field_deriv(f, 0.5)
        # away from the charge the guard passes
        assert field_deriv(f, 2.0) == pytest.approx(-1.0 / 1.5)

    def test_guard_is_noop_for_polynomials(self):
        polynomial_field([0.0, 1.0]).guard_finite(np.array([0.0j]))


class TestGradientIdentity:
    @pytest.mark.parametrize("f", [
        zero_field(),
        log_charges([(0.0, 1.0), (-1.0 + 1.0j, -0.3)]),
        polynomial_field([0.5, -1.0, 0.0, 0.25]),
    ])
    def test_cderiv_matches_central_differences(self, f):
        for z in (2.0 + 0.5j, -1.5 - 0.25j, 0.3 + 2.0j):
            assert field_gradient_check(f, z) <= 1e-8

    @given(coeffs=st.lists(st.floats(-2, 2), min_size=1, max_size=5),
           x=st.floats(-2, 2), y=st.floats(-2, 2))
    @settings(max_examples=40, deadline=None)
    def test_polynomial_gradient_identity_holds(self, coeffs, x, y):
        f = polynomial_field(coeffs)
        assert field_gradient_check(f, complex(x, y)) <= 1e-6
