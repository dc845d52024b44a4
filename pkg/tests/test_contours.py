"""Contour systems, discretization, distances, and variation fields."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scurvelab.contours import (
    Arc,
    ContourSystem,
    arc_through,
    apply_variation,
    build_family,
    bump_field,
    circle,
    discretize,
    family_project,
    hausdorff_distance,
    schiffer_field,
    segment,
    star_system,
)


class TestConstruction:
    def test_segment_geometry(self):
        sys = segment(-1, 1)
        assert sys.arcs[0].length == pytest.approx(2.0, rel=1e-12)
        assert sys.diameter() == pytest.approx(2.0, rel=1e-12)
        np.testing.assert_array_equal(sys.anchors, [-1.0 + 0j, 1.0 + 0j])

    def test_circle_is_closed_without_anchors(self):
        sys = circle(0.5j, 2.0)
        assert sys.arcs[0].closed
        assert sys.anchors.size == 0
        assert sys.arcs[0].length == pytest.approx(2 * np.pi * 2.0, rel=1e-3)

    def test_arc_through_passes_via(self):
        via = 0.3j
        sys = arc_through(-1, 1, via)
        pts = sys.sample(1024)
        assert np.min(np.abs(pts - via)) <= 5e-3
        assert pts.imag.max() == pytest.approx(0.3, abs=1e-6)

    def test_arc_through_collinear_degrades_to_chord(self):
        sys = arc_through(-1, 1, 0.0)
        assert np.max(np.abs(sys.arcs[0].control.imag)) <= 1e-12

    def test_star_meets_at_junction(self):
        anchors = [1.0, -0.5 + 0.8j, -0.5 - 0.8j]
        sys = star_system(anchors, 0.1 + 0.0j)
        assert len(sys.arcs) == 3
        ends = [arc.control[-1] for arc in sys.arcs]
        assert np.max(np.abs(np.diff(ends))) <= 1e-12


class TestDiscretize:
    def test_node_count_and_positive_spacings(self):
        quad = discretize(segment(-1, 1), 128)
        assert quad.size == 128
        assert (quad.spacings > 0).all()

    def test_spacings_tile_the_length(self):
        quad = discretize(segment(-1, 1), 200)
        assert quad.spacings.sum() == pytest.approx(2.0, rel=1e-9)

    def test_open_arc_nodes_cluster_at_endpoints(self):
        quad = discretize(segment(-1, 1), 200)
        x = np.sort(quad.nodes.real)
        inner = np.diff(x)
        assert inner[0] < inner[inner.size // 2] / 10
        assert np.abs(x).max() < 1.0  # cell midpoints stay off the endpoints

    def test_closed_arc_uniform(self):
        quad = discretize(circle(0, 1), 64)
        gaps = np.diff(np.sort(np.angle(quad.nodes)))
        assert np.allclose(gaps, gaps[0], rtol=1e-6)

    def test_multi_arc_allocation(self):
        sys = star_system([1.0, -1.0, 1.0j], 0.0)
        quad = discretize(sys, 90)
        assert quad.size == 90
        assert len(quad.arc_slices) == 3


class TestHausdorff:
    def test_identity_is_zero(self):
        sys = segment(-1, 1)
        assert hausdorff_distance(sys, sys) <= 1e-12

    def test_shifted_segment(self):
        d = hausdorff_distance(segment(-1, 1), segment(-1 + 0.25j, 1 + 0.25j))
        assert d == pytest.approx(0.25, abs=2e-3)

    def test_nested_segments(self):
        d = hausdorff_distance(segment(-1, 1), segment(-0.5, 0.5))
        assert d == pytest.approx(0.5, abs=2e-3)

    @given(dx=st.floats(-1, 1), dy=st.floats(-1, 1))
    @settings(max_examples=15, deadline=None)
    def test_translation_distance(self, dx, dy):
        shift = complex(dx, dy)
        a = segment(-1, 1)
        b = segment(-1 + shift, 1 + shift)
        assert hausdorff_distance(a, b) == pytest.approx(abs(shift), abs=5e-3)

    def test_symmetry(self):
        a = arc_through(-1, 1, 0.4j)
        b = segment(-1, 1)
        assert hausdorff_distance(a, b) == pytest.approx(
            hausdorff_distance(b, a), rel=1e-6)


class TestFamilies:
    def test_build_family_pins_anchors(self):
        sys = arc_through(-1, 1, 0.35j)
        family = build_family(sys)
        pinned_controls = {(ki, ci) for ki, ci, _ in family.pinned}
        assert len(pinned_controls) == 2

    def test_family_project_restores_pins(self):
        sys = arc_through(-1, 1, 0.35j)
        family = build_family(sys)
        controls = [arc.control.copy() for arc in sys.arcs]
        controls[0] = controls[0] + 0.1j
        moved = ContourSystem([Arc(controls[0])])
        back = family_project(moved, family)
        assert back.arcs[0].control[0] == pytest.approx(-1.0 + 0j)
        assert back.arcs[0].control[-1] == pytest.approx(1.0 + 0j)

    def test_junction_groups_snap_together(self):
        sys = star_system([1.0, -1.0, 1.0j], 0.1)
        groups = [[(0, -1), (1, -1), (2, -1)]]
        family = build_family(sys, junction_groups=groups)
        controls = [arc.control.copy() for arc in sys.arcs]
        controls[0][-1] += 0.05
        moved = ContourSystem([Arc(c) for c in controls], anchors=sys.anchors)
        back = family_project(moved, family)
        ends = [arc.control[-1] for arc in back.arcs]
        assert np.max(np.abs(np.diff(ends))) <= 1e-12


class TestVariations:
    def test_bump_is_compactly_supported(self):
        h = bump_field(0.0, 0.5, direction=1.0)
        z = np.array([0.0j, 0.2, 0.49, 0.51, 2.0])
        v = h(z)
        assert abs(v[0]) == pytest.approx(1.0)
        assert abs(v[2]) > 0
        assert v[3] == 0 and v[4] == 0

    def test_bump_wirtinger_matches_finite_differences(self):
        h = bump_field(0.1 + 0.1j, 0.7, direction=0.5j)
        z = np.array([0.2 + 0.05j, -0.1j])
        hz, hzb = h.wirtinger(z)
        step = 1e-6
        dx = (h(z + step) - h(z - step)) / (2 * step)
        dy = (h(z + 1j * step) - h(z - 1j * step)) / (2 * step)
        np.testing.assert_allclose(hz + hzb, dx, atol=1e-6)
        np.testing.assert_allclose(1j * (hz - hzb), dy, atol=1e-6)
        np.testing.assert_allclose(h.deriv(z), hz, atol=1e-14)

    def test_schiffer_vanishes_at_anchors(self):
        h = schiffer_field(2.0, [-1.0, 1.0])
        np.testing.assert_allclose(np.abs(h(np.array([-1.0 + 0j, 1.0 + 0j]))),
                                   0.0, atol=1e-14)

    def test_apply_variation_moves_points(self):
        sys = segment(-1, 1, n_ctrl=9)
        h = bump_field(0.0, 0.5, direction=1.0j)
        moved = apply_variation(sys, h, 0.1)
        mid = moved.arcs[0].control[moved.arcs[0].control.size // 2]
        assert mid.imag > 0.05

    def test_apply_variation_rejects_folding_steps(self):
        sys = segment(-1, 1)
        h = bump_field(0.0, 0.2, direction=1.0)
        with pytest.raises(ValueError, match="fold|Lip|step"):
            apply_variation(sys, h, 10.0)

    def test_degenerate_arc_collapses_to_single_node(self):
        arcs = [Arc(np.array([-1.0 + 0j, 1.0 + 0j])),
                Arc(np.array([5.0 + 0j, 5.0 + 1e-12 + 0j]))]
        quad = discretize(ContourSystem(arcs), 16)
        assert quad.collapsed == [1]
        start, stop = quad.arc_slices[1]
        assert stop - start == 1
