"""Backend equivalence tests for the hot numeric kernels.

Both implementations are imported directly so the test exercises the
compiled and the vectorized code paths regardless of which backend the
package selected at import time.
"""

import numpy as np
import pytest

from scurvelab import _kernels_numpy as knp

try:
    from scurvelab import _kernels_numba as knb
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    knb = None
    HAVE_NUMBA = False

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def _random_cloud(n, seed):
    rng = np.random.default_rng(seed)
    nodes = rng.normal(size=n) + 1j * rng.normal(size=n)
    weights = rng.uniform(0.1, 1.0, size=n)
    weights /= weights.sum()
    return np.ascontiguousarray(nodes), np.ascontiguousarray(weights)


@needs_numba
class TestBackendAgreement:
    def test_log_kernel_matrix(self):
        nodes, w = _random_cloud(40, 1)
        diag = np.full(40, 2.5)
        a = knb.log_kernel_matrix(nodes, diag)
        b = knp.log_kernel_matrix(nodes, diag)
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)

    def test_offdiag_energy(self):
        nodes, w = _random_cloud(60, 2)
        assert knb.offdiag_energy(nodes, w) == pytest.approx(
            knp.offdiag_energy(nodes, w), rel=1e-12)

    def test_potential_batch(self):
        nodes, w = _random_cloud(50, 3)
        pts = np.ascontiguousarray(np.array([2.0 + 1j, -3.0j, 0.1 + 0.1j]))
        np.testing.assert_allclose(knb.potential_batch(nodes, w, pts),
                                   knp.potential_batch(nodes, w, pts),
                                   rtol=1e-12, atol=1e-13)

    def test_cauchy_batch(self):
        nodes, w = _random_cloud(50, 4)
        pts = np.ascontiguousarray(np.array([2.0 + 1j, -3.0j]))
        np.testing.assert_allclose(knb.cauchy_batch(nodes, w, pts),
                                   knp.cauchy_batch(nodes, w, pts),
                                   rtol=1e-12, atol=1e-13)

    def test_node_cauchy(self):
        nodes, w = _random_cloud(30, 5)
        np.testing.assert_allclose(knb.node_cauchy(nodes, w),
                                   knp.node_cauchy(nodes, w),
                                   rtol=1e-12, atol=1e-13)

    def test_variation_sum(self):
        nodes, w = _random_cloud(30, 6)
        h = np.ascontiguousarray(np.exp(1j * nodes.real))
        hp = np.ascontiguousarray(1j * np.exp(1j * nodes.real))
        assert knb.variation_sum(nodes, w, h, hp) == pytest.approx(
            knp.variation_sum(nodes, w, h, hp), rel=1e-11, abs=1e-13)

    def test_fw_simplex(self):
        rng = np.random.default_rng(7)
        nodes, _ = _random_cloud(25, 8)
        diag = np.full(25, 1.0)
        K = knp.log_kernel_matrix(nodes, diag)
        phi = rng.uniform(0, 1, size=25)
        w0 = np.full(25, 1.0 / 25)
        wa, trace_a, gap_a = knb.fw_simplex(K, phi, 1.0, w0.copy(), 200, 1e-10)
        wb, trace_b, gap_b = knp.fw_simplex(K, phi, 1.0, w0.copy(), 200, 1e-10)
        np.testing.assert_allclose(wa, wb, rtol=1e-10, atol=1e-12)
        assert gap_a == pytest.approx(gap_b, abs=1e-10)
        assert trace_a.size == trace_b.size


class TestNumpyKernelContracts:
    """Oracle checks against direct formulas, backend independent."""

    def test_log_kernel_matrix_values(self):
        nodes = np.array([0.0 + 0j, 3.0 + 4j])
        diag = np.array([1.5, 2.5])
        K = knp.log_kernel_matrix(nodes, diag)
        assert K[0, 0] == pytest.approx(1.5)
        assert K[1, 1] == pytest.approx(2.5)
        assert K[0, 1] == pytest.approx(-np.log(5.0))
        assert K[0, 1] == K[1, 0]

    def test_potential_of_unit_atom(self):
        nodes = np.array([1.0 + 0j])
        w = np.array([1.0])
        pts = np.array([1.0 + 2.0j])
        assert knp.potential_batch(nodes, w, pts)[0] == pytest.approx(
            -np.log(2.0))

    def test_cauchy_of_unit_atom(self):
        nodes = np.array([1.0 + 0j])
        w = np.array([1.0])
        pts = np.array([3.0 + 0j])
        # convention: sum w_i / (z_i - p)
        assert knp.cauchy_batch(nodes, w, pts)[0] == pytest.approx(-0.5)

    def test_fw_simplex_flat_kernel_spreads_mass(self):
        nodes = np.array([-1.0 + 0j, 1.0 + 0j])
        K = knp.log_kernel_matrix(nodes, np.array([0.5, 0.5]))
        phi = np.zeros(2)
        w, _, _ = knp.fw_simplex(K, phi, 1.0, np.array([0.9, 0.1]), 500, 1e-12)
        np.testing.assert_allclose(w, [0.5, 0.5], atol=1e-5)
        assert w.sum() == pytest.approx(1.0)
