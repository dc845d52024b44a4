"""Independent reference quantities used across the test suite.

Everything here is computed from closed forms or from classical
quadrature formulas, never by calling the code under test, so any
agreement between the two is evidence rather than tautology.

Closed forms collected here:

* the arcsine (unweighted equilibrium) measure of [-1, 1]: density
  1/(pi sqrt(1-x^2)), Robin constant log 2, logarithmic potential
  log 2 - log|z + sqrt(z^2-1)| outside the cut;
* the semicircle measure (2/pi) sqrt(1-x^2), the equilibrium measure of
  mass 1 for the quadratic field phi(x) = x^2, with modified Robin
  constant 1/2 + log 2;
* Chebyshev polynomials of both kinds in monic normalization, whose
  zeros realize the arcsine pattern exactly;
* Szego functions of the model weights 1 - x^2 and sqrt(1 - x^2),
  obtained by factorizing the weight by hand.
"""

from __future__ import annotations

import numpy as np

ARCSINE_W = float(np.log(2.0))
SEMICIRCLE_W = 0.5 + float(np.log(2.0))


def arcsine_density(x):
    """Equilibrium density of [-1, 1] without a field."""
    x = np.asarray(x, dtype=float)
    return 1.0 / (np.pi * np.sqrt(1.0 - x * x))


def semicircle_density(x):
    """Equilibrium density of mass 1 for phi(x) = x^2 (support [-1, 1])."""
    x = np.asarray(x, dtype=float)
    return (2.0 / np.pi) * np.sqrt(np.clip(1.0 - x * x, 0.0, None))


def exterior_sqrt(z):
    """sqrt(z^2 - 1) with branch cut [-1, 1] and value ~ z at infinity."""
    z = np.asarray(z, dtype=complex)
    return np.sqrt(z - 1.0) * np.sqrt(z + 1.0)


def arcsine_potential(z):
    """Logarithmic potential of the arcsine measure off the cut."""
    z = np.asarray(z, dtype=complex)
    return np.log(2.0) - np.log(np.abs(z + exterior_sqrt(z)))


def arcsine_cauchy(z):
    """sum-form Cauchy transform C(z) = int d mu(t) / (t - z) off the cut."""
    return -1.0 / exterior_sqrt(z)


def arcsine_nodes(m: int) -> np.ndarray:
    """Chebyshev pattern cos((2k-1) pi / (2m)): m points arcsine-distributed."""
    k = np.arange(1, m + 1)
    return np.cos((2 * k - 1) * np.pi / (2 * m))


def chebyshev_t_monic(n: int) -> np.ndarray:
    """Ascending coefficients of the monic Chebyshev polynomial T_n."""
    base = np.zeros(n + 1)
    base[n] = 1.0
    dense = np.polynomial.chebyshev.cheb2poly(base)
    return dense / dense[n]


def chebyshev_u_monic(n: int) -> np.ndarray:
    """Ascending coefficients of the monic second-kind polynomial U_n."""
    return np.polynomial.polynomial.polyfromroots(
        np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))


def legendre_monic(n: int) -> np.ndarray:
    """Ascending coefficients of the monic Legendre polynomial P_n."""
    base = np.zeros(n + 1)
    base[n] = 1.0
    dense = np.polynomial.legendre.leg2poly(base)
    return dense / dense[n]


def chebyshev_t_zeros(n: int) -> np.ndarray:
    """Zeros of T_n, increasing."""
    return np.sort(arcsine_nodes(n))


def chebyshev_u_zeros(n: int) -> np.ndarray:
    """Zeros of U_n, increasing."""
    return np.sort(np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))


def szego_one_minus_x2(z):
    """Szego function of the weight w(x) = 1 - x^2.

    Factorizing 1 - x^2 = |1 - x^2| on the cut gives
    D(z) = (z + sqrt(z^2-1)) / sqrt(z^2-1), with D(infinity) = 2.
    """
    z = np.asarray(z, dtype=complex)
    s = exterior_sqrt(z)
    return (z + s) / s


def szego_semicircle_weight(z):
    """Szego function of w(x) = sqrt(1 - x^2): D = sqrt((z+s)/s), D(inf) = sqrt 2."""
    z = np.asarray(z, dtype=complex)
    s = exterior_sqrt(z)
    return np.sqrt((z + s) / s)


def log_weight_arcsine_mean(weight, n: int = 4096) -> float:
    """(1/pi) int_{-1}^{1} log w(x) / sqrt(1-x^2) dx by midpoint Gauss-Chebyshev.

    Independent of the panel quadrature used inside the package.
    """
    x = arcsine_nodes(n)
    return float(np.mean(np.log(weight(x))))


def cell_density(result, interior: float = 0.9):
    """(nodes, weights/spacings) of an equilibrium result, interior part.

    The discrete solver returns cell masses; dividing by the cell width
    estimates the density at the cell midpoint.  Points within
    ``interior`` of the origin (relative to the support half-width) are
    kept so endpoint blowup or vanishing never enters sup norms.
    """
    quad = result.quadrature
    x = result.measure.nodes.real
    dens = result.measure.weights / quad.spacings
    sup = result.support
    lo, hi = x[sup].min(), x[sup].max()
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    keep = sup & (np.abs(x - mid) <= interior * half)
    return x[keep], dens[keep]
