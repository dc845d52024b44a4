"""External fields acting on curve systems.

A field is a harmonic function phi = Re Phi away from a finite singular
set, with Phi analytic.  Three kinds are supported:

* ``zero``         phi = 0, singular set empty
* ``log_charges``  phi(z) = sum_k alpha_k log 1/|z - a_k|, singular at the a_k
* ``polynomial``   phi(z) = Re p(z), singular only at infinity

The complex derivative Phi' is what enters variational formulas and
quadratic differentials:

    log charges   Phi'(z) = -sum_k alpha_k / (z - a_k)
    polynomial    Phi'(z) = p'(z)

Because phi = Re Phi, the identity Phi' = d(phi)/dx - i d(phi)/dy holds,
which ``field_gradient_check`` verifies by central differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Tuple

import numpy as np

from .errors import SingularFieldError

_SINGULAR_RTOL = 1e-13


@dataclass(frozen=True)
class ExternalField:
    """Immutable field description.

    ``charges`` is a tuple of (location, alpha) pairs for ``log_charges``;
    ``coeffs`` are polynomial coefficients in ascending order for
    ``polynomial``.  Use the module constructors instead of building
    instances directly.
    """

    kind: str
    charges: Tuple[Tuple[complex, float], ...] = ()
    coeffs: Tuple[complex, ...] = dc_field(default=())

    def singular_points(self):
        """Finite singular points (infinity is implicit for polynomials)."""
        if self.kind == "log_charges":
            return np.array([a for a, _ in self.charges], dtype=complex)
        return np.array([], dtype=complex)

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "zero":
            return np.zeros(z.shape, dtype=float)
        if self.kind == "log_charges":
            out = np.zeros(z.shape, dtype=float)
            for a, alpha in self.charges:
                d = np.abs(z - a)
                with np.errstate(divide="ignore"):
                    out -= alpha * np.log(d)
            return out
        out = np.zeros(z.shape, dtype=complex)
        for c in reversed(self.coeffs):
            out = out * z + c
        return out.real

    def cderiv(self, z):
        """Phi'(z)."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "zero":
            return np.zeros(z.shape, dtype=complex)
        if self.kind == "log_charges":
            out = np.zeros(z.shape, dtype=complex)
            for a, alpha in self.charges:
                out -= alpha / (z - a)
            return out
        out = np.zeros(z.shape, dtype=complex)
        for k in range(len(self.coeffs) - 1, 0, -1):
            out = out * z + k * self.coeffs[k]
        return out

    def guard_finite(self, z, scale=1.0):
        """Raise if any point sits on (or numerically at) a singular point."""
        sing = self.singular_points()
        if sing.size == 0:
            return
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        d = np.abs(z[:, None] - sing[None, :])
        if d.min() <= _SINGULAR_RTOL * max(scale, 1.0):
            raise SingularFieldError("field singular at node")


def zero_field() -> ExternalField:
    """The trivial field phi = 0."""
    return ExternalField(kind="zero")


def log_charges(charges) -> ExternalField:
    """phi(z) = sum alpha_k log 1/|z - a_k| for (a_k, alpha_k) pairs."""
    tup = tuple((complex(a), float(alpha)) for a, alpha in charges)
    if not tup:
        return zero_field()
    return ExternalField(kind="log_charges", charges=tup)


def polynomial_field(coeffs) -> ExternalField:
    """phi(z) = Re p(z) with p given by ascending coefficients."""
    tup = tuple(complex(c) for c in coeffs)
    while tup and tup[-1] == 0:
        tup = tup[:-1]
    if all(c == 0 for c in tup):
        return zero_field()
    return ExternalField(kind="polynomial", coeffs=tup)


def field_value(field: ExternalField, z):
    """phi(z), elementwise; +/-inf at singular points of log charges."""
    return field.value(z)


def field_deriv(field: ExternalField, z):
    """Phi'(z), elementwise.  Raises at singular points."""
    z_arr = np.asarray(z, dtype=complex)
    field.guard_finite(z_arr, scale=float(np.max(np.abs(z_arr), initial=1.0)))
    return field.cderiv(z)


def field_gradient_check(field: ExternalField, z, step=1e-5):
    """|Phi'(z) - (d phi/dx - i d phi/dy)| by central differences.

    Returns the absolute defect, which is O(step^2) for points away from
    the singular set.
    """
    z = complex(z)
    fx = (field.value(z + step) - field.value(z - step)) / (2 * step)
    fy = (field.value(z + 1j * step) - field.value(z - 1j * step)) / (2 * step)
    return abs(field.cderiv(z) - (fx - 1j * fy))
