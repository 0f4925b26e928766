"""Semiclassical constants for the two-term Robin eigenvalue-sum asymptotics.

Closed forms for unit-ball volumes, sphere surfaces and the Weyl
coefficient; adaptive quadrature for the boundary-density coefficient
l2(d, b), which interpolates between +l1(d-1)/4 at b = 0 and
-l1(d-1)/4 as b -> +infinity and grows like pi*c_d*|b|^(d+1) as
b -> -infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import adaptive_quadrature

MIN_DIMENSION = 2
MAX_DIMENSION = 8  # desk-scale guard


@dataclass(frozen=True)
class CoefficientValue:
    """A dimensionless constant with a certified absolute error bound.

    ``abs_error_estimate`` is 0 for closed-form values and the summed
    quadrature error estimate otherwise.
    """

    value: float
    abs_error_estimate: float = 0.0


def _check_dimension(d, minimum=MIN_DIMENSION):
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise TypeError(f"dimension must be an integer, got {d!r}")
    if d < minimum or d > MAX_DIMENSION:
        raise ValueError(f"dimension must lie in [{minimum}, {MAX_DIMENSION}], got {d}")
    return int(d)


def gamma_half_integer(n):
    """Gamma(n/2) for integer n >= 1 via the recursion from Gamma(1/2), Gamma(1)."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"need a positive integer half-count, got {n!r}")
    value = math.sqrt(math.pi) if n % 2 == 1 else 1.0
    k = 2 - (n % 2)  # 1 or 2, the recursion anchor
    while k < n:
        value *= k / 2.0
        k += 2
    return value


def unit_ball_volume(d):
    """Volume of the unit ball in R^d: pi^(d/2) / Gamma(d/2 + 1).

    Accepts d >= 1 so the (d-1)-dimensional constants remain available.
    """
    d = _check_dimension(d, minimum=1)
    return CoefficientValue(math.pi ** (d / 2.0) / gamma_half_integer(d + 2))


def sphere_surface(k):
    """Surface measure of the unit k-sphere in R^(k+1): (k+1) * omega_(k+1)."""
    if not isinstance(k, (int, np.integer)) or k < 0 or k > MAX_DIMENSION:
        raise ValueError(f"sphere index must lie in [0, {MAX_DIMENSION}], got {k!r}")
    omega = math.pi ** ((k + 1) / 2.0) / gamma_half_integer(k + 3)
    return CoefficientValue((k + 1) * omega)


def l1(d):
    """Weyl constant: (2/(d+2)) * (2*pi)^(-d) * omega_d, defined for d >= 1."""
    d = _check_dimension(d, minimum=1)
    omega = unit_ball_volume(d).value
    return CoefficientValue((2.0 / (d + 2)) * (2.0 * math.pi) ** (-d) * omega)


def c_d(d):
    """Prefactor of the boundary density: 4 |S^(d-2)| (2*pi)^(-d) / (d^2 - 1)."""
    d = _check_dimension(d)
    surf = sphere_surface(d - 2).value
    return CoefficientValue(4.0 * surf * (2.0 * math.pi) ** (-d) / (d * d - 1.0))


def _l2_integral(d, b, abs_tol):
    """Adaptive quadrature of int_0^1 (1-p^2)^((d+1)/2) * b / (b^2 + p^2) dp.

    The integrand has a peak of width |b| at p = |b|; the interval is
    split there when 0 < |b| < 1.
    """
    power = 0.5 * (d + 1)
    b2 = b * b

    def integrand(p):
        return (1.0 - p * p) ** power * (b / (b2 + p * p))

    breaks = (abs(b),) if 0.0 < abs(b) < 1.0 else ()
    res = adaptive_quadrature(integrand, 0.0, 1.0, abs_tol=abs_tol, breakpoints=breaks)
    return res.value, res.error_estimate


def l2(d, b, abs_tol=1e-13):
    """Boundary-density coefficient l2(d, b), three-branch form.

    b > 0:  c_d * (-pi/4 + I(b))
    b = 0:  c_d * pi/4
    b < 0:  c_d * (-pi/4 + I(b) + pi * (b^2 + 1)^((d+1)/2))
    with I(b) the p-integral evaluated by adaptive quadrature.
    """
    d = _check_dimension(d)
    b = float(b)
    if not math.isfinite(b):
        raise ValueError(f"Robin coefficient must be finite, got {b!r}")
    cd = c_d(d).value
    if b == 0.0:
        return CoefficientValue(cd * math.pi / 4.0)
    integral, quad_err = _l2_integral(d, b, abs_tol)
    value = -math.pi / 4.0 + integral
    if b < 0.0:
        value += math.pi * (b * b + 1.0) ** (0.5 * (d + 1))
    return CoefficientValue(cd * value, cd * quad_err)


def l2_large_negative_leading(d, b):
    """Leading large-coupling density pi * c_d * (-b)^(d+1), for b < 0."""
    d = _check_dimension(d)
    b = float(b)
    if not b < 0.0:
        raise ValueError(f"leading form is defined for b < 0, got {b}")
    return CoefficientValue(math.pi * c_d(d).value * (-b) ** (d + 1))
