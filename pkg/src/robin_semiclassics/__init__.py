"""Exact Robin-Laplacian spectra on boxes and their two-term semiclassical asymptotics."""

__version__ = "0.1.0"

from . import asympt, coeffs, halfline, quadrature, riesz, spectra1d  # noqa: F401
from .errors import CertificationError, EnumerationError, QuadratureError  # noqa: F401
