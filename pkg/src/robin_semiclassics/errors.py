"""Exception types shared across the numerical modules."""


class CertificationError(RuntimeError):
    """A numerical result could not be certified to its stated tolerance."""


class QuadratureError(CertificationError):
    """Adaptive quadrature hit its refinement limit before converging."""


class EnumerationError(CertificationError):
    """Eigenvalue enumeration failed its completeness certificate."""
