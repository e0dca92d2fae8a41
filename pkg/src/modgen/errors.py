"""Exception types shared across the package."""


class ModGenError(Exception):
    """Base class for all package errors."""


class DomainError(ModGenError, ValueError):
    """A scalar function was evaluated outside its domain."""


class SpectralBandError(DomainError):
    """arcoth input lies in the forbidden band [-1, 1].

    Downstream this means the coupling matrix has eigenvalues inside the
    band, i.e. the working precision is insufficient for the run.
    """

    def __init__(self, value, message=None):
        self.value = value
        super().__init__(message or f"arcoth argument {value} lies in the forbidden band [-1, 1]; "
                                    "increase working digits or reject the run")


class SpectralMarginError(ModGenError):
    """Eigenvalues of the coupling matrix fell inside [-1, 1]."""

    def __init__(self, margin, violating):
        self.margin = margin
        self.violating = violating
        super().__init__(f"spectral margin {margin} <= 0 with {violating} eigenvalue(s) inside "
                         "the band; increase digits")


class ConvergenceError(ModGenError):
    """An iterative procedure (QL sweeps, quadrature refinement) did not converge."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class ConfigError(ModGenError, ValueError):
    """Invalid scenario or grid configuration."""


class AssemblyError(ModGenError):
    """Kernel matrix assembly produced an unusable (non-SPD) matrix."""
