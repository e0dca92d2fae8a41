"""Numerical modular generators for local subspaces of the free scalar field.

High-precision discretization of the one-particle modular generator blocks
for wedge and double-cone regions, validated by smearing against analytic
reference curves.
"""

from .errors import (AssemblyError, ConfigError, ConvergenceError, DomainError,
                     ModGenError, SpectralBandError, SpectralMarginError)
from .precision import PrecisionContext, Scalar, arcoth, bessel_half_integer, \
    bessel_K_quarter, erf, gauss_legendre
from .linalg import EigenDecomp, SymMatrix, spectral_apply, sym_eigen
from .grids import BoxBasis, Grid, build_grid, chi_diagonal, normalize
from .kernels import (KernelSpec, antiderivative_f, antiderivative_f_quadrature,
                      assemble_Ainv_4d, assemble_Am14_2d, greens_kernel_4d,
                      kernel_f_2d)
from .modular import (Diagnostics, ModularResult, build_modular_result,
                      coupling_operator, generator_blocks, quarter_powers,
                      relative_entropy, spectral_margin)
from .probes import (ProbeSet, SmearReport, SmearRow, default_probes, overlaps,
                     reference, relative_error, smear_diagonal, smear_report)
from .pipeline import (RunConfig, RunOutcome, cache_key, parse_config, resolve,
                       run_scenario, serialize_config, sweep)

__version__ = "0.1.0"
