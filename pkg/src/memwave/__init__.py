"""memwave: certified bounded solutions of damped second-order systems with memory.

A small numpy/scipy library for second-order evolution systems

    phi'' + 2 gamma A^alpha phi' + A phi = (b * phi)(t) + f(t, phi)

posed on the modes of a positive self-adjoint operator A, with a scalar
memory kernel b and a forcing split into recurrent and vanishing-mean
components.  The equation is rewritten as a first-order block system on
the product space D(A^(1/2)) x H, the block semigroup is evaluated
exactly per mode through its diagonalization, and the bounded mild
solution is constructed by fixed-point iteration on the history integral
under numerically certified hypotheses (spectral gap, kernel mass,
forcing size, contraction).
"""

from .certificates import Certificate, all_passed, failed_names
from .errors import (
    CertificationError,
    ConfigError,
    ContractionError,
    CoverageError,
    DimensionMismatch,
    InstabilityError,
    IterationError,
    RepeatedRootError,
    SpectrumError,
)
from .forcing import (
    AA_LIBRARY,
    PAP0_LIBRARY,
    ForcingFunction,
    ShiftDiagnostic,
    Signal,
    check_H4,
    ergodic_mean,
    estimate_lipschitz,
    exotic_aa_signal,
    exp_abs_signal,
    gauss_signal,
    lorentz_signal,
    shift_convergence_test,
    sine_signal,
    two_tone_signal,
    vector_forcing,
    zero_forcing,
)
from .kernels import (
    MemoryKernel,
    check_H6,
    exponential_kernel,
    gaussian_kernel,
    memory_convolve,
    zero_kernel,
)
from .modal import (
    ModeRoots,
    SectorEstimate,
    SectorGrid,
    StabilityReport,
    check_AS1,
    estimate_sector,
    mode_block_factors,
    mode_roots,
    resolvent_norm,
)
from .plate import (
    PlateProblem,
    build_plate_model,
    check_H8,
    laplacian_eigenvalues,
    plate_certificates,
    plate_spectral_model,
    run_plate,
)
from .semigroup import (
    SmoothingConstants,
    apply_generator,
    block_semigroup,
    decay_envelope,
    scalar_semigroup,
    smoothing_constants,
    smoothing_from_m,
)
from .solver import (
    DecompositionReport,
    SolveReport,
    SolverConfig,
    apply_S,
    decompose_solution,
    hypothesis_certificates,
    picard_solve,
    required_horizon,
    verify_mild_identity,
)
from .spectral import (
    ProductState,
    SpectralModel,
    Trajectory,
    as_mode_coeffs,
    fractional_apply,
    norm_beta,
    product_norm,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
