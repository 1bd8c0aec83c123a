"""Stochastic wave simulation driven by fractional noise, and the
moment-based recovery of its deterministic and stochastic sources.

The pipeline: sample fractional Brownian paths (`fbm`), solve the
driven wave equation along each (`forward`), reduce final-time
eigencoefficients to empirical moments (`estimator`), and divide by
the analytic kernels (`kernels`) to reconstruct f and g^2 with
spectral truncation (`inverse`).  The `fracwave` console script ties
the stages into reproducible experiments (`cli`).
"""

from .backend import BACKEND_NAME
from .estimator import (
    EnsembleConfig,
    EnsembleMoments,
    mean_squared_spacetime_norm,
    pollute,
    relative_l2_error,
    run_ensemble,
)
from .fbm import (
    FbmPath,
    HurstIndex,
    derive_seed,
    fbm_covariance,
    fgn_autocovariance,
    fgn_to_path,
    path_seed,
    sample_fbm_path,
    sample_fgn,
    sample_fgn_batch,
)
from .forward import (
    CourantError,
    SourceSpec,
    SpaceTimeGrid,
    SpectralTrajectory,
    WaveField,
    final_time_coeffs,
    solve_fd,
    solve_spectral,
)
from .inverse import (
    ReconstructionResult,
    extract_g_up_to_sign,
    reconstruct_fields,
    recover_f_coeffs,
    recover_g_products,
)
from .kernels import (
    INVERTIBILITY_FLOOR,
    KernelTable,
    WaveKernel,
    build_kernel_table,
    compute_hk,
    ekl_monte_carlo,
    ekl_quadrature_highH,
    ekl_white,
)
from .spectral import (
    DOMAIN_LENGTH,
    EigenMode,
    SpatialGrid,
    eigenpair,
    max_mode,
    mode_matrix,
    project,
    projection_weights,
    synthesize,
    synthesize_rank2,
)

__version__ = "0.1.0"
