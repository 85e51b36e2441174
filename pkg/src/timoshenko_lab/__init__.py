"""Numerical laboratory for the one-dimensional dissipative Timoshenko system.

Linear solutions are evaluated exactly in Fourier space from the four
characteristic roots; norms follow by Plancherel quadrature.  The package
also provides the diffusion-plate profiles, power-law rate fitting, a
pseudo-spectral semilinear integrator and a command-line harness.
"""
from .errors import (
    ConditioningWarning,
    DegenerateRoots,
    InvalidWaveSpeed,
    MeanConditionViolated,
    NumericalBlowUp,
    ParseError,
    TimoshenkoError,
    UnknownGenerator,
    ValidationError,
)
from .spectral_core import (
    RootQuartet,
    SpectralState,
    WaveSpeed,
    eval_fourier_solution,
    expand_roots_large,
    expand_roots_small,
    initial_data_transform,
    ode_oracle,
    solve_linear,
    solve_quartic,
    track_roots,
    vieta_errors,
)
from .initial_data import Generator, InitialData, generate_data
from .norms_rates import CutoffFamily, I_func, RateReport, fit_power_law, frequency_grid, l2_norm_spectral
from .profiles import g_kernel, ghat, moments, profile_hats
from .experiments import (
    ExperimentConfig,
    run_cancellation_energy,
    run_growth,
    run_profile_error,
    run_regularity_loss,
    verify_pointwise_bounds,
)
from .semilinear import duhamel_step, linear_propagator, linearized_rate_check, solve_semilinear
from .config import RunConfig, emit_config, parse_config
from .reports import ReportRecord, emit_reports

__version__ = "0.1.0"
