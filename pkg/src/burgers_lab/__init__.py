"""Numerical laboratory for viscous conservation laws on the unit circle.

The package solves u_t - nu u_xx + (f(u))_x = h with periodic boundary
conditions and turns the standard stability estimates for that equation
(sup-norm bounds, dissipativity windows, L1 non-expansion and strict
contraction, convergence to a unique bounded trajectory, synchronization
under random forcing) into executable, seeded experiments.
"""

from .flux import (
    FluxModel,
    advection_coefficient,
    check_convexity,
    custom_flux,
    linear_flux,
    polynomial_flux,
    quadratic_flux,
    translate_flux,
    zero_flux,
)
from .forcing import (
    ForcingModel,
    StochasticSpec,
    eval_forcing,
    forcing_budget,
    h2_norm_series,
    make_stochastic_forcing,
    steady_forcing,
    time_periodic_forcing,
    zero_forcing,
)
from .grid import Field, NormKind, PeriodicGrid, derivative, make_grid, mean_value, norm, sample
from .linear import (
    averaged_coefficient_path,
    constant_coefficient,
    harnack_ratio,
    l1_nonexpansion_check,
    solve_linear,
    theta_sweep,
)
from .oracles import advected_decaying_mode, heat_evolve, quadratic_flux_reference
from .profiles import PROFILE_NAMES, make_profile, random_band_limited, random_equal_mean_pair
from .solver import (
    BlowupError,
    SolverConfig,
    Trajectory,
    check_linf_bound,
    dissipativity_report,
    energy_identity_residual,
    h2_bound_check,
    kruzhkov_check,
    solve,
    solve_pair,
)
from .stability import (
    contraction_experiment,
    decay_rate_fit,
    interpolation_check,
    mean_shift_check,
    pullback_bounded_solution,
    stochastic_sync_experiment,
    uniqueness_probe,
)

__version__ = "0.1.0"

__all__ = [
    "BlowupError",
    "Field",
    "FluxModel",
    "ForcingModel",
    "NormKind",
    "PROFILE_NAMES",
    "PeriodicGrid",
    "SolverConfig",
    "StochasticSpec",
    "Trajectory",
    "advected_decaying_mode",
    "advection_coefficient",
    "averaged_coefficient_path",
    "check_convexity",
    "check_linf_bound",
    "constant_coefficient",
    "contraction_experiment",
    "custom_flux",
    "decay_rate_fit",
    "derivative",
    "dissipativity_report",
    "energy_identity_residual",
    "eval_forcing",
    "forcing_budget",
    "h2_bound_check",
    "h2_norm_series",
    "harnack_ratio",
    "heat_evolve",
    "interpolation_check",
    "kruzhkov_check",
    "l1_nonexpansion_check",
    "linear_flux",
    "make_grid",
    "make_profile",
    "make_stochastic_forcing",
    "mean_shift_check",
    "mean_value",
    "norm",
    "polynomial_flux",
    "pullback_bounded_solution",
    "quadratic_flux",
    "quadratic_flux_reference",
    "random_band_limited",
    "random_equal_mean_pair",
    "sample",
    "solve",
    "solve_linear",
    "solve_pair",
    "steady_forcing",
    "stochastic_sync_experiment",
    "theta_sweep",
    "time_periodic_forcing",
    "translate_flux",
    "uniqueness_probe",
    "zero_flux",
    "zero_forcing",
]
