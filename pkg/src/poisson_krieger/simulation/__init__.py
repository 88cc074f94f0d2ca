from .cocycle import CocycleSample, generator_table, rn_block_density, rn_cocycle
from .configuration import (
    PointConfiguration, ShellRadiusError, iter_tower_counts, sample_conditioned, sample_configuration,
    sample_tower_counts, shift, truncation_budget,
)
from .estimators import (
    Estimate, LatticeFinding, estimate_rn_expectation, log_density_values, mean_and_se,
    ratio_set_estimate, sample_theta, theta_statistic, tv_distance,
)
from .skellam import (
    Delta1Report, SkellamSpec, WindowError, delta1_mass_check, skellam_pmf, skellam_support_bound,
    skellam_window,
)

__all__ = [
    "CocycleSample", "Delta1Report", "Estimate", "LatticeFinding", "PointConfiguration",
    "ShellRadiusError", "SkellamSpec", "WindowError", "delta1_mass_check", "estimate_rn_expectation",
    "generator_table", "iter_tower_counts", "log_density_values", "mean_and_se", "ratio_set_estimate",
    "rn_block_density", "rn_cocycle", "sample_conditioned", "sample_configuration", "sample_theta",
    "sample_tower_counts", "shift", "skellam_pmf", "skellam_support_bound", "skellam_window",
    "theta_statistic", "truncation_budget", "tv_distance",
]
