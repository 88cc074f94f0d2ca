"""Nonsingular Poisson suspensions of each Krieger type, with exact series
certificates and Monte Carlo checks of the Radon-Nikodym cocycle."""

__version__ = "0.1.0"

from .groups import GroupModel  # noqa: E402
from .systems import (  # noqa: E402
    Kind, LSchedule, SpecError, SystemSpec, build_custom, build_type_ii_inf, build_type_iii0,
    build_type_iii1, build_type_iii_lambda, c_of_lambda, solve_c_inverse,
)

__all__ = [
    "GroupModel", "Kind", "LSchedule", "SpecError", "SystemSpec", "__version__", "build_custom",
    "build_type_ii_inf", "build_type_iii0", "build_type_iii1", "build_type_iii_lambda",
    "c_of_lambda", "solve_c_inverse",
]
