from .certificate import Certificate, conservativeness_certificate, growth_fit, growth_slope, upper_expression
from .classify import DECLARED, KriegerType, TypeVerdict, classify, lattice_finding
from .series import (
    DEFAULT_HORIZON, block_data, chi, chi_brackets, companion_series, hellinger_closed_form,
    hellinger_direct, hellinger_sum, hellinger_zero_block, kakutani_series, l1_displacement_series,
    quadratic_integral, quadratic_profile, restricted_product_mass,
)
from .verdicts import HorizonTooSmall, SeriesVerdict, Verdict

__all__ = [
    "Certificate", "DECLARED", "DEFAULT_HORIZON", "HorizonTooSmall", "KriegerType", "SeriesVerdict",
    "TypeVerdict", "Verdict", "block_data", "chi", "chi_brackets", "classify", "companion_series",
    "conservativeness_certificate", "growth_fit", "growth_slope", "hellinger_closed_form",
    "hellinger_direct", "hellinger_sum", "hellinger_zero_block", "kakutani_series",
    "l1_displacement_series", "lattice_finding", "quadratic_integral", "quadratic_profile",
    "restricted_product_mass", "upper_expression",
]
