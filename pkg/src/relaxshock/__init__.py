"""Planar viscous shocks of the Maxwell-relaxed compressible Navier-Stokes system."""
from .errors import (AdmissibilityError, BlowUpError, ConfigError, ConsistencyError,
                     DomainError, StiffnessError)
from .gas import GasModel, ShockData, make_shock, pressure, dpressure, tau_admissible_max
from .profile import ProfileTable, eval_profile, solve_profile, validate_profile

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError", "BlowUpError", "ConfigError", "ConsistencyError", "DomainError",
    "StiffnessError", "GasModel", "ShockData", "make_shock", "pressure", "dpressure",
    "tau_admissible_max", "ProfileTable", "eval_profile", "solve_profile", "validate_profile",
]
