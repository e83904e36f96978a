"""Pinching-antenna placement and power minimization for two-user NOMA, FDMA and TDMA."""

from .channel import Geometry, PhysicalConfig, UserPos, channel_gain, coherent_upper_bound
from .errors import (ConfigError, InfeasibleGeometryError, PassError, ResourceGuardError,
                     SingularGeometryError, SolverError, UnreachableUserError)
from .power import RateRequirements, SicOrder, noma_total_power, fdma_power, tdma_power
from .report import SolveReport
from .solver import solve

__version__ = "0.1.0"

__all__ = [
    "Geometry", "PhysicalConfig", "UserPos", "channel_gain", "coherent_upper_bound",
    "RateRequirements", "SicOrder", "noma_total_power", "fdma_power", "tdma_power",
    "SolveReport", "solve", "PassError", "ConfigError", "InfeasibleGeometryError",
    "ResourceGuardError", "SingularGeometryError", "SolverError", "UnreachableUserError",
]
