"""Physical constants, geometry and the line-of-sight channel of a pinching-antenna waveguide.

The waveguide runs along the x-axis at height ``d`` with its feed point at the
origin. A PA at ``x`` radiates towards a user at ``(x_u, y_u, 0)`` over the
distance ``sqrt((x_u - x)**2 + D**2)`` with ``D = sqrt(y_u**2 + d**2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InfeasibleGeometryError

SPEED_OF_LIGHT = 3.0e8


@dataclass(frozen=True)
class PhysicalConfig:
    f_c: float = 28e9
    n_eff: float = 1.4
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.f_c > 0:
            raise ValueError("carrier frequency must be positive")
        if not self.n_eff > 1:
            raise ValueError("effective refractive index must exceed 1")

    @property
    def wavelength(self) -> float:
        return self.c / self.f_c

    @property
    def guided_wavelength(self) -> float:
        return self.wavelength / self.n_eff

    @property
    def eta(self) -> float:
        """Free-space path-loss constant c / (4 pi f_c), in metres."""
        return self.c / (4.0 * math.pi * self.f_c)

    @property
    def k0(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def kg(self) -> float:
        return 2.0 * math.pi / self.guided_wavelength


@dataclass(frozen=True)
class Geometry:
    d: float = 3.0
    L: float = 15.0
    N: int = 6
    delta: float = 0.5 * SPEED_OF_LIGHT / 28e9

    def __post_init__(self):
        if not (self.d > 0 and self.L > 0 and self.delta > 0):
            raise ValueError("d, L and delta must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        if (self.N - 1) * self.delta > self.L:
            raise InfeasibleGeometryError(
                f"{self.N} PAs at spacing {self.delta:g} m do not fit on L={self.L:g} m")

    def with_n(self, n: int) -> "Geometry":
        return Geometry(d=self.d, L=self.L, N=n, delta=self.delta)


@dataclass(frozen=True)
class UserPos:
    x: float
    y: float

    def lateral(self, d: float) -> float:
        """Distance D from the user to the waveguide line."""
        return math.hypot(self.y, d)


# Placements are built as x0 + n*delta, which can land an ulp short of the
# spacing; 1 pm is far below anything physical and far above rounding.
FEASIBILITY_TOL = 1e-12


def check_placement(xp, geometry: Geometry, tol: float = FEASIBILITY_TOL) -> np.ndarray:
    """Return ``xp`` as a float array, raising ValueError if it is not a feasible placement."""
    xp = np.asarray(xp, dtype=np.float64)
    if xp.ndim != 1 or xp.size != geometry.N:
        raise ValueError(f"expected {geometry.N} PA positions, got shape {xp.shape}")
    if xp[0] < -tol or xp[-1] > geometry.L + tol:
        raise ValueError("PA positions must lie in [0, L]")
    if xp.size > 1 and np.min(np.diff(xp)) < geometry.delta - tol:
        raise ValueError("consecutive PAs closer than the minimum spacing")
    return xp


def is_feasible(xp, geometry: Geometry, tol: float = FEASIBILITY_TOL) -> bool:
    try:
        check_placement(xp, geometry, tol)
    except ValueError:
        return False
    return True


def user_pa_distance(user: UserPos, x, geometry: Geometry):
    D = user.lateral(geometry.d)
    return np.sqrt((user.x - np.asarray(x, dtype=np.float64)) ** 2 + D * D)


def total_phase(user: UserPos, x, cfg: PhysicalConfig, geometry: Geometry):
    """Free-space plus in-waveguide phase of the path feed -> PA at ``x`` -> user (unwrapped)."""
    x = np.asarray(x, dtype=np.float64)
    return cfg.k0 * user_pa_distance(user, x, geometry) + cfg.kg * x


def channel_gain(user: UserPos, placement, cfg: PhysicalConfig, geometry: Geometry) -> float:
    """|sum_n eta exp(-j phi_n) / dist_n|^2, without the 1/N power split."""
    xp = np.asarray(placement, dtype=np.float64).reshape(1, -1)
    return float(_kernels.gain_batch(xp, user.x, user.lateral(geometry.d), cfg.k0, cfg.kg, cfg.eta)[0])


def channel_gains_batch(user: UserPos, placements, cfg: PhysicalConfig, geometry: Geometry) -> np.ndarray:
    """Channel gains for a (M, N) stack of placements."""
    return _kernels.gain_batch(placements, user.x, user.lateral(geometry.d), cfg.k0, cfg.kg, cfg.eta)


def coherent_upper_bound(user: UserPos, placement, cfg: PhysicalConfig, geometry: Geometry) -> float:
    """Gain with every PA contribution phase-aligned: (sum_n eta / dist_n)^2."""
    inv = 1.0 / user_pa_distance(user, placement, geometry)
    return (cfg.eta * math.fsum(np.atleast_1d(inv))) ** 2
