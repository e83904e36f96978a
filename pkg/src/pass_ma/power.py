"""Rate expressions and closed-form minimum powers for two-user NOMA, FDMA and TDMA.

All powers are in watts. Every scheme's total power can be written as

    min over rows r of  C[r, 0] / g1 + C[r, 1] / g2

where ``C`` comes from :func:`power_coefficients` (two rows for NOMA, one per
SIC order; one row for FDMA/TDMA). The placement solvers and the brute-force
oracle work with that form directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import UnreachableUserError

SCHEMES = ("noma", "fdma", "tdma")


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def watt_to_dbm(watt: float) -> float:
    if watt <= 0:
        return float("-inf")
    return 10.0 * math.log10(watt * 1000.0)


@dataclass(frozen=True)
class RateRequirements:
    gamma1: float = 3.0
    gamma2: float = 3.0
    sigma2_1: float = 1e-12
    sigma2_2: float = 1e-12

    def __post_init__(self):
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError("target rates must be non-negative")
        if not (self.sigma2_1 > 0 and self.sigma2_2 > 0):
            raise ValueError("noise powers must be positive")

    @classmethod
    def from_dbm(cls, gamma1, gamma2, sigma2_dbm1=-90.0, sigma2_dbm2=None):
        if sigma2_dbm2 is None:
            sigma2_dbm2 = sigma2_dbm1
        return cls(gamma1, gamma2, dbm_to_watt(sigma2_dbm1), dbm_to_watt(sigma2_dbm2))

    def swapped(self) -> "RateRequirements":
        return RateRequirements(self.gamma2, self.gamma1, self.sigma2_2, self.sigma2_1)


class SicOrder(NamedTuple):
    """Interference indicators (lambda1, lambda2); the user with indicator 0 performs SIC."""

    l1: int
    l2: int

    def __str__(self):
        return f"({self.l1},{self.l2})"


USER1_STRONG = SicOrder(0, 1)
USER2_STRONG = SicOrder(1, 0)


@dataclass(frozen=True)
class PowerSolution:
    P1: float
    P2: float
    scheme: str
    order: Optional[SicOrder] = None
    sic_warning: bool = False

    @property
    def total(self) -> float:
        return self.P1 + self.P2

    @property
    def total_dbm(self) -> float:
        return watt_to_dbm(self.total)


_LN2 = math.log(2.0)


def _excess(gamma: float, slots: float = 1.0) -> float:
    """2**(slots*gamma) - 1 without cancellation for small rates."""
    return math.expm1(slots * gamma * _LN2)


def _rate(snr: float) -> float:
    return math.log1p(snr) / _LN2


def _check_gains(*gains):
    for g in gains:
        if not g > 0:
            raise UnreachableUserError(f"channel gain must be positive, got {g!r}")


def sic_order(g1: float, g2: float) -> SicOrder:
    _check_gains(g1, g2)
    return USER1_STRONG if g1 >= g2 else USER2_STRONG


def noma_rate(k: int, P1: float, P2: float, g_k: float, order: SicOrder, sigma2_k: float, N: int) -> float:
    own, other = (P1, P2) if k == 1 else (P2, P1)
    lam = order.l1 if k == 1 else order.l2
    return _rate(own * g_k / (lam * other * g_k + N * sigma2_k))


def fdma_rate(P: float, g: float, sigma2: float, N: int) -> float:
    return 0.5 * _rate(P * g / (0.5 * N * sigma2))


def tdma_rate(P: float, g: float, sigma2: float, N: int) -> float:
    return 0.5 * _rate(2.0 * P * g / (N * sigma2))


def _sic_decodable(P1, P2, g1, g2, order, reqs, N) -> bool:
    # the strong user must decode the weak user's layer at the weak user's target rate
    if order == USER1_STRONG:
        if reqs.gamma2 == 0:
            return True
        r = _rate(P2 * g1 / (P1 * g1 + N * reqs.sigma2_1))
        return r >= reqs.gamma2 - 1e-9
    if reqs.gamma1 == 0:
        return True
    r = _rate(P1 * g2 / (P2 * g2 + N * reqs.sigma2_2))
    return r >= reqs.gamma1 - 1e-9


def noma_power_alloc(g1: float, g2: float, order: SicOrder, reqs: RateRequirements, N: int) -> PowerSolution:
    """Powers meeting both rate targets with equality under a fixed SIC order."""
    _check_gains(g1, g2)
    a1 = _excess(reqs.gamma1)
    a2 = _excess(reqs.gamma2)
    n1 = N * reqs.sigma2_1 / g1
    n2 = N * reqs.sigma2_2 / g2
    if order == USER1_STRONG:
        P1 = a1 * n1
        P2 = a1 * a2 * n1 + a2 * n2
    elif order == USER2_STRONG:
        P2 = a2 * n2
        P1 = a1 * a2 * n2 + a1 * n1
    else:
        raise ValueError(f"invalid SIC order {order!r}")
    ok = _sic_decodable(P1, P2, g1, g2, order, reqs, N)
    return PowerSolution(P1, P2, "noma", order, sic_warning=not ok)


def noma_total_power(g1: float, g2: float, reqs: RateRequirements, N: int) -> PowerSolution:
    a = noma_power_alloc(g1, g2, USER1_STRONG, reqs, N)
    b = noma_power_alloc(g1, g2, USER2_STRONG, reqs, N)
    return b if b.total < a.total else a


def _oma_power(g1, g2, reqs, N, scheme):
    _check_gains(g1, g2)
    P1 = _excess(reqs.gamma1, 2) * N * reqs.sigma2_1 / (2.0 * g1)
    P2 = _excess(reqs.gamma2, 2) * N * reqs.sigma2_2 / (2.0 * g2)
    return PowerSolution(P1, P2, scheme)


def fdma_power(g1: float, g2: float, reqs: RateRequirements, N: int) -> PowerSolution:
    return _oma_power(g1, g2, reqs, N, "fdma")


def tdma_power(g1_slot1: float, g2_slot2: float, reqs: RateRequirements, N: int) -> PowerSolution:
    """TDMA powers; each gain is evaluated on that slot's own placement."""
    return _oma_power(g1_slot1, g2_slot2, reqs, N, "tdma")


def scheme_power(scheme: str, g1: float, g2: float, reqs: RateRequirements, N: int) -> PowerSolution:
    if scheme == "noma":
        return noma_total_power(g1, g2, reqs, N)
    if scheme == "fdma":
        return fdma_power(g1, g2, reqs, N)
    if scheme == "tdma":
        return tdma_power(g1, g2, reqs, N)
    raise ValueError(f"unknown scheme {scheme!r}")


def power_coefficients(scheme: str, reqs: RateRequirements, N: int) -> np.ndarray:
    """Rows ``C`` with total power = min_r C[r,0]/g1 + C[r,1]/g2.

    NOMA row 0 is SIC order (0,1), row 1 is order (1,0).
    """
    n1 = N * reqs.sigma2_1
    n2 = N * reqs.sigma2_2
    if scheme == "noma":
        a1 = _excess(reqs.gamma1)
        a2 = _excess(reqs.gamma2)
        return np.array([[a1 * 2.0 ** reqs.gamma2 * n1, a2 * n2],
                         [a1 * n1, a2 * 2.0 ** reqs.gamma1 * n2]])
    if scheme in ("fdma", "tdma"):
        return np.array([[_excess(reqs.gamma1, 2) * n1 / 2.0,
                          _excess(reqs.gamma2, 2) * n2 / 2.0]])
    raise ValueError(f"unknown scheme {scheme!r}")

