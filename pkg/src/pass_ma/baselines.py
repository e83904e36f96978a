"""Conventional-antenna reference systems fixed at the feed point [0, 0, d].

Con1 is a single antenna. Con2 is an N-element half-wavelength ULA along x
behind one RF chain with unit-modulus analog weights of magnitude 1/sqrt(N).
In both cases the 1/sqrt(N) split is already inside the effective gain, so the
power formulas are evaluated with N=1 noise scaling.
"""

from __future__ import annotations

import numpy as np

from .channel import Geometry, PhysicalConfig, UserPos
from .errors import UnreachableUserError
from .power import RateRequirements, scheme_power

CON2_SWEEP = np.linspace(0.0, 1.0, 33)


def con1_gain(user: UserPos, cfg: PhysicalConfig, geometry: Geometry) -> float:
    D = user.lateral(geometry.d)
    return cfg.eta ** 2 / (user.x ** 2 + D ** 2)


def con1_power(scheme: str, users, reqs: RateRequirements, cfg: PhysicalConfig, geometry: Geometry):
    g1, g2 = (con1_gain(u, cfg, geometry) for u in users)
    return scheme_power(scheme, g1, g2, reqs, 1)


def con2_elements(N: int, cfg: PhysicalConfig) -> np.ndarray:
    return np.arange(N) * 0.5 * cfg.wavelength


def _free_space(user, xs, cfg, geometry):
    dist = np.sqrt((user.x - xs) ** 2 + user.lateral(geometry.d) ** 2)
    return cfg.k0 * dist, cfg.eta / dist


def con2_gain(user: UserPos, weights, cfg: PhysicalConfig, geometry: Geometry) -> float:
    w = np.asarray(weights)
    phase, amp = _free_space(user, con2_elements(w.size, cfg), cfg, geometry)
    return float(abs(np.sum(w * amp * np.exp(-1j * phase))) ** 2)


def con2_power(scheme: str, users, reqs: RateRequirements, N: int, cfg: PhysicalConfig,
               geometry: Geometry):
    """Con2 power. TDMA uses per-slot matched weights; NOMA/FDMA share one weight
    vector picked from a 33-point interpolation between the two matched profiles."""
    xs = con2_elements(N, cfg)
    ph1, _ = _free_space(users[0], xs, cfg, geometry)
    ph2, _ = _free_space(users[1], xs, cfg, geometry)
    scale = 1.0 / np.sqrt(N)
    if scheme == "tdma":
        g1 = con2_gain(users[0], scale * np.exp(1j * ph1), cfg, geometry)
        g2 = con2_gain(users[1], scale * np.exp(1j * ph2), cfg, geometry)
        return scheme_power("tdma", g1, g2, reqs, 1)
    best = None
    for t in CON2_SWEEP:
        w = scale * np.exp(1j * ((1.0 - t) * ph1 + t * ph2))
        g1, g2 = con2_gain(users[0], w, cfg, geometry), con2_gain(users[1], w, cfg, geometry)
        if g1 <= 0 or g2 <= 0:
            continue  # exact null towards a user
        sol = scheme_power(scheme, g1, g2, reqs, 1)
        if best is None or sol.total < best.total:
            best = sol
    if best is None:
        raise UnreachableUserError("every Con2 weight profile nulls one of the users")
    return best
