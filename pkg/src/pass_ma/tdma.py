"""TDMA: each slot gets its own placement, clustered on the served user."""

from __future__ import annotations

import math
import time
import warnings

import numpy as np
from scipy.optimize import minimize_scalar

from .channel import (Geometry, PhysicalConfig, UserPos, channel_gain, total_phase)
from .errors import InfeasibleGeometryError
from .power import RateRequirements, tdma_power
from .report import SolveReport


def lemma1_placement(user: UserPos, N: int, delta: float, geometry: Geometry) -> np.ndarray:
    """N PAs at spacing ``delta`` centred on the user's x, translated into [0, L] if needed."""
    if (N - 1) * delta > geometry.L:
        raise InfeasibleGeometryError("(N-1)*delta exceeds L")
    if user.lateral(geometry.d) < 10 * delta:
        warnings.warn("user lateral distance below 10*delta; symmetric cluster may not be optimal",
                      RuntimeWarning, stacklevel=2)
    xp = user.x - 0.5 * (N - 1) * delta + np.arange(N) * delta
    if xp[0] < 0:
        xp = xp - xp[0]
    if xp[-1] > geometry.L:
        xp = xp - (xp[-1] - geometry.L)
    return xp


def _wrapped(a):
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def _align_pass(xp, user, cfg, geometry, grid_step, direction):
    """Phase-align PAs to the anchor (first PA if direction=+1, last if -1).

    Each PA is placed at ``base + direction*eps`` with ``eps in [0, lambda]`` and
    ``base`` the closest spacing-feasible spot next to the already aligned
    neighbour; ``eps`` is picked on a grid and then polished.
    """
    lam = cfg.wavelength
    delta, L = geometry.delta, geometry.L
    out = xp.copy()
    order = range(1, xp.size) if direction > 0 else range(xp.size - 2, -1, -1)
    anchor = out[0] if direction > 0 else out[-1]
    ref = float(total_phase(user, anchor, cfg, geometry))
    eps = np.arange(0.0, lam + 0.5 * grid_step, grid_step)
    for n in order:
        prev = out[n - direction]
        if direction > 0:
            base = max(out[n], prev + delta)
            room = L - (xp.size - 1 - n) * delta - base
        else:
            base = min(out[n], prev - delta)
            room = base - n * delta
        cand = eps[eps <= room] if room < lam else eps
        if cand.size == 0:
            out[n] = base
            continue

        def mismatch(e):
            return abs(_wrapped(float(total_phase(user, base + direction * e, cfg, geometry)) - ref))

        mis = np.abs(_wrapped(total_phase(user, base + direction * cand, cfg, geometry) - ref))
        k = int(np.argmin(mis))
        e_best, m_best = cand[k], mis[k]
        lo = max(0.0, e_best - grid_step)
        hi = min(cand[-1], e_best + grid_step)
        if hi > lo:
            res = minimize_scalar(mismatch, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-9 * lam})
            if res.fun < m_best:
                e_best = float(res.x)
        out[n] = base + direction * e_best
    return out


def phase_refine_single(placement, user: UserPos, cfg: PhysicalConfig, geometry: Geometry,
                        grid_step: float | None = None) -> np.ndarray:
    """Wavelength-scale shifts so every PA arrives in phase with the first one at ``user``."""
    xp = np.asarray(placement, dtype=np.float64).copy()
    if xp.size == 1:
        return xp
    lam = cfg.wavelength
    step = lam / 50 if grid_step is None else grid_step
    span = (xp.size - 1) * lam
    direction = 1 if xp[-1] + span <= geometry.L or xp[0] - span < 0 else -1
    refined = _align_pass(xp, user, cfg, geometry, step, direction)
    if channel_gain(user, refined, cfg, geometry) < channel_gain(user, xp, cfg, geometry):
        return xp
    return refined


def solve_slot(user: UserPos, cfg: PhysicalConfig, geometry: Geometry) -> np.ndarray:
    base = lemma1_placement(user, geometry.N, geometry.delta, geometry)
    return phase_refine_single(base, user, cfg, geometry)


def tdma_solve(users, reqs: RateRequirements, cfg: PhysicalConfig, geometry: Geometry) -> SolveReport:
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        slots = [solve_slot(u, cfg, geometry) for u in users]
    g1 = channel_gain(users[0], slots[0], cfg, geometry)
    g2 = channel_gain(users[1], slots[1], cfg, geometry)
    power = tdma_power(g1, g2, reqs, geometry.N)
    return SolveReport("tdma", slots, power, (g1, g2),
                       runtime_ms=1000.0 * (time.perf_counter() - t0))
