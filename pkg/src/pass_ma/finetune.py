"""Wavelength-scale refinement of a coarse placement for constructive combining.

The central PA stays put. PAs to its right are revisited left to right, then
PAs to its left right to left. Each one searches a short segment around its
coarse position, plus short segments around offset seeds where both users'
phases line up again, and keeps the candidate with the lowest true
(phase-aware) transmit power. The current position is always a candidate, so
no step can make things worse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels
from .channel import Geometry, PhysicalConfig, UserPos
from .errors import SingularGeometryError
from .power import RateRequirements, power_coefficients


@dataclass(frozen=True)
class FineTuneConfig:
    grid_step: float | None = None  # None -> wavelength / 50
    segment_halfwidth_factor: float = 3.0
    m_diff_candidates: tuple = (-3, -2, -1, 1, 2, 3)
    polish: bool = True
    reseed_rounds: int = 3
    max_sweeps: int = 10  # forward+reverse passes, repeated while the power still drops

    def step_for(self, cfg: PhysicalConfig) -> float:
        step = cfg.wavelength / 50 if self.grid_step is None else self.grid_step
        if not 0 < step <= cfg.wavelength / 10:
            raise ValueError("grid_step must lie in (0, wavelength/10]")
        return step


@dataclass
class RefineResult:
    placement: np.ndarray
    true_power: float
    coarse_power: float
    log: list = field(default_factory=list)


def _direction_cosine(x_ref, user: UserPos, d: float) -> float:
    D = user.lateral(d)
    return (x_ref - user.x) / math.hypot(x_ref - user.x, D)


def approx_phase(x_prev: float, x: float, user: UserPos, cfg: PhysicalConfig, geometry: Geometry) -> float:
    """First-order expansion of the total phase at ``x`` around the neighbouring PA at ``x_prev``."""
    D = user.lateral(geometry.d)
    r = math.hypot(x_prev - user.x, D)
    return cfg.k0 * ((x_prev - user.x) / r * (x - x_prev) + r) + cfg.kg * x


def forward_offset(x_ref: float, users, cfg: PhysicalConfig, geometry: Geometry, m_diff: int) -> float:
    """Shift from the PA at ``x_ref`` that keeps both users' linearized phases 2*pi-aligned
    up to the integer difference ``m_diff = m1 - m2``."""
    den = (_direction_cosine(x_ref, users[0], geometry.d)
           - _direction_cosine(x_ref, users[1], geometry.d))
    if abs(den) < 1e-9:
        raise SingularGeometryError(f"users share the direction cosine at x={x_ref:.6g}")
    return cfg.wavelength * m_diff / den


def backward_offset(x_ref: float, users, cfg: PhysicalConfig, geometry: Geometry, m_diff: int) -> float:
    """Same offset as :func:`forward_offset`; the caller subtracts it (x[n-1] = x[n] - offset)."""
    return forward_offset(x_ref, users, cfg, geometry, m_diff)


class _TruePower:
    def __init__(self, users, scheme, reqs, cfg, geometry):
        self.coef = power_coefficients(scheme, reqs, geometry.N)
        self.args = [(u.x, u.lateral(geometry.d)) for u in users]
        self.cfg = cfg

    def __call__(self, placements):
        c = self.cfg
        g1 = _kernels.gain_batch(placements, *self.args[0], c.k0, c.kg, c.eta)
        g2 = _kernels.gain_batch(placements, *self.args[1], c.k0, c.kg, c.eta)
        return _kernels.scheme_power(self.coef, g1, g2)


def _seeds(x_nb, users, cfg, geometry, ft, sign, coef):
    """Offset-derived candidate positions next to the finalized neighbour ``x_nb``."""
    out = []
    try:
        for m in ft.m_diff_candidates:
            out.append(x_nb + sign * forward_offset(x_nb, users, cfg, geometry, m))
    except SingularGeometryError:
        # align the user with the heavier power weight on its own
        k = int(np.argmax(coef.max(axis=0)))
        rate = _direction_cosine(x_nb, users[k], geometry.d) / cfg.wavelength + 1.0 / cfg.guided_wavelength
        reach = 2 * ft.segment_halfwidth_factor * geometry.delta
        mk = 1
        while mk / rate <= reach + geometry.delta:
            out.append(x_nb + sign * mk / rate)
            mk += 1
    return out


def _local_seeds(xp, n, users, cfg, geometry, ft):
    """Positions near PA ``n`` where both users' phase mismatches to the rest of the
    array agree modulo 2*pi (Newton step on their difference, linearized at ``x_n``)."""
    x = xp[n]
    rest = np.delete(xp, n)
    mis = []
    dcos = 0.0
    for k, u in enumerate(users):
        D = u.lateral(geometry.d)
        dist = np.hypot(rest - u.x, D)
        target = np.angle(np.sum(np.exp(-1j * (cfg.k0 * dist + cfg.kg * rest)) / dist))
        own = cfg.k0 * math.hypot(x - u.x, D) + cfg.kg * x
        mis.append(-own - target)
        dcos += (1 if k == 0 else -1) * _direction_cosine(x, u, geometry.d)
    if abs(dcos) < 1e-9:
        return []
    diff = (mis[0] - mis[1]) % (2 * math.pi)
    # moving by s changes the mismatch difference by -k0*dcos*s
    base = diff / (cfg.k0 * dcos)
    period = cfg.wavelength / abs(dcos)
    ms = sorted({0, *ft.m_diff_candidates})
    return [x + base + m * period for m in ms]


def _candidates(xp, n, values, sign, delta):
    """Placements with PA ``n`` moved to each of ``values``; later PAs pushed to keep spacing."""
    pl = np.repeat(xp[None, :], len(values), axis=0)
    pl[:, n] = values
    N = xp.size
    if sign > 0:
        for m in range(n + 1, N):
            pl[:, m] = np.maximum(xp[m], pl[:, n] + (m - n) * delta)
    else:
        for m in range(n - 1, -1, -1):
            pl[:, m] = np.minimum(xp[m], pl[:, n] - (n - m) * delta)
    return pl


def _segment(a, b, step):
    if a > b:
        return np.empty(0)
    return np.append(np.arange(a, b, step), b)


def _grid(seeds, hw, lo_f, hi_f, step):
    """Candidates within +-hw of every seed, clipped to the feasible interval."""
    parts = [_segment(max(x - hw, lo_f), min(x + hw, hi_f), step) for x in seeds]
    return np.concatenate(parts) if parts else np.empty(0)


def _refine_one(xp, n, c, sign, users, cfg, geometry, ft, step, objective, coef):
    delta, L, N = geometry.delta, geometry.L, xp.size
    hw = ft.segment_halfwidth_factor * delta
    # feasibility limits given the finalized neighbour and the PAs still to be pushed
    if sign > 0:
        lo_f, hi_f = xp[n - 1] + delta, L - (N - 1 - n) * delta
        gap = xp[n] - xp[c]
        lo, hi = (xp[n] - hw, xp[n] + hw) if gap >= 4 * delta else (xp[c] + delta, xp[n] + hw)
    else:
        lo_f, hi_f = n * delta, xp[n + 1] - delta
        gap = xp[c] - xp[n]
        lo, hi = (xp[n] - hw, xp[n] + hw) if gap >= 4 * delta else (xp[n] - hw, xp[c] - delta)
    seeds = _seeds(xp[n - sign], users, cfg, geometry, ft, sign, coef)
    seeds += _local_seeds(xp, n, users, cfg, geometry, ft)
    vals = np.concatenate([[xp[n]], _segment(max(lo, lo_f), min(hi, hi_f), step),
                           _grid(seeds, hw, lo_f, hi_f, step)])
    power = objective(_candidates(xp, n, vals, sign, delta))
    k = int(np.argmin(power))
    best_x, best_p = float(vals[k]), float(power[k])
    # re-seed around the winner: the local seeds depend on where PA n sits
    for _ in range(ft.reseed_rounds):
        moved = xp.copy()
        moved[n] = best_x
        vals = _grid(_local_seeds(moved, n, users, cfg, geometry, ft), hw, lo_f, hi_f, step)
        if vals.size == 0:
            break
        power_r = objective(_candidates(xp, n, vals, sign, delta))
        j = int(np.argmin(power_r))
        if power_r[j] >= best_p:
            break
        best_x, best_p = float(vals[j]), float(power_r[j])
    if ft.polish:
        a, b = max(lo_f, best_x - step), min(hi_f, best_x + step)
        if b > a:
            res = minimize_scalar(lambda v: float(objective(_candidates(xp, n, [v], sign, delta))[0]),
                                  bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-6 * step})
            if res.fun < best_p:
                best_x, best_p = float(res.x), float(res.fun)
    before = float(power[0])
    new = _candidates(xp, n, [best_x], sign, delta)[0]
    return new, (n, before, best_p)


def central_index(N: int) -> int:
    """0-based index of the reference PA: N/2 for even N, ceil(N/2) for odd (1-based)."""
    return (N // 2 if N % 2 == 0 else (N + 1) // 2) - 1


def refine_placement(coarse, users, scheme: str, reqs: RateRequirements, cfg: PhysicalConfig,
                     geometry: Geometry, ft_cfg: FineTuneConfig = FineTuneConfig()) -> RefineResult:
    xp = np.array(coarse, dtype=np.float64)
    objective = _TruePower(users, scheme, reqs, cfg, geometry)
    coarse_power = float(objective(xp[None, :])[0])
    N = xp.size
    if N < 2:
        return RefineResult(xp, coarse_power, coarse_power)
    step = ft_cfg.step_for(cfg)
    coef = objective.coef
    c = central_index(N)
    log = []
    power = coarse_power
    for _ in range(max(1, ft_cfg.max_sweeps)):
        start = power
        for n in range(c + 1, N):
            xp, entry = _refine_one(xp, n, c, +1, users, cfg, geometry, ft_cfg, step, objective, coef)
            log.append(entry)
        for n in range(c - 1, -1, -1):
            xp, entry = _refine_one(xp, n, c, -1, users, cfg, geometry, ft_cfg, step, objective, coef)
            log.append(entry)
        power = float(objective(xp[None, :])[0])
        if not power < start * (1.0 - 1e-9):
            break
    return RefineResult(xp, power, coarse_power, log)
