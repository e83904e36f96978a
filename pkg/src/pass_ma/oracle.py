"""Exhaustive grid searches used as independent references for the solvers.

Nothing here shares code with the SCA / fine-tuning path beyond the channel
kernels: candidates are enumerated on explicit grids and scored directly.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .channel import Geometry, PhysicalConfig, UserPos, user_pa_distance
from .errors import ResourceGuardError
from .power import RateRequirements, power_coefficients

MAX_COMBINATIONS = 1e8


def _guard(count):
    if count > MAX_COMBINATIONS:
        raise ResourceGuardError(f"search would enumerate {count:.3g} candidates (limit {MAX_COMBINATIONS:.0e})")


def centered_grid(center: float, halfwidth: float, step: float, lo: float, hi: float) -> np.ndarray:
    """Grid ``center + k*step`` restricted to [lo, hi]; always contains ``center`` if it is inside."""
    k = int(math.floor(halfwidth / step + 1e-9))
    g = center + step * np.arange(-k, k + 1)
    return g[(g >= lo) & (g <= hi)]


def grid_search_single_user(user: UserPos, N: int, window: float, step: float, cfg: PhysicalConfig,
                            geometry: Geometry):
    """Gain-maximizing N-PA placement (N <= 3) on a grid of ``window`` metres centred at the user."""
    if not 1 <= N <= 3:
        raise ValueError("single-user grid search supports 1 <= N <= 3")
    if step > cfg.wavelength / 8:
        raise ValueError("step must not exceed wavelength/8")
    grid = centered_grid(user.x, 0.5 * window, step, 0.0, geometry.L)
    _guard(float(grid.size) ** N / math.factorial(N))
    gain, idx = _kernels.combo_max_gain(grid, N, geometry.delta, user.x, user.lateral(geometry.d),
                                        cfg.k0, cfg.kg, cfg.eta)
    return grid[np.asarray(idx)], gain


def _pair_search(xa, xb, users, coef, cfg, geometry):
    _guard(float(xa.size) * xb.size)
    xu = np.array([u.x for u in users])
    D = np.array([u.lateral(geometry.d) for u in users])
    return _kernels.pair_min_power(xa, xb, geometry.delta, xu, D, cfg.k0, cfg.kg, cfg.eta, coef)


def grid_search_two_user(scheme: str, users, N: int, reqs: RateRequirements, cfg: PhysicalConfig,
                         geometry: Geometry, coarse_step: float = 0.25, refine_step: float | None = None,
                         refine_halfwidth: float = 0.5):
    """Minimum true power of a shared placement (N <= 2): coarse grid on [0, L], then a
    fine grid of +-``refine_halfwidth`` around each PA of the best coarse placement."""
    if scheme not in ("noma", "fdma"):
        raise ValueError("two-user search covers the shared-placement schemes (noma, fdma)")
    if N not in (1, 2):
        raise ValueError("two-user grid search supports N <= 2")
    if refine_step is None:
        refine_step = cfg.wavelength / 16
    if refine_step > cfg.wavelength / 16:
        raise ValueError("refine_step must not exceed wavelength/16")
    coef = power_coefficients(scheme, reqs, N)
    L = geometry.L
    coarse = np.linspace(0.0, L, int(round(L / coarse_step)) + 1)
    if N == 1:
        _guard(coarse.size)
        p = _power_single(coarse, users, coef, cfg, geometry)
        best = float(coarse[int(np.argmin(p))])
        fine = centered_grid(best, refine_halfwidth, refine_step, 0.0, L)
        p = _power_single(fine, users, coef, cfg, geometry)
        k = int(np.argmin(p))
        return np.array([fine[k]]), float(p[k])
    p0, i, j = _pair_search(coarse, coarse, users, coef, cfg, geometry)
    a, b = coarse[i], coarse[j]
    fa = centered_grid(a, refine_halfwidth, refine_step, 0.0, L)
    fb = centered_grid(b, refine_halfwidth, refine_step, 0.0, L)
    p1, i, j = _pair_search(fa, fb, users, coef, cfg, geometry)
    if p1 <= p0:
        return np.array([fa[i], fb[j]]), p1
    return np.array([a, b]), p0


def _power_single(xs, users, coef, cfg, geometry):
    pl = np.asarray(xs, dtype=np.float64)[:, None]
    g = [_kernels.gain_batch(pl, u.x, u.lateral(geometry.d), cfg.k0, cfg.kg, cfg.eta) for u in users]
    return _kernels.scheme_power(coef, g[0], g[1])


def grid_search_relaxed(users, coeffs, N: int, geometry: Geometry, coarse_step: float = 0.05,
                        refine_factor: int = 10):
    """Minimum of the phase-free objective sum_k d_k / (sum_n 1/dist_kn)^2 for N <= 3.

    Placements are parametrized by the first position and the extra gaps
    beyond ``delta`` (so tightly packed clusters are on the grid). A second,
    ``refine_factor`` times finer grid covers one coarse cell around the best point.
    """
    if not 1 <= N <= 3:
        raise ValueError("relaxed grid search supports 1 <= N <= 3")
    L, delta = geometry.L, geometry.delta
    free = L - (N - 1) * delta
    axes = [np.arange(0.0, free + 1e-12, coarse_step)] * N
    best, params = _relaxed_scan(axes, users, coeffs, geometry, free)
    fine_step = coarse_step / refine_factor
    fine_axes = [np.clip(p + fine_step * np.arange(-refine_factor, refine_factor + 1), 0.0, free)
                 for p in params]
    best2, params2 = _relaxed_scan([np.unique(a) for a in fine_axes], users, coeffs, geometry, free)
    if best2 <= best:
        best, params = best2, params2
    xp = params[0] + np.cumsum(np.concatenate([[0.0], np.asarray(params[1:]) + delta]))
    return xp, float(best)


def _relaxed_scan(axes, users, coeffs, geometry, free):
    _guard(float(np.prod([a.size for a in axes])))
    N = len(axes)
    delta = geometry.delta
    best = np.inf
    best_params = None
    w = np.array([coeffs.d1, coeffs.d2])
    for x1 in axes[0]:
        mesh = np.meshgrid(*axes[1:], indexing="ij") if N > 1 else []
        gaps = [m.ravel() for m in mesh]
        total = sum(gaps) if gaps else np.zeros(1)
        ok = x1 + total <= free + 1e-12
        if not np.any(ok):
            continue
        pos = [np.full(int(ok.sum()), x1)]
        acc = np.full(int(ok.sum()), x1)
        for g in gaps:
            acc = acc + delta + g[ok]
            pos.append(acc)
        val = np.zeros(pos[0].size)
        for k, u in enumerate(users):
            s = sum(1.0 / user_pa_distance(u, p, geometry) for p in pos)
            if w[k]:
                val = val + w[k] / s ** 2
        m = int(np.argmin(val))
        if val[m] < best:
            best = float(val[m])
            best_params = [x1] + [g[ok][m] for g in gaps]
    return best, best_params
