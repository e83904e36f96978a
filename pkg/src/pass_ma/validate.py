"""Release checks: solver output against the brute-force oracles, plus monotonicity invariants.

Each check yields a :class:`CheckResult` whose ``margin`` is the worst measured
value and ``limit`` the bound it is held to. ``format_line`` gives the
machine-readable form printed by ``pass-ma validate``.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .channel import channel_gain
from .experiments import ScenarioConfig, drop_users
from .finetune import refine_placement
from .oracle import grid_search_relaxed, grid_search_single_user, grid_search_two_user
from .power import USER1_STRONG, USER2_STRONG
from .sca import run_sca, scheme_coefficients
from .solver import solve
from .tdma import solve_slot


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    limit: float
    cases: int
    seconds: float
    detail: str = ""

    def format_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (f"{status} {self.name} margin={self.margin:.6g} limit={self.limit:g} "
                f"cases={self.cases} time_s={self.seconds:.1f}")
        return line + (f" detail={self.detail}" if self.detail else "")


# Window for the single-user oracle. The gain optimum sits within a few
# wavelengths of the user, so 0.15 m covers it while keeping N=3 enumerable.
TDMA_WINDOW = 0.15


def check_tdma_oracle(config: ScenarioConfig, cases: int = 20, tol: float = 0.99) -> CheckResult:
    """Symmetric user-centred cluster + phase refinement vs exhaustive single-user search (N = 1, 2, 3)."""
    t0 = time.perf_counter()
    cfg = config.physical()
    worst = np.inf
    for k in range(cases):
        geometry = config.geometry(1 + k % 3)
        user = drop_users(config.seed, k, geometry)[0]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            xp = solve_slot(user, cfg, geometry)
        g = channel_gain(user, xp, cfg, geometry)
        _, g_or = grid_search_single_user(user, geometry.N, TDMA_WINDOW, cfg.wavelength / 16, cfg, geometry)
        worst = min(worst, g / g_or)
    return CheckResult("tdma_oracle_gain_ratio", worst >= tol, worst, tol, cases, time.perf_counter() - t0)


def check_shared_oracle(config: ScenarioConfig, cases: int = 10, tol: float = 1.05) -> CheckResult:
    """SCA + fine-tune at N = 2 vs the two-PA grid search, NOMA and FDMA."""
    t0 = time.perf_counter()
    cfg = config.physical()
    geometry = config.geometry(2)
    reqs = config.requirements()
    worst = 0.0
    for k in range(cases):
        users = drop_users(config.seed, k, geometry)
        for scheme in ("noma", "fdma"):
            p = solve(scheme, users, reqs, cfg, geometry).total_power
            _, p_or = grid_search_two_user(scheme, users, 2, reqs, cfg, geometry)
            worst = max(worst, p / p_or)
    return CheckResult("shared_oracle_power_ratio", worst <= tol, worst, tol, cases, time.perf_counter() - t0)


def _coefficient_sets(reqs, N, cfg):
    return [scheme_coefficients("noma", reqs, N, cfg, USER1_STRONG),
            scheme_coefficients("noma", reqs, N, cfg, USER2_STRONG),
            scheme_coefficients("fdma", reqs, N, cfg)]


def check_sca_oracle(config: ScenarioConfig, cases: int = 20, tol: float = 1.02) -> CheckResult:
    """Final relaxed objective vs the relaxed grid search, N = 1, 2, 3."""
    t0 = time.perf_counter()
    cfg = config.physical()
    reqs = config.requirements()
    worst = 0.0
    for k in range(cases):
        geometry = config.geometry(1 + k % 3)
        users = drop_users(config.seed, k, geometry)
        for coeffs in _coefficient_sets(reqs, geometry.N, cfg):
            res = run_sca(users, coeffs, geometry)
            _, best = grid_search_relaxed(users, coeffs, geometry.N, geometry)
            worst = max(worst, res.objective_trace[-1] / best)
    return CheckResult("sca_relaxed_oracle_ratio", worst <= tol, worst, tol, cases, time.perf_counter() - t0)


def check_monotone(config: ScenarioConfig, cases: int = 100, sca_tol: float | None = None) -> list:
    """SCA traces non-increasing (within the subproblem tolerance) and fine-tuning never worse
    than the coarse placement, at the configured N."""
    t0 = time.perf_counter()
    cfg = config.physical()
    geometry = config.geometry()
    reqs = config.requirements()
    sca_worst = -np.inf
    ft_worst = -np.inf
    for k in range(cases):
        users = drop_users(config.seed, k, geometry)
        for scheme, coeffs in zip(("noma", "noma", "fdma"), _coefficient_sets(reqs, geometry.N, cfg)):
            res = run_sca(users, coeffs, geometry)
            tr = np.asarray(res.objective_trace)
            if tr.size > 1:
                sca_worst = max(sca_worst, float(np.max(np.diff(tr) / tr[:-1])))
            ref = refine_placement(res.placement, users, scheme, reqs, cfg, geometry)
            ft_worst = max(ft_worst, ref.true_power / ref.coarse_power - 1.0)
    tol = 1e-8 if sca_tol is None else sca_tol
    dt = time.perf_counter() - t0
    sca_worst = max(sca_worst, 0.0) if np.isfinite(sca_worst) else 0.0
    return [CheckResult("sca_monotone_max_rel_increase", sca_worst <= tol, sca_worst, tol, cases, dt),
            CheckResult("finetune_monotone_max_rel_increase", ft_worst <= 0.0, max(ft_worst, 0.0), 0.0,
                        cases, dt)]


def run_validation(config: ScenarioConfig = ScenarioConfig(), quick: bool = False) -> list:
    """All checks; ``quick`` shrinks the scenario counts for a fast smoke run."""
    n = (lambda full: max(3, full // 5)) if quick else (lambda full: full)
    results = [check_tdma_oracle(config, n(20)),
               check_shared_oracle(config, n(10)),
               check_sca_oracle(config, n(20))]
    results += check_monotone(config, n(100))
    return results

