"""Scheme dispatch: two-stage placement for NOMA/FDMA, per-slot placement for TDMA, baselines."""

from __future__ import annotations

import time

import numpy as np

from .baselines import con1_power, con2_elements, con2_power
from .channel import Geometry, PhysicalConfig, channel_gain
from .finetune import FineTuneConfig, refine_placement
from .power import USER1_STRONG, USER2_STRONG, PowerSolution, RateRequirements, scheme_power
from .report import SolveReport
from .sca import ScaConfig, init_placement, run_sca, scheme_coefficients
from .tdma import tdma_solve

ALL_SCHEMES = ("noma", "fdma", "tdma", "con1", "con2")
PASS_SCHEMES = ("noma", "fdma", "tdma")


def solve_shared(scheme: str, users, reqs: RateRequirements, cfg: PhysicalConfig, geometry: Geometry,
                 sca_cfg: ScaConfig = ScaConfig(), ft_cfg: FineTuneConfig = FineTuneConfig(),
                 return_stages: bool = False):
    """SCA coarse placement followed by phase fine-tuning, for one shared placement.

    NOMA runs the pipeline once per SIC order (the relaxed weights differ),
    plus once more starting from the refined FDMA placement, and keeps the
    lowest true power. At any fixed placement NOMA needs no more power than
    FDMA, so that extra start makes NOMA never worse than FDMA.
    """
    t0 = time.perf_counter()
    N = geometry.N
    if reqs.gamma1 == 0 and reqs.gamma2 == 0:
        xp = init_placement(users, geometry)
        return SolveReport(scheme, [xp], PowerSolution(0.0, 0.0, scheme, USER1_STRONG if scheme == "noma" else None),
                           status="degenerate")
    orders = (USER1_STRONG, USER2_STRONG) if scheme == "noma" else (USER1_STRONG,)
    best = None
    stages = []
    iters = 0
    for order in orders:
        coeffs = scheme_coefficients(scheme, reqs, N, cfg, order)
        coarse = run_sca(users, coeffs, geometry, sca_cfg)
        iters += coarse.iterations
        refined = refine_placement(coarse.placement, users, scheme, reqs, cfg, geometry, ft_cfg)
        stages.append((coarse, refined))
        if best is None or refined.true_power < best[1].true_power:
            best = (coarse, refined)
    if scheme == "noma":
        _, ((fcoarse, frefined),) = solve_shared("fdma", users, reqs, cfg, geometry, sca_cfg, ft_cfg,
                                                 return_stages=True)
        iters += fcoarse.iterations
        refined = refine_placement(frefined.placement, users, scheme, reqs, cfg, geometry, ft_cfg)
        stages.append((fcoarse, refined))
        if refined.true_power < best[1].true_power:
            best = (fcoarse, refined)
    coarse, refined = best
    xp = refined.placement
    g1 = channel_gain(users[0], xp, cfg, geometry)
    g2 = channel_gain(users[1], xp, cfg, geometry)
    report = SolveReport(scheme, [xp], scheme_power(scheme, g1, g2, reqs, N), (g1, g2),
                         objective_trace=list(coarse.objective_trace), sca_iters=iters,
                         runtime_ms=1000.0 * (time.perf_counter() - t0), status=coarse.status)
    if return_stages:
        return report, stages
    return report


def solve(scheme: str, users, reqs: RateRequirements, cfg: PhysicalConfig, geometry: Geometry,
          sca_cfg: ScaConfig = ScaConfig(), ft_cfg: FineTuneConfig = FineTuneConfig()) -> SolveReport:
    if scheme in ("noma", "fdma"):
        return solve_shared(scheme, users, reqs, cfg, geometry, sca_cfg, ft_cfg)
    if scheme == "tdma":
        return tdma_solve(users, reqs, cfg, geometry)
    base, _, ma = scheme.partition("_")
    if base in ("con1", "con2") and ma in ("noma", "fdma", "tdma"):
        t0 = time.perf_counter()
        if base == "con1":
            sol = con1_power(ma, users, reqs, cfg, geometry)
            xs = np.array([0.0])
        else:
            sol = con2_power(ma, users, reqs, geometry.N, cfg, geometry)
            xs = con2_elements(geometry.N, cfg)
        return SolveReport(scheme, [xs], sol, runtime_ms=1000.0 * (time.perf_counter() - t0))
    raise ValueError(f"unknown scheme {scheme!r}")


def expand_schemes(names) -> list:
    """Expand bare ``con1``/``con2`` into one baseline entry per multiple-access scheme."""
    out = []
    for name in names:
        if name in ("con1", "con2"):
            out.extend(f"{name}_{ma}" for ma in ("noma", "fdma", "tdma"))
        else:
            out.append(name)
    return out
