"""Coarse PA placement by successive convex approximation (phase ignored).

The relaxed problem minimizes ``sum_k d_k / (sum_n 1/dist_kn)**2`` over the
placement. Each PA/user pair gets a reciprocal-distance variable ``theta``
with ``1/theta >= dist``; ``1/theta`` is replaced by its tangent at the
previous iterate, which gives a second-order cone program in
``(x, theta_1, theta_2)``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np
from scipy.optimize import isotonic_regression

from .channel import Geometry, PhysicalConfig, UserPos, user_pa_distance
from .errors import InfeasibleGeometryError, SolverError
from .power import RateRequirements, USER1_STRONG, power_coefficients


@dataclass(frozen=True)
class SchemeCoefficients:
    d1: float
    d2: float

    @property
    def degenerate(self) -> bool:
        return self.d1 == 0 and self.d2 == 0


@dataclass(frozen=True)
class ScaConfig:
    max_iters: int = 50  # bounds the objective trace length, start point included
    rel_tol: float = 1e-6
    subproblem_tol: float = 1e-8
    x_tol: float = 1e-6  # metres; the placement must also have settled
    init_strategy: str = "multistart"  # midpoint start plus a cluster at each user

    def __post_init__(self):
        if self.max_iters < 2:
            raise ValueError("max_iters must be >= 2")
        if not (self.rel_tol > 0 and self.subproblem_tol > 0 and self.x_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.init_strategy not in ("midpoint", "multistart"):
            raise ValueError(f"unknown init strategy {self.init_strategy!r}")


@dataclass
class CoarseResult:
    placement: np.ndarray
    objective_trace: list = field(default_factory=list)
    iterations: int = 0
    status: str = "converged"
    theta: np.ndarray | None = None

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]


def scheme_coefficients(scheme: str, reqs: RateRequirements, N: int, cfg: PhysicalConfig,
                        order=USER1_STRONG) -> SchemeCoefficients:
    """Path-loss weights ``d_k`` (W m^2) of the relaxed objective; ``order`` only matters for NOMA."""
    if scheme == "tdma":
        scheme = "fdma"
    rows = power_coefficients(scheme, reqs, N)
    row = rows[0] if (scheme != "noma" or tuple(order) == tuple(USER1_STRONG)) else rows[1]
    eta2 = cfg.eta ** 2
    return SchemeCoefficients(float(row[0] / eta2), float(row[1] / eta2))


def _distances(xp, users, geometry):
    return np.array([user_pa_distance(u, xp, geometry) for u in users])


def relaxed_objective(placement, users, coeffs: SchemeCoefficients, geometry: Geometry) -> float:
    dist = _distances(np.atleast_1d(placement), users, geometry)
    s = (1.0 / dist).sum(axis=1)
    return float(coeffs.d1 / s[0] ** 2 + coeffs.d2 / s[1] ** 2)


def _translate_into_box(xp, L):
    if xp[0] < 0:
        xp = xp - xp[0]
    if xp[-1] > L:
        xp = xp - (xp[-1] - L)
    return xp


def init_placement(users, geometry: Geometry) -> np.ndarray:
    """Uniform grid centred between the two users, spanning the gap between them."""
    N, L, delta = geometry.N, geometry.L, geometry.delta
    if (N - 1) * delta > L:
        raise InfeasibleGeometryError("(N-1)*delta exceeds L")
    mid = 0.5 * (users[0].x + users[1].x)
    if N == 1:
        return np.array([min(max(mid, 0.0), L)])
    span = abs(users[0].x - users[1].x)
    gap = max(delta, span / (N - 1))
    xp = mid + (np.arange(N) - 0.5 * (N - 1)) * gap
    return _translate_into_box(xp, L)


def project_feasible(xp, geometry: Geometry) -> np.ndarray:
    """Euclidean projection onto {0 <= x <= L, x[n+1] - x[n] >= delta}.

    With ``z_n = x_n - n*delta`` the set becomes a monotone cone intersected
    with a box, whose projection is a clipped isotonic regression.
    """
    xp = np.sort(np.asarray(xp, dtype=np.float64))
    N = xp.size
    if N == 1:
        return np.clip(xp, 0.0, geometry.L)
    offs = np.arange(N) * geometry.delta
    z = isotonic_regression(xp - offs).x
    z = np.clip(z, 0.0, geometry.L - offs[-1])
    out = z + offs
    # isotonic output can tie to ~1 ulp; re-impose the gaps exactly
    for i in range(1, N):
        if out[i] - out[i - 1] < geometry.delta:
            out[i] = out[i - 1] + geometry.delta
    if out[-1] > geometry.L:
        out = out - (out[-1] - geometry.L)
        for i in range(N - 2, -1, -1):
            if out[i + 1] - out[i] < geometry.delta:
                out[i] = out[i + 1] - geometry.delta
    return out


@functools.lru_cache(maxsize=None)
def _subproblem(N: int):
    x = cp.Variable(N)
    th = cp.Variable((2, N))
    a = cp.Parameter((2, N))
    b = cp.Parameter((2, N), nonneg=True)
    xu = cp.Parameter(2)
    D = cp.Parameter(2, nonneg=True)
    w = cp.Parameter(2, nonneg=True)
    L = cp.Parameter(nonneg=True)
    delta = cp.Parameter(nonneg=True)
    ones = np.ones(N)
    cons = [x >= 0, x <= L, th >= 0]
    if N > 1:
        cons.append(cp.diff(x) >= delta)
    for k in range(2):
        lhs = a[k] - cp.multiply(b[k], th[k])
        cons.append(cp.SOC(lhs, cp.vstack([xu[k] - x, D[k] * ones]), axis=0))
    obj = w[0] * cp.power(cp.sum(th[0]), -2) + w[1] * cp.power(cp.sum(th[1]), -2)
    prob = cp.Problem(cp.Minimize(obj), cons)
    return prob, x, th, (a, b, xu, D, w, L, delta)


def solve_subproblem(theta_lin, users, coeffs: SchemeCoefficients, geometry: Geometry,
                     tol: float = 1e-8):
    """Solve the convexified subproblem around ``theta_lin`` (shape (2, N)).

    Returns ``(placement, theta, objective)`` where the placement has been
    projected onto the feasible set and ``objective`` is the subproblem value
    reported by the solver, in watts.
    """
    theta_lin = np.asarray(theta_lin, dtype=np.float64)
    N = geometry.N
    if theta_lin.shape != (2, N) or np.any(theta_lin <= 0):
        raise SolverError("linearization point must be a positive (2, N) array")
    prob, x, th, (a, b, xu, D, w, L, delta) = _subproblem(N)
    a.value = 2.0 / theta_lin
    b.value = 1.0 / theta_lin ** 2
    xu.value = np.array([users[0].x, users[1].x])
    D.value = np.array([u.lateral(geometry.d) for u in users])
    # normalize so the solver sees an O(1) objective
    s = theta_lin.sum(axis=1)
    scale = coeffs.d1 / s[0] ** 2 + coeffs.d2 / s[1] ** 2
    if not scale > 0:
        raise SolverError("degenerate coefficients; nothing to optimize")
    w.value = np.array([coeffs.d1, coeffs.d2]) / scale
    L.value = geometry.L
    delta.value = geometry.delta
    try:
        prob.solve(solver=cp.CLARABEL, tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol)
    except cp.error.SolverError as exc:
        raise SolverError(f"conic solver failed: {exc}") from exc
    if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or x.value is None:
        raise SolverError(f"subproblem status {prob.status}", _violated_constraint(theta_lin, users, geometry))
    xp = project_feasible(x.value, geometry)
    return xp, np.maximum(th.value, 0.0), float(prob.value) * scale


def _violated_constraint(theta_lin, users, geometry):
    # no placement can satisfy 2/theta_l - theta/theta_l^2 >= D_k with theta > 0 if theta_l > 2/D_k
    for k, u in enumerate(users):
        D = u.lateral(geometry.d)
        bad = np.nonzero(theta_lin[k] >= 2.0 / D)[0]
        if bad.size:
            return f"affine distance bound for user {k + 1}, PA {int(bad[0]) + 1}"
    return None


def _run_from(x0, users, coeffs, geometry, config):
    xp = x0
    obj = relaxed_objective(xp, users, coeffs, geometry)
    trace = [obj]
    status = "max-iters"
    it = 0
    # the start point counts as iteration 0, so the trace never exceeds max_iters entries
    for it in range(1, config.max_iters):
        theta_lin = 1.0 / _distances(xp, users, geometry)
        x_new, _, _ = solve_subproblem(theta_lin, users, coeffs, geometry, config.subproblem_tol)
        obj_new = relaxed_objective(x_new, users, coeffs, geometry)
        if obj_new >= obj:
            status = "converged"
            break
        improvement = (obj - obj_new) / obj
        step = float(np.max(np.abs(x_new - xp)))
        xp, obj = x_new, obj_new
        trace.append(obj)
        if improvement < config.rel_tol and step < config.x_tol:
            status = "converged"
            break
    theta = 1.0 / _distances(xp, users, geometry)
    return CoarseResult(xp, trace, it, status, theta)


def run_sca(users, coeffs: SchemeCoefficients, geometry: Geometry,
            config: ScaConfig = ScaConfig()) -> CoarseResult:
    """Iterate the convex subproblem until the relaxed objective stops improving.

    Each step re-linearizes at the tight point ``theta = 1/dist`` of the
    current placement, so the previous iterate stays feasible and the
    objective trace is non-increasing. A step that would not decrease the
    objective ends the run.
    """
    x0 = init_placement(users, geometry)
    if coeffs.degenerate:
        return CoarseResult(x0, [0.0], 0, "degenerate", 1.0 / _distances(x0, users, geometry))
    best = _run_from(x0, users, coeffs, geometry, config)
    if config.init_strategy == "multistart":
        from .tdma import lemma1_placement
        for u in users:
            alt = _run_from(lemma1_placement(u, geometry.N, geometry.delta, geometry),
                            users, coeffs, geometry, config)
            if alt.objective < best.objective:
                best = alt
    return best
