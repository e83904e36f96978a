"""Scenario configuration, random user drops and the N / rate sweeps behind the CLI.

Config files are plain ``key = value`` lines with ``#`` comments::

    N = 6
    gamma1_bpshz = 3
    sigma2_dbm = -90, -90     # one value, or one per user
    delta_min = half_wavelength
    schemes = noma, fdma, tdma, con1, con2

Sweep CSVs are deterministic: rows are sorted by (drop_id, scheme, sweep
value) and wall-clock timings go to a separate ``.timing.csv`` next to it.
"""

from __future__ import annotations

import csv
import io
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .channel import Geometry, PhysicalConfig, UserPos
from .errors import ConfigError, PassError
from .power import RateRequirements, dbm_to_watt, watt_to_dbm
from .solver import ALL_SCHEMES, expand_schemes, solve

DEFAULT_N_VALUES = (2, 4, 6, 8, 10)
DEFAULT_GAMMA1_VALUES = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)


@dataclass(frozen=True)
class ScenarioConfig:
    fc_hz: float = 28e9
    n_eff: float = 1.4
    d_m: float = 3.0
    L_m: float = 15.0
    N: int = 6
    delta_min: float | None = None  # None -> half wavelength
    gamma1_bpshz: float = 3.0
    gamma2_bpshz: float = 3.0
    sigma2_dbm: tuple = (-90.0, -90.0)
    seed: int = 7
    drops: int = 100
    schemes: tuple = ALL_SCHEMES

    def physical(self) -> PhysicalConfig:
        return PhysicalConfig(f_c=self.fc_hz, n_eff=self.n_eff)

    def spacing(self) -> float:
        if self.delta_min is None:
            return 0.5 * self.physical().wavelength
        return self.delta_min

    def geometry(self, N: int | None = None) -> Geometry:
        return Geometry(d=self.d_m, L=self.L_m, N=self.N if N is None else int(N), delta=self.spacing())

    def requirements(self, gamma1: float | None = None) -> RateRequirements:
        g1 = self.gamma1_bpshz if gamma1 is None else gamma1
        return RateRequirements(g1, self.gamma2_bpshz,
                                dbm_to_watt(self.sigma2_dbm[0]), dbm_to_watt(self.sigma2_dbm[1]))

    def validate(self) -> "ScenarioConfig":
        self.physical()
        self.geometry()
        self.requirements()
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.drops < 1:
            raise ValueError("drops must be at least 1")
        bad = [s for s in self.schemes if s not in ALL_SCHEMES]
        if bad or not self.schemes:
            raise ValueError(f"schemes must be a non-empty subset of {', '.join(ALL_SCHEMES)}")
        return self


def _parse_float(v):
    return float(v)


def _parse_positive(v):
    f = float(v)
    if not f > 0:
        raise ValueError(f"must be positive, got {v}")
    return f


def _parse_nonneg(v):
    f = float(v)
    if not f >= 0:
        raise ValueError(f"must be non-negative, got {v}")
    return f


def _parse_int(v, lo=0):
    f = float(v)
    if f != int(f):
        raise ValueError(f"expected an integer, got {v!r}")
    if f < lo:
        raise ValueError(f"must be at least {lo}")
    return int(v) if v.strip().isdigit() else int(f)


def _parse_delta(v):
    return None if v.strip().lower() == "half_wavelength" else _parse_positive(v)


def _parse_sigma(v):
    vals = tuple(_parse_float(p) for p in v.split(",") if p.strip())
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2:
        raise ValueError("sigma2_dbm takes one value or one per user")
    return vals


def _parse_schemes(v):
    names = tuple(dict.fromkeys(p.strip().lower() for p in v.split(",") if p.strip()))
    bad = [n for n in names if n not in ALL_SCHEMES]
    if bad or not names:
        raise ValueError(f"unknown scheme(s) {', '.join(bad) or '(none given)'}")
    return names


_PARSERS = {
    "fc_hz": _parse_positive, "n_eff": _parse_positive, "d_m": _parse_positive,
    "L_m": _parse_positive, "N": lambda v: _parse_int(v, 1), "delta_min": _parse_delta,
    "gamma1_bpshz": _parse_nonneg, "gamma2_bpshz": _parse_nonneg, "sigma2_dbm": _parse_sigma,
    "seed": _parse_int, "drops": lambda v: _parse_int(v, 1), "schemes": _parse_schemes,
}


def parse_config(text: str) -> ScenarioConfig:
    values = {}
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key or not val:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", line=lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        try:
            values[key] = (_PARSERS[key](val), lineno)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}", line=lineno) from None
    cfg = ScenarioConfig(**{k: v for k, (v, _) in values.items()})
    try:
        return cfg.validate()
    except (ValueError, PassError) as exc:
        # cross-field problems (e.g. N PAs not fitting on L) have no single line
        raise ConfigError(str(exc)) from None


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def drop_users(seed: int, drop_id: int, geometry: Geometry):
    """Users for one drop.

    Uses numpy's PCG64 seeded through ``SeedSequence([seed, drop_id])`` and four
    uniform draws in the order x1, y1, x2, y2, so a drop never depends on how
    many other drops were generated.
    """
    u = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(drop_id)]))).random(4)
    L = geometry.L
    return (UserPos(float(L * u[0]), float(L * (u[1] - 0.5))),
            UserPos(float(L * u[2]), float(L * (u[3] - 0.5))))


ROW_FIELDS = ("seed", "drop_id", "scheme", "N", "gamma1", "gamma2", "user1_x", "user1_y",
              "user2_x", "user2_y", "total_power_w", "total_power_dbm", "sic_order",
              "placement", "sca_iters", "error")


@dataclass
class SweepResultRow:
    seed: int
    drop_id: int
    scheme: str
    N: int
    gamma1: float
    gamma2: float
    user1_x: float
    user1_y: float
    user2_x: float
    user2_y: float
    total_power_w: float = math.nan
    sic_order: str = ""
    placement: str = ""
    sca_iters: int = 0
    runtime_ms: float = 0.0
    error: str = ""

    @property
    def total_power_dbm(self) -> float:
        return watt_to_dbm(self.total_power_w) if self.total_power_w == self.total_power_w else math.nan

    def csv_values(self) -> list:
        out = []
        for name in ROW_FIELDS:
            v = getattr(self, name)
            if name == "total_power_dbm":
                out.append("" if math.isnan(v) else f"{v:.4f}")
            elif name == "total_power_w":
                out.append("" if math.isnan(v) else repr(float(v)))
            elif isinstance(v, float):
                out.append(repr(v))
            else:
                out.append(str(v))
        return out


def solve_scenario(config: ScenarioConfig, users, N: int | None = None, gamma1: float | None = None,
                   drop_id: int = 0) -> list:
    """Rows for every configured scheme on one scenario; solver failures become error rows."""
    geometry = config.geometry(N)
    reqs = config.requirements(gamma1)
    cfg = config.physical()
    rows = []
    for scheme in expand_schemes(config.schemes):
        row = SweepResultRow(config.seed, drop_id, scheme, geometry.N, reqs.gamma1, reqs.gamma2,
                             users[0].x, users[0].y, users[1].x, users[1].y)
        try:
            rep = solve(scheme, users, reqs, cfg, geometry)
        except PassError as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        else:
            row.total_power_w = rep.total_power
            row.sic_order = str(rep.power.order) if rep.power.order is not None else ""
            row.placement = rep.placement_str()
            row.sca_iters = rep.sca_iters
            row.runtime_ms = rep.runtime_ms
        rows.append(row)
    return rows


def _run_point(args):
    config, variable, value, drop_id = args
    users = drop_users(config.seed, drop_id, config.geometry())
    if variable == "N":
        return value, solve_scenario(config, users, N=int(value), drop_id=drop_id)
    return value, solve_scenario(config, users, gamma1=float(value), drop_id=drop_id)


@dataclass
class SweepResult:
    variable: str
    values: tuple
    rows: list = field(default_factory=list)

    def sort_key(self, row):
        v = row.N if self.variable == "N" else row.gamma1
        return (row.drop_id, row.scheme, v)


def run_sweep(config: ScenarioConfig, variable: str, values, workers: int = 1) -> SweepResult:
    """Solve every (drop, sweep value) pair. ``variable`` is ``"N"`` or ``"gamma1"``.

    Users depend only on (seed, drop_id), so all sweep values see the same drops.
    """
    if variable not in ("N", "gamma1"):
        raise ValueError("variable must be 'N' or 'gamma1'")
    values = tuple(values)
    tasks = [(config, variable, v, k) for k in range(config.drops) for v in values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_run_point(t) for t in tasks]
    res = SweepResult(variable, values)
    for _, rows in results:
        res.rows.extend(rows)
    res.rows.sort(key=res.sort_key)
    return res


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for r in rows:
        w.writerow(r.csv_values())
    return buf.getvalue()


def summarize(result: SweepResult) -> list:
    """(value, scheme, ok_drops, median_w, mean_w) per sweep value and scheme."""
    groups = {}
    for r in result.rows:
        v = r.N if result.variable == "N" else r.gamma1
        groups.setdefault((v, r.scheme), [])
        if not r.error:
            groups[(v, r.scheme)].append(r.total_power_w)
    out = []
    for (v, scheme), p in sorted(groups.items()):
        med = statistics.median(p) if p else math.nan
        mean = math.fsum(p) / len(p) if p else math.nan
        out.append((v, scheme, len(p), med, mean))
    return out


def summary_to_csv(variable: str, summary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([variable, "scheme", "drops_ok", "median_power_w", "median_power_dbm",
                "mean_power_w", "mean_power_dbm"])
    for v, scheme, n, med, mean in summary:
        w.writerow([v, scheme, n, repr(med), f"{watt_to_dbm(med):.4f}", repr(mean), f"{watt_to_dbm(mean):.4f}"])
    return buf.getvalue()


def timing_to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["drop_id", "scheme", result.variable, "runtime_ms"])
    for r in result.rows:
        w.writerow([r.drop_id, r.scheme, r.N if result.variable == "N" else r.gamma1, f"{r.runtime_ms:.3f}"])
    return buf.getvalue()


def sidecar_path(out: str, tag: str) -> str:
    stem, ext = os.path.splitext(out)
    return f"{stem}.{tag}{ext or '.csv'}"


def write_sweep(result: SweepResult, out: str, svg: bool = False) -> list:
    """Write the row CSV, the median/mean summary and the timings; optionally an SVG chart."""
    summary = summarize(result)
    written = []
    for path, text in ((out, rows_to_csv(result.rows)),
                       (sidecar_path(out, "summary"), summary_to_csv(result.variable, summary)),
                       (sidecar_path(out, "timing"), timing_to_csv(result))):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(path)
    if svg:
        path = os.path.splitext(out)[0] + ".svg"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(summary_svg(summary, result.variable))
        written.append(path)
    return written


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22")


def summary_svg(summary, xlabel: str, width: int = 640, height: int = 420) -> str:
    """Median power (dBm) against the swept variable, one polyline per scheme."""
    series = {}
    for v, scheme, n, med, _ in summary:
        if n and med > 0:
            series.setdefault(scheme, []).append((float(v), watt_to_dbm(med)))
    pts = [p for s in series.values() for p in s]
    if not pts:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"/>\n'
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    x1 = x1 if x1 > x0 else x0 + 1
    y0, y1 = math.floor(y0 - 1), math.ceil(y1 + 1)
    ml, mr, mt, mb = 60, 120, 20, 50
    pw, ph = width - ml - mr, height - mt - mb

    def sx(x):
        return ml + pw * (x - x0) / (x1 - x0)

    def sy(y):
        return mt + ph * (1 - (y - y0) / (y1 - y0))

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'font-family="sans-serif" font-size="12">',
             f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
             f'<text x="{ml + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">{xlabel}</text>',
             f'<text x="14" y="{mt + ph / 2:.1f}" transform="rotate(-90 14 {mt + ph / 2:.1f})" '
             f'text-anchor="middle">median power (dBm)</text>']
    for x in sorted({p[0] for p in pts}):
        parts.append(f'<text x="{sx(x):.1f}" y="{mt + ph + 16}" text-anchor="middle">{x:g}</text>')
    for k in range(5):
        y = y0 + (y1 - y0) * k / 4
        parts.append(f'<text x="{ml - 6}" y="{sy(y) + 4:.1f}" text-anchor="end">{y:.1f}</text>')
    for i, (scheme, s) in enumerate(sorted(series.items())):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in sorted(s))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = mt + 16 * (i + 1)
        parts.append(f'<line x1="{ml + pw + 10}" y1="{ly}" x2="{ml + pw + 30}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{ml + pw + 34}" y="{ly + 4}">{scheme}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# Placement demo scenarios: L = 30 m, everything else at defaults.
PLACEMENT_DEMO = {
    "case1": (UserPos(24.01, -10.74), UserPos(28.72, -0.44)),
    "case2": (UserPos(24.44, 12.17), UserPos(3.81, 12.40)),
}


def placement_demo(config: ScenarioConfig) -> dict:
    """Solve both demo cases with L = 30 m; returns {case: {scheme: SolveReport}}."""
    cfg30 = replace(config, L_m=30.0)
    geometry = cfg30.geometry()
    reqs = cfg30.requirements()
    phys = cfg30.physical()
    out = {}
    for case, users in PLACEMENT_DEMO.items():
        out[case] = {s: solve(s, users, reqs, phys, geometry) for s in ("noma", "fdma", "tdma")}
    return out


def config_fields() -> list:
    return [f.name for f in fields(ScenarioConfig)]
