"""Sweeps, figure recipes and the analytic-vs-Monte-Carlo validation run."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .evaluator import (ABSENT, EvalResult, Placement, eval_scenario1, eval_scenario2,
                        eval_scenario3)
from .simkernel import McResult, McSpec, mc_evaluate
from .traffic import Hotspot

CSV_COLUMNS = ["rh_km", "theta_h_rad", "rs_km", "theta_s_rad", "scenario",
               "eta_m", "eta_s", "eta", "mu", "gain", "error"]
TWO_PI = 2 * math.pi
VARIABLES = ("r_h", "theta_h", "r_s", "theta_s")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep axis plus the positional errors applied between hotspot and small cell.

    For hotspot sweeps (``r_h``/``theta_h``) every offset yields one small-cell
    placement per point: radial offsets move R_s, angular ones move theta_s,
    both by ``error_sign * offset``. Small-cell sweeps (``r_s``/``theta_s``)
    take the hotspot from ``r_h``/``theta_h`` and accept only a zero offset.
    """

    variable: str
    start: float
    stop: float
    step: float
    error_offsets: tuple[float, ...] = (0.0,)
    offset_kind: str = "radial"
    error_sign: int = 1
    r_h: float | None = None
    theta_h: float | None = None
    r_s: float | None = None
    theta_s: float | None = None
    include_baseline: bool = True

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ValueError(f"variable must be one of {VARIABLES}")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.stop < self.start:
            raise ValueError("stop must not be below start")
        if self.offset_kind not in ("radial", "angular"):
            raise ValueError("offset_kind must be 'radial' or 'angular'")
        if self.error_sign not in (1, -1):
            raise ValueError("error_sign must be +1 or -1")
        if self.variable in ("r_s", "theta_s") and any(e != 0 for e in self.error_offsets):
            raise ValueError("small-cell sweeps take the position error from the sweep itself")

    def values(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(n)

    def check_range(self, cell_radius_km: float):
        v = self.values()
        if self.variable in ("r_h", "r_s"):
            if v[0] < 0 or v[-1] > cell_radius_km * (1 + 1e-12):
                raise ValueError(f"radius sweep must stay within [0, {cell_radius_km:.6f}] km")
        elif v[0] < 0 or v[-1] >= TWO_PI:
            raise ValueError("angle sweep must stay within [0, 2*pi)")


@dataclass(frozen=True)
class Point:
    """One evaluation; the small cell is kept as raw coordinates so that an
    invalid position surfaces as a row error rather than aborting the sweep."""

    hotspot: Hotspot
    r_s: float | None
    theta_s: float | None
    scenario: int

    @property
    def placement(self) -> Placement:
        return ABSENT if self.r_s is None else Placement.at(self.r_s, self.theta_s)


def sweep_points(spec: SweepSpec, cfg: Config) -> list[Point]:
    """Configurations of a sweep in output order."""
    spec.check_range(cfg.model.cell_radius_km)
    base = cfg.hotspot
    rh0 = base.r_h_km if spec.r_h is None else spec.r_h
    th0 = base.theta_h_rad if spec.theta_h is None else spec.theta_h
    points = []
    for v in spec.values():
        v = float(v)
        if spec.variable in ("r_h", "theta_h"):
            rh, th = (v, th0) if spec.variable == "r_h" else (rh0, v)
            hs = Hotspot(rh, th, base.sigma_km)
            if spec.include_baseline:
                points.append(Point(hs, None, None, 1))
            for e in spec.error_offsets:
                d = spec.error_sign * float(e)
                if spec.offset_kind == "radial":
                    pl = (rh + d, th)
                else:
                    pl = (rh, (th + d) % TWO_PI)
                points.append(Point(hs, *pl, 2 if d == 0 else 3))
        else:
            hs = Hotspot(rh0, th0, base.sigma_km)
            if spec.include_baseline:
                points.append(Point(hs, None, None, 1))
            if spec.variable == "r_s":
                pl = (v, th0 if spec.theta_s is None else spec.theta_s)
            else:
                pl = (rh0 if spec.r_s is None else spec.r_s, v)
            # grid values carry rounding from start + k*step
            same = math.isclose(pl[0], rh0, abs_tol=1e-12) and math.isclose(pl[1], th0, abs_tol=1e-12)
            points.append(Point(hs, *pl, 2 if same else 3))
    return points


def evaluate_point(point: Point, cfg: Config) -> EvalResult:
    model = cfg.model
    if point.scenario == 1:
        return eval_scenario1(point.hotspot, model, cfg.linkcurve, cfg.numerics)
    if point.scenario == 2:
        return eval_scenario2(point.hotspot, model, cfg.linkcurve, cfg.numerics)
    return eval_scenario3(point.hotspot, point.placement, model, cfg.linkcurve, cfg.numerics)


def _row(point: Point, cfg: Config) -> dict:
    row = {"rh_km": point.hotspot.r_h_km, "theta_h_rad": point.hotspot.theta_h_rad,
           "rs_km": point.r_s, "theta_s_rad": point.theta_s, "scenario": point.scenario,
           "eta_m": None, "eta_s": None, "eta": None, "mu": None, "gain": None, "error": ""}
    try:
        res = evaluate_point(point, cfg)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(eta_m=res.eta_m_mbps, eta_s=res.eta_s_mbps, eta=res.eta_mbps, mu=res.mu, gain=res.gain)
    return row


def _row_task(args):
    return _row(*args)


def _map(fn, items, workers: int):
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, items, chunksize=1))
    return [fn(item) for item in items]


def run_sweep(spec: SweepSpec | list[SweepSpec], cfg: Config, workers: int = 1) -> list[dict]:
    """Evaluate every sweep point; rows come back in sweep order whatever the worker count."""
    specs = spec if isinstance(spec, list) else [spec]
    points = [p for s in specs for p in sweep_points(s, cfg)]
    return _map(_row_task, [(p, cfg) for p in points], workers)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def format_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# figure recipes

def fig3_specs(cfg: Config, error_sign: int = 1) -> list[SweepSpec]:
    R = cfg.model.cell_radius_km
    return [SweepSpec("r_h", 0.05, R, 0.05, error_offsets=(0.0, 0.06, 0.12),
                      offset_kind="radial", error_sign=error_sign, theta_h=math.pi / 3)]


def fig4_specs(cfg: Config, error_sign: int = 1, points: int = 30) -> list[SweepSpec]:
    step = TWO_PI / points
    return [SweepSpec("theta_h", 0.0, TWO_PI - step, step,
                      error_offsets=(0.0, math.pi / 6, math.pi / 3), offset_kind="angular",
                      error_sign=error_sign, r_h=0.4)]


_FIG56_HOTSPOTS = ((0.35, math.pi / 6), (0.52, math.pi / 2))


def fig5_specs(cfg: Config, points: int = 30) -> list[SweepSpec]:
    R = cfg.model.cell_radius_km
    step = R / points
    return [SweepSpec("r_s", step, R, step, r_h=rh, theta_h=th) for rh, th in _FIG56_HOTSPOTS]


def fig6_specs(cfg: Config, points: int = 30) -> list[SweepSpec]:
    step = TWO_PI / points
    return [SweepSpec("theta_s", 0.0, TWO_PI - step, step, r_h=rh, theta_h=th)
            for rh, th in _FIG56_HOTSPOTS]


# ---------------------------------------------------------------------------
# validation

DEFAULT_GRID_RH = (0.2, 0.35, 0.44, 0.52)
DEFAULT_GRID_ERRORS = (0.0, 0.06, 0.12)


def eta_tolerance(mc: McResult) -> float:
    """Allowed |analytic - MC| on eta: 2 % of the MC value or 3 standard errors."""
    return max(0.02 * abs(mc.eta), 3.0 * mc.eta_se)


def mu_tolerance(mc: McResult) -> float:
    return max(0.01, 3.0 * mc.mu_se)


@dataclass
class ValidationRow:
    r_h: float
    error_km: float
    r_s: float | None
    scenario: int
    analytic: EvalResult | None = None
    mc: McResult | None = None
    failure: str = ""

    @property
    def eta_ok(self) -> bool:
        return (self.analytic is not None and self.mc is not None
                and abs(self.analytic.eta_mbps - self.mc.eta) <= eta_tolerance(self.mc))

    @property
    def mu_ok(self) -> bool:
        return (self.analytic is not None and self.mc is not None
                and abs(self.analytic.mu - self.mc.mu) <= mu_tolerance(self.mc))

    @property
    def passed(self) -> bool:
        return not self.failure and self.eta_ok and self.mu_ok


@dataclass
class ValidationReport:
    rows: list[ValidationRow] = field(default_factory=list)
    theta: float = math.pi / 3
    mc_spec: McSpec | None = None

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(r.passed for r in self.rows)


def _point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1)[0])


def _validate_task(args) -> ValidationRow:
    row, cfg, spec, theta = args
    hs = Hotspot(row.r_h, theta, cfg.hotspot.sigma_km)
    try:
        if row.scenario == 1:
            pl = ABSENT
            row.analytic = eval_scenario1(hs, cfg.model, cfg.linkcurve, cfg.numerics)
        else:
            if row.r_s < 0:
                raise ValueError(f"small-cell radius {row.r_s:g} km is negative")
            pl = Placement.at(row.r_s, theta)
            row.analytic = (eval_scenario2(hs, cfg.model, cfg.linkcurve, cfg.numerics)
                            if row.scenario == 2 else
                            eval_scenario3(hs, pl, cfg.model, cfg.linkcurve, cfg.numerics))
        row.mc = mc_evaluate(hs, pl, cfg.model, cfg.linkcurve, spec)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        row.failure = f"{type(exc).__name__}: {exc}"
    return row


def run_validate(cfg: Config, grid_rh=DEFAULT_GRID_RH, grid_errors=DEFAULT_GRID_ERRORS,
                 mc_spec: McSpec | None = None, error_sign: int = -1,
                 theta: float = math.pi / 3, include_baseline: bool = True,
                 workers: int = 1) -> ValidationReport:
    """Analytic vs Monte Carlo on a grid of hotspot radii and radial placement errors.

    Each grid point gets its own Monte Carlo stream derived from the base seed.
    """
    if not grid_rh or not grid_errors:
        raise ValueError("validation grid must not be empty")
    mc_spec = mc_spec or McSpec()
    rows = []
    for rh in grid_rh:
        if include_baseline:
            rows.append(ValidationRow(float(rh), 0.0, None, 1))
        for e in grid_errors:
            rs = float(rh) + error_sign * float(e)
            rows.append(ValidationRow(float(rh), float(e), rs, 2 if e == 0 else 3))
    tasks = []
    for i, row in enumerate(rows):
        spec = McSpec(**{**mc_spec.__dict__, "seed": _point_seed(mc_spec.seed, i), "workers": 1})
        tasks.append((row, cfg, spec, theta))
    return ValidationReport(_map(_validate_task, tasks, workers), theta, mc_spec)


def format_report(report: ValidationReport) -> str:
    spec = report.mc_spec or McSpec()
    lines = [
        "analytic vs Monte Carlo validation",
        f"theta_h = theta_s = {report.theta:.9g} rad; samples per point = {spec.n_samples}; "
        f"base seed = {spec.seed}; lattice rings = {spec.ring_count}",
        "eta tolerance: max(2% of MC, 3 MC std errors); mu tolerance: max(0.01, 3 MC std errors)",
        "",
    ]
    head = (f"{'rh_km':>6} {'err_km':>6} {'rs_km':>6} {'scn':>3} "
            f"{'eta_an':>10} {'eta_mc':>10} {'eta_se':>8} {'eta_dev':>9} {'eta_tol':>8} "
            f"{'mu_an':>8} {'mu_mc':>8} {'mu_se':>8} {'mu_dev':>9} {'mu_tol':>7} status")
    lines.append(head)
    for r in report.rows:
        rs = "-" if r.r_s is None else f"{r.r_s:.3f}"
        if r.failure:
            lines.append(f"{r.r_h:6.3f} {r.error_km:6.3f} {rs:>6} {r.scenario:3d} FAILED {r.failure}")
            continue
        a, m = r.analytic, r.mc
        status = "PASS" if r.passed else "FAIL" + ("" if r.eta_ok else " eta") + ("" if r.mu_ok else " mu")
        lines.append(
            f"{r.r_h:6.3f} {r.error_km:6.3f} {rs:>6} {r.scenario:3d} "
            f"{a.eta_mbps:10.5f} {m.eta:10.5f} {m.eta_se:8.5f} {a.eta_mbps - m.eta:+9.5f} "
            f"{eta_tolerance(m):8.5f} {a.mu:8.5f} {m.mu:8.5f} {m.mu_se:8.5f} "
            f"{a.mu - m.mu:+9.5f} {mu_tolerance(m):7.4f} {status}")
    n_pass = sum(r.passed for r in report.rows)
    lines.append("")
    lines.append(f"overall: {'PASS' if report.passed else 'FAIL'} ({n_pass}/{len(report.rows)} points)")
    return "\n".join(lines) + "\n"
