"""One-parameter sensitivity sweeps over the 3D model."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, NumericalBlowup
from .integrate import IntegratorConfig, simulate
from .model import DIMS, ModelSpec3, parse_param
from .sustainability import classify_scenario

SHAPE_TOL = 1e-9
STATS = ("min", "max", "mean")


@dataclass(frozen=True, eq=False)
class SweepPlan:
    target: str
    values: np.ndarray
    base_spec: ModelSpec3
    x0: tuple
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    summary_window: float = 0.5
    workers: int = 1

    def __post_init__(self):
        parse_param(self.target, 3)
        values = np.array(self.values, dtype=float).ravel()
        if values.size == 0:
            raise ContractViolation("sweep grid is empty")
        if not np.all(np.isfinite(values)):
            raise ContractViolation("sweep grid has non-finite values")
        d = np.diff(values)
        if values.size > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ContractViolation("sweep grid must be strictly monotone")
        if not (0.0 < self.summary_window <= 1.0):
            raise ContractViolation("summary_window must lie in (0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))

    @staticmethod
    def linspace(start: float, stop: float, count: int) -> np.ndarray:
        return np.linspace(start, stop, int(count))

    def spec_at(self, i: int) -> ModelSpec3:
        return self.base_spec.with_param(self.target, float(self.values[i]))


@dataclass
class SweepRow:
    param: float
    final: np.ndarray
    stats: dict  # {"min": 3-array, "max": ..., "mean": ...} over the summary window
    extinct: tuple
    scenario: str
    blowup_time: float | None = None
    blowup_reason: str | None = None


@dataclass
class SweepResult:
    target: str
    rows: list

    def column(self, dim: str = "V", stat: str = "mean") -> np.ndarray:
        i = DIMS.index(dim)
        if stat == "final":
            return np.array([row.final[i] for row in self.rows])
        return np.array([row.stats[stat][i] for row in self.rows])

    @property
    def params(self) -> np.ndarray:
        return np.array([row.param for row in self.rows])

    def csv_header(self) -> list[str]:
        cols = ["param"] + [f"{d}_final" for d in DIMS]
        cols += [f"{d}_{s}" for d in DIMS for s in STATS]
        cols += [f"{d}_extinct" for d in DIMS]
        return cols + ["blowup_time", "scenario"]

    def to_csv(self, fh) -> None:
        fh.write(",".join(self.csv_header()) + "\n")
        for row in self.rows:
            vals = [row.param, *row.final]
            vals += [row.stats[s][i] for i in range(3) for s in STATS]
            cells = [f"{v:.17g}" for v in vals]
            cells += ["1" if e else "0" for e in row.extinct]
            cells.append("" if row.blowup_time is None else f"{row.blowup_time:.17g}")
            cells.append(row.scenario)
            fh.write(",".join(cells) + "\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            self.to_csv(fh)


def window_stats(traj, horizon: float, window: float) -> dict:
    """min/max/mean per dimension over records with t >= (1 - window) * horizon.

    A truncated (blown-up) trajectory contributes whatever it recorded inside the window.
    """
    t0 = (1.0 - window) * horizon
    sel = traj.states[traj.times >= t0 - 1e-12 * horizon]
    if len(sel) == 0:
        nan = np.full(3, math.nan)
        return {"min": nan, "max": nan.copy(), "mean": nan.copy()}
    return {"min": sel.min(axis=0), "max": sel.max(axis=0), "mean": sel.mean(axis=0)}


def run_point(plan: SweepPlan, i: int) -> SweepRow:
    spec = plan.spec_at(i)
    cfg = plan.integrator
    blowup_time = reason = None
    try:
        traj = simulate(spec, plan.x0, cfg)
    except NumericalBlowup as exc:
        traj, blowup_time, reason = exc.trajectory, exc.time, exc.reason
    extinct = tuple(any(ev[1] == d for ev in traj.events) for d in range(3))
    return SweepRow(
        param=float(plan.values[i]),
        final=traj.states[-1].copy(),
        stats=window_stats(traj, cfg.horizon, plan.summary_window),
        extinct=extinct,
        scenario=classify_scenario(spec).scenario,
        blowup_time=blowup_time,
        blowup_reason=reason,
    )


def _run_indexed(args):
    plan, i = args
    return run_point(plan, i)


def run_sweep(plan: SweepPlan) -> SweepResult:
    """Simulate and classify every grid point. Rows come back in grid order."""
    jobs = [(plan, i) for i in range(len(plan.values))]
    if plan.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            rows = list(pool.map(_run_indexed, jobs))
    else:
        rows = [_run_indexed(j) for j in jobs]
    return SweepResult(plan.target, rows)


def shape_test(column) -> str:
    """Label a sequence as hump, monotone-increasing, monotone-decreasing or other.

    Differences within SHAPE_TOL count as ties.
    """
    c = np.asarray(column, dtype=float)
    if c.size < 3:
        raise ContractViolation("shape_test needs at least 3 points")
    if not np.all(np.isfinite(c)):
        return "other"
    d = np.diff(c)
    steps = np.where(d > SHAPE_TOL, 1, np.where(d < -SHAPE_TOL, -1, 0))
    if np.all(steps == 1):
        return "monotone-increasing"
    if np.all(steps == -1):
        return "monotone-decreasing"
    k = int(np.argmax(c))
    others = np.delete(c, k)
    if 0 < k < c.size - 1 and np.all(c[k] > others + SHAPE_TOL):
        if np.all(steps[:k] >= 0) and np.all(steps[k:] <= 0):
            return "hump"
    return "other"
