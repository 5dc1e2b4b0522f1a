"""Trajectory integration for LV systems of any dimension.

Anything with ``r`` (length N) and ``A`` (N x N) attributes can be integrated,
so the 3D model and the block-structured N-dimensional model share one code path.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ContractViolation, NumericalBlowup
from .model import DIMS, ModelSpec3

METHODS = ("rk4", "rk45")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    dt: float = 0.01
    rtol: float = 1e-9
    atol: float = 1e-12
    horizon: float = 500.0
    extinction_threshold: float = 1e-6
    record_stride: int = 10
    log_domain: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ContractViolation(f"method must be one of {METHODS}, got {self.method!r}")
        for name in ("dt", "rtol", "atol", "horizon", "extinction_threshold"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ContractViolation(f"{name} must be a positive finite number, got {v!r}")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise ContractViolation(f"record_stride must be a positive integer, got {self.record_stride!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "IntegratorConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ContractViolation(f"unknown integrator keys {sorted(unknown)}")
        return cls(**d)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    events: list = field(default_factory=list)  # (time, dimension index, "extinction-crossed")
    labels: tuple = DIMS

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, fh) -> None:
        """Write ``t,<labels>`` rows with 17 significant digits."""
        fh.write(",".join(("t",) + tuple(self.labels)) + "\n")
        for t, row in zip(self.times, self.states):
            fh.write(",".join(f"{v:.17g}" for v in (t, *row)) + "\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            self.to_csv(fh)


def state_labels(n: int) -> tuple:
    return DIMS if n == 3 else tuple(f"x{i + 1}" for i in range(n))


def _rk4(r, A, x, h, log_domain=False):
    # log domain integrates u = ln x with du/dt = r + A exp(u)
    if log_domain:
        k1 = r + A @ np.exp(x)
        k2 = r + A @ np.exp(x + (0.5 * h) * k1)
        k3 = r + A @ np.exp(x + (0.5 * h) * k2)
        k4 = r + A @ np.exp(x + h * k3)
    else:
        k1 = x * (r + A @ x)
        y = x + (0.5 * h) * k1
        k2 = y * (r + A @ y)
        y = x + (0.5 * h) * k2
        k3 = y * (r + A @ y)
        y = x + h * k3
        k4 = y * (r + A @ y)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(spec, x, dt: float) -> np.ndarray:
    """One classical RK4 step. No clamping."""
    x = np.asarray(x, dtype=float)
    if x.shape != spec.r.shape:
        raise ContractViolation(f"state must have shape {spec.r.shape}, got {x.shape}")
    if dt < 0:
        raise ContractViolation("dt must be non-negative")
    with np.errstate(all="ignore"):
        out = _rk4(spec.r, spec.A, x, dt)
    if not np.all(np.isfinite(out)):
        raise NumericalBlowup(dt, "non-finite state")
    return out


class _Recorder:
    def __init__(self, x0, capacity, eps, n):
        self.times = np.empty(capacity)
        self.states = np.empty((capacity, n))
        self.count = 0
        self.eps = eps
        self.events = []
        self.crossed = np.asarray(x0) < eps  # already-low components never "cross"

    def record(self, t, x):
        if self.count == len(self.times):
            self.times = np.resize(self.times, 2 * self.count)
            self.states = np.resize(self.states, (2 * self.count, self.states.shape[1]))
        self.times[self.count] = t
        self.states[self.count] = x
        self.count += 1

    def check_extinction(self, t, x):
        new = (x < self.eps) & ~self.crossed
        if new.any():
            for i in np.flatnonzero(new):
                self.events.append((float(t), int(i), "extinction-crossed"))
            self.crossed |= new

    def trajectory(self, labels):
        return Trajectory(
            self.times[: self.count].copy(), self.states[: self.count].copy(), list(self.events), labels
        )


def simulate(spec, x0, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Integrate from t=0 to ``cfg.horizon``.

    Extinction crossings are annotated, not terminal. A non-finite or negative
    state raises NumericalBlowup carrying the partial trajectory.
    """
    cfg = cfg or IntegratorConfig()
    r, A = spec.r, spec.A
    n = len(r)
    x0 = np.array(x0, dtype=float)
    if x0.shape != (n,):
        raise ContractViolation(f"x0 must have shape ({n},), got {x0.shape}")
    if not np.all(np.isfinite(x0)) or np.any(x0 < 0):
        raise ContractViolation("x0 must be finite and non-negative")
    if cfg.log_domain and np.any(x0 <= 0):
        raise ContractViolation("log_domain integration requires a strictly positive x0")
    labels = state_labels(n)
    if cfg.method == "rk45":
        return _simulate_rk45(r, A, x0, cfg, labels)

    dt, T = cfg.dt, cfg.horizon
    nsteps = max(1, math.ceil(T / dt - 1e-9))
    rec = _Recorder(x0, nsteps // cfg.record_stride + 2, cfg.extinction_threshold, n)
    rec.record(0.0, x0)
    eps = cfg.extinction_threshold
    x = np.log(x0) if cfg.log_domain else x0
    with np.errstate(all="ignore"):
        for k in range(1, nsteps + 1):
            h = dt if k < nsteps else T - (nsteps - 1) * dt
            x = _rk4(r, A, x, h, cfg.log_domain)
            t = k * dt if k < nsteps else T
            state = np.exp(x) if cfg.log_domain else x
            lo, hi = state.min(), state.max()
            if not (lo >= 0.0 and hi < math.inf):
                reason = "negative state" if lo < 0 else "non-finite state"
                raise NumericalBlowup(t, reason, rec.trajectory(labels))
            if lo < eps:
                rec.check_extinction(t, state)
            if k % cfg.record_stride == 0 or k == nsteps:
                rec.record(t, state)
    return rec.trajectory(labels)


def _simulate_rk45(r, A, x0, cfg, labels):
    from scipy.integrate import solve_ivp

    n = len(r)
    if cfg.log_domain:
        fun = lambda t, u: r + A @ np.exp(u)  # noqa: E731
        y0 = np.log(x0)
    else:
        fun = lambda t, x: x * (r + A @ x)  # noqa: E731
        y0 = x0
    with np.errstate(all="ignore"):
        sol = solve_ivp(fun, (0.0, cfg.horizon), y0, method="RK45", rtol=cfg.rtol, atol=cfg.atol)
    ys = np.exp(sol.y.T) if cfg.log_domain else sol.y.T
    rec = _Recorder(x0, len(sol.t) // cfg.record_stride + 2, cfg.extinction_threshold, n)
    rec.record(0.0, x0)
    last = len(sol.t) - 1
    for k in range(1, len(sol.t)):
        t, state = float(sol.t[k]), ys[k]
        if not (np.all(np.isfinite(state)) and state.min() >= 0.0):
            reason = "negative state" if np.nanmin(state) < 0 else "non-finite state"
            raise NumericalBlowup(t, reason, rec.trajectory(labels))
        rec.check_extinction(t, state)
        if k % cfg.record_stride == 0 or k == last:
            rec.record(t, state)
    if sol.status < 0:
        raise NumericalBlowup(float(sol.t[-1]), sol.message, rec.trajectory(labels))
    return rec.trajectory(labels)


def ev_first_integral(spec: ModelSpec3, E, V):
    """Conserved quantity of the EV subsystem (S = 0).

    H = a12 V + r_E ln V - a21 E - r_V ln E. Scalars give a float, arrays an array.
    """
    E_arr, V_arr = np.asarray(E, dtype=float), np.asarray(V, dtype=float)
    if not (np.all(E_arr > 0) and np.all(V_arr > 0)):
        raise ContractViolation("first integral needs E > 0 and V > 0")
    rE, rV = spec.r[0], spec.r[1]
    a12, a21 = spec.A[0, 1], spec.A[1, 0]
    H = a12 * V_arr + rE * np.log(V_arr) - a21 * E_arr - rV * np.log(E_arr)
    return float(H) if H.ndim == 0 else H
