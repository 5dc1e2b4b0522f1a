"""JSON scenario configs. Every validation failure names the offending field."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, ContractViolation
from .integrate import IntegratorConfig
from .model import ModelSpec3, parse_param
from .ndim import NDimSpec

OUTPUTS = ("trajectory-csv", "report-json", "phase-svg", "timeseries-svg")


def _numbers(value, path, shape=None):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(path, "must be numeric") from None
    if arr.dtype == object or (shape is not None and arr.shape != shape):
        raise ConfigError(path, f"expected shape {shape}, got {np.shape(value)}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(path, "must be finite")
    return arr


def _require(d, key, path):
    if not isinstance(d, dict):
        raise ConfigError(path, "must be a JSON object")
    if key not in d:
        raise ConfigError(f"{path}.{key}" if path else key, "missing")
    return d[key]


def parse_model(d, path="model"):
    """ModelSpec3, or NDimSpec when a ``blocks`` key is present."""
    if not isinstance(d, dict):
        raise ConfigError(path, "must be a JSON object")
    r = _require(d, "r", path)
    A = _require(d, "A", path)
    if "blocks" in d:
        try:
            n = sum(int(b) for b in d["blocks"])
        except (TypeError, ValueError):
            raise ConfigError(f"{path}.blocks", "must be three integers") from None
        r = _numbers(r, f"{path}.r", (n,))
        A = _numbers(A, f"{path}.A", (n, n))
        try:
            return NDimSpec(tuple(d["blocks"]), r, A, d.get("labels"), d.get("weights"))
        except ContractViolation as exc:
            raise ConfigError(path, str(exc)) from None
    r = _numbers(r, f"{path}.r", (3,))
    A = _numbers(A, f"{path}.A", (3, 3))
    enforce = d.get("enforce_template", True)
    if not isinstance(enforce, bool):
        raise ConfigError(f"{path}.enforce_template", "must be a boolean")
    try:
        return ModelSpec3(r, A, enforce)
    except ContractViolation as exc:
        raise ConfigError(path, str(exc)) from None


def parse_integrator(d, path="integrator"):
    if d is None:
        return IntegratorConfig()
    if not isinstance(d, dict):
        raise ConfigError(path, "must be a JSON object")
    try:
        return IntegratorConfig.from_dict(d)
    except (ContractViolation, TypeError) as exc:
        raise ConfigError(path, str(exc)) from None


def parse_grid(d, path="sweep.values"):
    if isinstance(d, dict):
        for k in ("start", "stop", "count"):
            _require(d, k, path)
        count = d["count"]
        if not isinstance(count, int) or count < 1:
            raise ConfigError(f"{path}.count", "must be a positive integer")
        return np.linspace(float(d["start"]), float(d["stop"]), count)
    grid = _numbers(d, path)
    if grid.ndim != 1 or grid.size == 0:
        raise ConfigError(path, "grid must be a non-empty list")
    return grid


@dataclass
class SweepSection:
    target: str
    values: np.ndarray
    summary_window: float = 0.5
    statistic: str = "mean"
    workers: int = 1
    raw_values: object = None

    def to_dict(self):
        values = self.raw_values if self.raw_values is not None else self.values.tolist()
        return {
            "target": self.target,
            "values": values,
            "summary_window": self.summary_window,
            "statistic": self.statistic,
            "workers": self.workers,
        }


@dataclass
class EnsembleSection:
    count: int
    coupling_scale: float = 0.5
    seed: int = 0
    blocks: tuple | None = None

    def to_dict(self):
        d = {"count": self.count, "coupling_scale": self.coupling_scale, "seed": self.seed}
        if self.blocks is not None:
            d["blocks"] = list(self.blocks)
        return d


@dataclass
class ScenarioConfig:
    model: object
    x0: np.ndarray
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    outputs: tuple = ("trajectory-csv",)
    output_dir: str = "out"
    name: str = "run"
    sweep: SweepSection | None = None
    ensemble: EnsembleSection | None = None
    extract: tuple | None = None

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "model": self.model.to_dict(),
            "x0": self.x0.tolist(),
            "integrator": self.integrator.to_dict(),
            "outputs": list(self.outputs),
            "output_dir": self.output_dir,
        }
        if self.sweep is not None:
            d["sweep"] = self.sweep.to_dict()
        if self.ensemble is not None:
            d["ensemble"] = self.ensemble.to_dict()
        if self.extract is not None:
            d["extract"] = list(self.extract)
        return d

    def __eq__(self, other):
        if not isinstance(other, ScenarioConfig):
            return NotImplemented
        return json.dumps(self.to_dict(), sort_keys=True) == json.dumps(other.to_dict(), sort_keys=True)


def parse_config(d: dict, name: str = "run") -> ScenarioConfig:
    if not isinstance(d, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    model = parse_model(_require(d, "model", ""), "model")
    n = len(model.r)
    x0 = _numbers(d.get("x0", [0.1] * n), "x0", (n,))
    if np.any(x0 < 0):
        raise ConfigError("x0", "must be non-negative")
    integrator = parse_integrator(d.get("integrator"))
    outputs = d.get("outputs", ["trajectory-csv"])
    if not isinstance(outputs, list) or not outputs:
        raise ConfigError("outputs", "at least one output is required")
    for k, o in enumerate(outputs):
        if o not in OUTPUTS:
            raise ConfigError(f"outputs[{k}]", f"unknown output {o!r}; choose from {OUTPUTS}")
    sweep = None
    if "sweep" in d:
        s = d["sweep"]
        target = _require(s, "target", "sweep")
        try:
            parse_param(str(target), 3)
        except ContractViolation as exc:
            raise ConfigError("sweep.target", str(exc)) from None
        raw = _require(s, "values", "sweep")
        window = s.get("summary_window", 0.5)
        if not (isinstance(window, (int, float)) and 0 < window <= 1):
            raise ConfigError("sweep.summary_window", "must lie in (0, 1]")
        stat = s.get("statistic", "mean")
        if stat not in ("mean", "min", "max", "final"):
            raise ConfigError("sweep.statistic", "must be one of mean, min, max, final")
        workers = s.get("workers", 1)
        if not isinstance(workers, int) or workers < 1:
            raise ConfigError("sweep.workers", "must be a positive integer")
        sweep = SweepSection(str(target), parse_grid(raw), float(window), stat, workers, raw)
    ensemble = None
    if "ensemble" in d:
        e = d["ensemble"]
        count = _require(e, "count", "ensemble")
        if not isinstance(count, int) or count < 0:
            raise ConfigError("ensemble.count", "must be a non-negative integer")
        scale = e.get("coupling_scale", 0.5)
        if not (isinstance(scale, (int, float)) and math.isfinite(scale) and scale > 0):
            raise ConfigError("ensemble.coupling_scale", "must be positive")
        blocks = e.get("blocks")
        ensemble = EnsembleSection(count, float(scale), int(e.get("seed", 0)), tuple(blocks) if blocks else None)
    extract = d.get("extract")
    if extract is not None:
        if not isinstance(extract, list) or not extract:
            raise ConfigError("extract", "must be a non-empty list of indices")
        extract = tuple(int(i) for i in extract)
    return ScenarioConfig(
        model=model,
        x0=x0,
        integrator=integrator,
        outputs=tuple(outputs),
        output_dir=str(d.get("output_dir", "out")),
        name=str(d.get("name", name)),
        sweep=sweep,
        ensemble=ensemble,
        extract=extract,
    )


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError("--config", f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from None
    return parse_config(raw, name=path.stem)
