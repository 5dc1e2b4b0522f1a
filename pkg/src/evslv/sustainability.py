"""Sustainability classification from recovery growth rates at the extinction faces.

For each dimension d the complementary 2D subsystem is put at its equilibrium
with x_d = 0, and the per-capita growth of d is evaluated there. A positive value
means a tiny injection of d recovers on its own. The closed-form parameter
boundaries are evaluated verbatim alongside as a secondary check.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .equilibria import FixedPointRecord, subsystem_fixed_point
from .errors import NoInteriorFixedPoint
from .model import DIMS, ModelSpec3, per_capita_growth

INDETERMINATE_TOL = 1e-12
DENOM_TOL = 1e-12

SCENARIOS = ("Sustainable", "Bearable", "Equitable", "Viable", "Indeterminate", "Unsustainable")
EXIT_CODES = {
    "Sustainable": 0,
    "Bearable": 10,
    "Equitable": 11,
    "Viable": 12,
    "Indeterminate": 13,
    "Unsustainable": 14,
}
# the label for exactly one collapsing dimension
_SINGLE_LOSS = {0: "Bearable", 1: "Equitable", 2: "Viable"}


def _dim(d) -> int:
    return DIMS.index(d) if isinstance(d, str) else int(d)


def recovery_sign(spec: ModelSpec3, d) -> tuple[float, FixedPointRecord]:
    """Per-capita growth of dimension ``d`` at the complementary subsystem's equilibrium.

    Raises NoInteriorFixedPoint when that subsystem is singular.
    """
    d = _dim(d)
    mask = tuple(i for i in range(3) if i != d)
    fp = subsystem_fixed_point(spec, mask)
    return float(per_capita_growth(spec, fp.location)[d]), fp


@dataclass
class RecoveryEntry:
    dimension: str
    value: float | None
    sign: int | None  # +1, -1, or None when indeterminate
    fixed_point: FixedPointRecord | None
    physical: bool

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "value": self.value,
            "sign": self.sign,
            "fixed_point": self.fixed_point.to_dict() if self.fixed_point else None,
            "physical": self.physical,
        }


@dataclass
class BoundaryEval:
    parameter: str  # coefficient being bounded, e.g. "a31"
    dimension: str  # recovery condition this boundary stands for
    value: float
    threshold: float | None
    branch: int | None  # 1 or 2, in the printed order of the two cases
    relation: str | None  # "<" or ">"
    satisfied: bool | None
    degenerate: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SustainabilityReport:
    recovery: list[RecoveryEntry]
    scenario: str
    proposition1: list[BoundaryEval]
    crosscheck: list[dict]
    persistence_horizon: float | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.scenario]

    @property
    def signs(self) -> tuple:
        return tuple(e.sign for e in self.recovery)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "recovery": [e.to_dict() for e in self.recovery],
            "proposition1": [b.to_dict() for b in self.proposition1],
            "crosscheck": self.crosscheck,
            "persistence_horizon": self.persistence_horizon,
            "warnings": self.warnings,
        }


def scenario_from_signs(signs) -> str:
    if any(s is None for s in signs):
        return "Indeterminate"
    losses = [i for i, s in enumerate(signs) if s < 0]
    if not losses:
        return "Sustainable"
    if len(losses) == 1:
        return _SINGLE_LOSS[losses[0]]
    return "Unsustainable"


def _boundary(parameter, dimension, value, numerator, denom, rel_if_positive):
    """Shared shape of the three boundaries: value <rel> numerator/denom, relation flips with sign(denom)."""
    value, numerator, denom = float(value), float(numerator), float(denom)
    if abs(denom) < DENOM_TOL:
        return BoundaryEval(parameter, dimension, value, None, None, None, None, True)
    threshold = numerator / denom
    flip = {"<": ">", ">": "<"}
    relation = rel_if_positive if denom > 0 else flip[rel_if_positive]
    satisfied = value < threshold if relation == "<" else value > threshold
    return BoundaryEval(parameter, dimension, value, threshold, None, relation, bool(satisfied), False)


def proposition1_bounds(spec: ModelSpec3) -> list[BoundaryEval]:
    """Evaluate the three closed-form sustainability boundaries exactly as published.

    Returned in the order (a31 bound, a21 bound, a23 bound), which stand for the
    V, S and E recovery conditions respectively.
    """
    rE, rV, rS = spec.r
    A = spec.A
    a12, a13, a21, a23, a31, a32 = A[0, 1], A[0, 2], A[1, 0], A[1, 2], A[2, 0], A[2, 1]

    # a31 < a12 a13 rS / (a13 rV - a23 rE) if a13 rV > a23 rE, else '>'
    b1 = _boundary("a31", "V", a31, a12 * a13 * rS, a13 * rV - a23 * rE, "<")
    if not b1.degenerate:
        b1.branch = 1 if a13 * rV > a23 * rE else 2

    # a21 < a31 a12 rV / (a32 rE - a12 rS) if a32 rE < a12 rS (denominator < 0), else '>'
    b2 = _boundary("a21", "S", a21, a31 * a12 * rV, a32 * rE - a12 * rS, ">")
    if not b2.degenerate:
        b2.branch = 1 if a32 * rE < a12 * rS else 2

    # a23 > a32 a13 rV / (a32 rE - a12 rS) if a32 rE > a12 rS, else '<'
    b3 = _boundary("a23", "E", a23, a32 * a13 * rV, a32 * rE - a12 * rS, ">")
    if not b3.degenerate:
        b3.branch = 1 if a32 * rE > a12 * rS else 2

    return [b1, b2, b3]


def _crosscheck(recovery, bounds) -> list[dict]:
    by_dim = {b.dimension: b for b in bounds}
    out = []
    for entry in recovery:
        b = by_dim[entry.dimension]
        numeric = None if entry.sign is None else entry.sign > 0
        agree = None if numeric is None or b.satisfied is None else numeric == b.satisfied
        out.append(
            {
                "dimension": entry.dimension,
                "boundary_parameter": b.parameter,
                "numeric_recovers": numeric,
                "boundary_satisfied": b.satisfied,
                "agree": agree,
            }
        )
    return out


def classify_scenario(spec: ModelSpec3, trajectory=None, eps: float = 1e-6) -> SustainabilityReport:
    """Assemble recovery signs, scenario label and boundary cross-check.

    Never raises on singular subsystems; those dimensions become indeterminate.
    """
    recovery, warnings = [], []
    for d in range(3):
        name = DIMS[d]
        try:
            value, fp = recovery_sign(spec, d)
        except NoInteriorFixedPoint:
            recovery.append(RecoveryEntry(name, None, None, None, False))
            warnings.append(f"{name}: complementary subsystem has no unique fixed point")
            continue
        sign = None if abs(value) < INDETERMINATE_TOL else (1 if value > 0 else -1)
        if sign is None:
            warnings.append(f"{name}: recovery value {value:.3g} is numerically zero")
        if not fp.in_positive_orthant:
            warnings.append(
                f"{name}: {fp.mask_label} fixed point {np.round(fp.location, 12).tolist()} is not in the positive orthant"
            )
        recovery.append(RecoveryEntry(name, value, sign, fp, fp.in_positive_orthant))
    bounds = proposition1_bounds(spec)
    report = SustainabilityReport(
        recovery=recovery,
        scenario=scenario_from_signs([e.sign for e in recovery]),
        proposition1=bounds,
        crosscheck=_crosscheck(recovery, bounds),
        warnings=warnings,
    )
    if trajectory is not None:
        report.persistence_horizon = persistence_check(trajectory, eps)
    return report


def persistence_check(trajectory, eps: float = 1e-6) -> float | None:
    """Earliest recorded time after which every component stays above ``eps``; None if never."""
    states = np.asarray(trajectory.states)
    if len(states) == 0:
        raise ValueError("empty trajectory")
    bad = np.flatnonzero(~np.all(states > eps, axis=1))
    if len(bad) == 0:
        return float(trajectory.times[0])
    last = bad[-1]
    if last == len(states) - 1:
        return None
    return float(trajectory.times[last + 1])
