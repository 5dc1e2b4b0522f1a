"""EVS Lotka-Volterra model: parameterization, vector field and Jacobian.

State ordering is always (E, V, S): economy, environment, society.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation

DIMS = ("E", "V", "S")

# (row, col) -> required sign of a_ij; a_31 is free.
TEMPLATE_A = {(0, 1): +1, (0, 2): +1, (1, 0): -1, (1, 2): +1, (2, 1): +1}
TEMPLATE_R = (-1, +1, -1)

BASELINE_R = (-0.1, 0.1, -0.05)


def _frozen(values, shape, name):
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ContractViolation(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ModelSpec3:
    """Growth rates ``r`` and interaction matrix ``A`` of the 3D EVS system."""

    r: np.ndarray
    A: np.ndarray
    enforce_template: bool = True

    def __post_init__(self):
        object.__setattr__(self, "r", _frozen(self.r, (3,), "r"))
        object.__setattr__(self, "A", _frozen(self.A, (3, 3), "A"))
        if self.enforce_template:
            if np.any(np.diag(self.A) != 0.0):
                raise ContractViolation("diagonal of A must be zero when enforce_template is set")
            violations = validate_template(self)
            if violations:
                raise ContractViolation("sign template violated: " + "; ".join(violations))

    @classmethod
    def baseline(cls, a31: float = 0.1, **overrides) -> "ModelSpec3":
        """Reference parameter set with a31 = +/-0.1; keyword overrides use param addresses."""
        A = np.array([[0.0, 0.7, 0.1], [-0.3, 0.0, 0.1], [a31, 0.1, 0.0]])
        spec = cls(BASELINE_R, A, enforce_template=False)
        for address, value in overrides.items():
            spec = spec.with_param(address, value)
        return cls(spec.r, spec.A, enforce_template=not validate_template(spec))

    def with_param(self, address: str, value: float) -> "ModelSpec3":
        kind, i, j = parse_param(address, 3)
        r, A = self.r.copy(), self.A.copy()
        if kind == "r":
            r[i] = value
        else:
            A[i, j] = value
        return ModelSpec3(r, A, self.enforce_template)

    def get_param(self, address: str) -> float:
        kind, i, j = parse_param(address, 3)
        return float(self.r[i] if kind == "r" else self.A[i, j])

    def to_dict(self) -> dict:
        return {"r": self.r.tolist(), "A": self.A.tolist(), "enforce_template": self.enforce_template}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec3":
        return cls(d["r"], d["A"], bool(d.get("enforce_template", True)))

    def __eq__(self, other):
        if not isinstance(other, ModelSpec3):
            return NotImplemented
        return (
            np.array_equal(self.r, other.r)
            and np.array_equal(self.A, other.A)
            and self.enforce_template == other.enforce_template
        )

    __hash__ = None


_PARAM_RE = re.compile(r"^(?:r_?([EVS1-9]\d*)|a_?(\d)(\d)|a_?(\d+),(\d+))$")


def parse_param(address: str, n: int) -> tuple[str, int, int]:
    """Parse 'r_E', 'r2', 'a12', 'a_31' or 'a_10,2' into (kind, i, j), zero-based."""
    m = _PARAM_RE.match(address.strip())
    if not m:
        raise ContractViolation(f"unknown parameter address {address!r}")
    if m.group(1) is not None:
        tok = m.group(1)
        i = DIMS.index(tok) if tok in DIMS else int(tok) - 1
        j = -1
        kind = "r"
    else:
        a, b = (m.group(2), m.group(3)) if m.group(2) is not None else (m.group(4), m.group(5))
        i, j = int(a) - 1, int(b) - 1
        kind = "a"
    if not (0 <= i < n) or (kind == "a" and not (0 <= j < n)):
        raise ContractViolation(f"parameter address {address!r} out of range for dimension {n}")
    return kind, i, j


def _state(x, n):
    arr = np.asarray(x, dtype=float)
    if arr.shape != (n,):
        raise ContractViolation(f"state must have shape ({n},), got {arr.shape}")
    return arr


def lv_growth(r: np.ndarray, A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Bracketed per-capita term r + A x (row dot products, then add r)."""
    return r + A @ x


def lv_rhs(r: np.ndarray, A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Generalized LV field x_i (r_i + sum_j a_ij x_j) for any dimension."""
    return x * (r + A @ x)


def lv_jacobian(r: np.ndarray, A: np.ndarray, x: np.ndarray) -> np.ndarray:
    J = x[:, None] * A
    J[np.diag_indices_from(J)] += r + A @ x
    return J


def vector_field(spec: ModelSpec3, x) -> np.ndarray:
    return lv_rhs(spec.r, spec.A, _state(x, 3))


def per_capita_growth(spec: ModelSpec3, x) -> np.ndarray:
    return lv_growth(spec.r, spec.A, _state(x, 3))


def jacobian(spec: ModelSpec3, x) -> np.ndarray:
    return lv_jacobian(spec.r, spec.A, _state(x, 3))


def _name(i, j=None):
    return f"r_{DIMS[i]}" if j is None else f"a{i + 1}{j + 1}"


def validate_template(spec: ModelSpec3) -> list[str]:
    """Return one message per sign-template violation; empty when conforming."""
    out = []
    for i, sign in enumerate(TEMPLATE_R):
        if not spec.r[i] * sign > 0:
            out.append(f"{_name(i)} = {spec.r[i]:g}, expected {'> 0' if sign > 0 else '< 0'}")
    for (i, j), sign in TEMPLATE_A.items():
        if not spec.A[i, j] * sign > 0:
            out.append(f"{_name(i, j)} = {spec.A[i, j]:g}, expected {'> 0' if sign > 0 else '< 0'}")
    return out
