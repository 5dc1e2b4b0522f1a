"""Fixed points of the full system and its 2D subsystems, with linear stability."""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NoInteriorFixedPoint
from .model import DIMS, ModelSpec3, jacobian

PIVOT_TOL = 1e-12
ZERO_TOL = 1e-12  # trace/determinant treated as zero below this
EIG_TOL = 1e-10  # eigenvalue real parts treated as zero below this

CLASSES = ("center-candidate", "saddle", "stable-node/focus", "unstable-node/focus", "degenerate")


def solve_linear(M, b, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Gaussian elimination with partial pivoting.

    Raises NoInteriorFixedPoint when a pivot falls below ``pivot_tol``.
    """
    M = np.array(M, dtype=float)
    n = M.shape[0]
    aug = np.hstack([M, np.asarray(b, dtype=float).reshape(n, 1)])
    for k in range(n):
        p = k + int(np.argmax(np.abs(aug[k:, k])))
        if abs(aug[p, k]) < pivot_tol:
            raise NoInteriorFixedPoint(M)
        if p != k:
            aug[[k, p]] = aug[[p, k]]
        for i in range(k + 1, n):
            factor = aug[i, k] / aug[k, k]
            aug[i, k:] -= factor * aug[k, k:]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (aug[i, n] - aug[i, i + 1:n] @ x[i + 1:]) / aug[i, i]
    return x


def parse_mask(mask) -> tuple[int, ...]:
    """Accept 'EV', ('E', 'S'), {1, 2} and similar; return sorted dimension indices."""
    items = list(mask) if not isinstance(mask, str) else list(mask.upper())
    idx = []
    for m in items:
        if isinstance(m, str):
            if m not in DIMS:
                raise ContractViolation(f"unknown dimension {m!r}")
            idx.append(DIMS.index(m))
        else:
            idx.append(int(m))
    out = tuple(sorted(set(idx)))
    if any(i < 0 or i > 2 for i in out) or len(out) != len(idx):
        raise ContractViolation(f"invalid mask {mask!r}")
    return out


@dataclass(frozen=True, eq=False)
class FixedPointRecord:
    location: np.ndarray
    mask: tuple[int, ...]
    in_positive_orthant: bool
    trace: float
    determinant: float
    eigenvalues: tuple[complex, ...]
    classification: str

    @property
    def mask_label(self) -> str:
        return "".join(DIMS[i] for i in self.mask)

    def to_dict(self) -> dict:
        return {
            "location": self.location.tolist(),
            "mask": [DIMS[i] for i in self.mask],
            "in_positive_orthant": self.in_positive_orthant,
            "trace": self.trace,
            "determinant": self.determinant,
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "classification": self.classification,
        }


def eig2(trace: float, det: float) -> tuple[complex, complex]:
    """Eigenvalues of a 2x2 matrix from its trace and determinant."""
    root = cmath.sqrt(trace * trace - 4.0 * det)
    return (trace + root) / 2.0, (trace - root) / 2.0


def classify_2d(trace: float, det: float) -> str:
    if abs(det) < ZERO_TOL:
        return "degenerate"
    if det < 0:
        return "saddle"
    if abs(trace) < ZERO_TOL:
        return "center-candidate"
    return "stable-node/focus" if trace < 0 else "unstable-node/focus"


def classify_eigenvalues(eigs) -> str:
    re = np.array([z.real for z in eigs])
    zero = np.abs(re) < EIG_TOL
    if zero.any():
        # purely imaginary pair with every other mode off the axis is the closed-orbit case
        imag_zero = [abs(z.imag) > EIG_TOL for z, flag in zip(eigs, zero) if flag]
        return "center-candidate" if all(imag_zero) else "degenerate"
    if (re < 0).all():
        return "stable-node/focus"
    if (re > 0).all():
        return "unstable-node/focus"
    return "saddle"


def classify(record: FixedPointRecord) -> str:
    """Trace-determinant rule in 2D, eigenvalue real parts otherwise."""
    if len(record.eigenvalues) == 2:
        return classify_2d(record.trace, record.determinant)
    return classify_eigenvalues(record.eigenvalues)


def analyze_point(spec: ModelSpec3, location, mask) -> FixedPointRecord:
    """Linearize at ``location``. 2D masks use the restricted Jacobian; anything else the full one."""
    location = np.array(location, dtype=float)
    location.setflags(write=False)
    mask = parse_mask(mask)
    J = jacobian(spec, location)
    dims = list(mask) if len(mask) == 2 else [0, 1, 2]
    Jm = J[np.ix_(dims, dims)]
    trace = float(np.trace(Jm))
    if len(dims) == 2:
        det = float(Jm[0, 0] * Jm[1, 1] - Jm[0, 1] * Jm[1, 0])
        eigs = eig2(trace, det)
    else:
        det = float(np.linalg.det(Jm))
        eigs = tuple(complex(z) for z in sorted(np.linalg.eigvals(Jm), key=lambda z: (z.real, z.imag)))
    positive = bool(mask) and bool(min(location[i] for i in mask) > 0)
    rec = FixedPointRecord(location, mask, positive, trace, det, eigs, "")
    object.__setattr__(rec, "classification", classify(rec))
    return rec


def subsystem_fixed_point(spec: ModelSpec3, mask) -> FixedPointRecord:
    """Interior equilibrium of the 2D subsystem on ``mask``; the other coordinate is 0."""
    idx = parse_mask(mask)
    if len(idx) != 2:
        raise ContractViolation("subsystem mask must name exactly two dimensions")
    sub = spec.A[np.ix_(idx, idx)]
    try:
        xs = solve_linear(sub, -spec.r[list(idx)])
    except NoInteriorFixedPoint:
        raise NoInteriorFixedPoint(sub) from None
    loc = np.zeros(3)
    loc[list(idx)] = xs
    return analyze_point(spec, loc, idx)


def interior_fixed_point(spec: ModelSpec3) -> FixedPointRecord:
    xs = solve_linear(spec.A, -spec.r)
    return analyze_point(spec, xs, (0, 1, 2))


def origin_fixed_point(spec: ModelSpec3) -> FixedPointRecord:
    return analyze_point(spec, np.zeros(3), ())


def all_fixed_points(spec: ModelSpec3) -> list[FixedPointRecord]:
    """Origin, every solvable 2D subsystem equilibrium, and the interior point when it exists."""
    out = [origin_fixed_point(spec)]
    for mask in ("EV", "ES", "VS"):
        try:
            out.append(subsystem_fixed_point(spec, mask))
        except NoInteriorFixedPoint:
            pass
    try:
        out.append(interior_fixed_point(spec))
    except NoInteriorFixedPoint:
        pass
    return out
