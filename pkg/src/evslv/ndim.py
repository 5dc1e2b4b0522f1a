"""Block-structured N-dimensional EVS system.

The state is ordered (E_1..E_n1, V_1..V_n2, S_1..S_n3). Aggregates E, V, S are
weighted sums of their block with constant positive weights.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NumericalBlowup
from .integrate import IntegratorConfig, Trajectory, simulate
from .model import DIMS, ModelSpec3, lv_rhs
from .sustainability import persistence_check


def _ro(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class NDimSpec:
    blocks: tuple
    r: np.ndarray
    A: np.ndarray
    labels: tuple = None
    weights: dict = None  # {"E": array(n1), "V": array(n2), "S": array(n3)}

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if len(blocks) != 3 or any(b < 0 for b in blocks) or sum(blocks) == 0:
            raise ContractViolation(f"blocks must be three non-negative counts with N > 0, got {self.blocks}")
        n = sum(blocks)
        r, A = _ro(self.r), _ro(self.A)
        if r.shape != (n,) or A.shape != (n, n):
            raise ContractViolation(f"r/A shapes {r.shape}/{A.shape} do not match N = {n}")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(A))):
            raise ContractViolation("r and A must be finite")
        labels = self.labels
        if labels is None:
            labels = [f"{d}{i + 1}" for d, nb in zip(DIMS, blocks) for i in range(nb)]
        labels = tuple(str(s) for s in labels)
        if len(labels) != n:
            raise ContractViolation(f"expected {n} labels, got {len(labels)}")
        weights = self.weights or {d: np.ones(nb) for d, nb in zip(DIMS, blocks)}
        w = {}
        for d, nb in zip(DIMS, blocks):
            arr = _ro(weights.get(d, []))
            if arr.shape != (nb,):
                raise ContractViolation(f"weights[{d!r}] must have length {nb}")
            if not np.all(arr > 0):
                raise ContractViolation(f"weights[{d!r}] must be strictly positive")
            w[d] = arr
        for name, val in (("blocks", blocks), ("r", r), ("A", A), ("labels", labels), ("weights", w)):
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return len(self.r)

    @property
    def block_of(self) -> np.ndarray:
        """Block index (0=E, 1=V, 2=S) of each state coordinate."""
        return np.repeat(np.arange(3), self.blocks)

    def weight_matrix(self) -> np.ndarray:
        """N x 3 matrix W with aggregate = x @ W."""
        W = np.zeros((self.n, 3))
        W[np.arange(self.n), self.block_of] = np.concatenate([self.weights[d] for d in DIMS])
        return W

    @classmethod
    def from_model3(cls, spec: ModelSpec3) -> "NDimSpec":
        return cls((1, 1, 1), spec.r, spec.A, DIMS)

    def to_dict(self) -> dict:
        return {
            "blocks": list(self.blocks),
            "labels": list(self.labels),
            "r": self.r.tolist(),
            "A": self.A.tolist(),
            "weights": {d: self.weights[d].tolist() for d in DIMS},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NDimSpec":
        return cls(tuple(d["blocks"]), d["r"], d["A"], d.get("labels"), d.get("weights"))

    def __eq__(self, other):
        if not isinstance(other, NDimSpec):
            return NotImplemented
        return (
            self.blocks == other.blocks
            and self.labels == other.labels
            and np.array_equal(self.r, other.r)
            and np.array_equal(self.A, other.A)
            and all(np.array_equal(self.weights[d], other.weights[d]) for d in DIMS)
        )

    __hash__ = None


def _check(spec, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise ContractViolation(f"state must have shape ({spec.n},), got {x.shape}")
    return x


def vector_field_n(spec: NDimSpec, x) -> np.ndarray:
    return lv_rhs(spec.r, spec.A, _check(spec, x))


def aggregate(spec: NDimSpec, x) -> np.ndarray:
    """Weighted block sums (E, V, S). Accepts one state or a stack of states."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != spec.n:
        raise ContractViolation(f"state must have trailing dimension {spec.n}, got {x.shape}")
    out = np.zeros(x.shape[:-1] + (3,))
    start = 0
    for b, d in enumerate(DIMS):
        stop = start + spec.blocks[b]
        out[..., b] = x[..., start:stop] @ spec.weights[d] if stop > start else 0.0
        start = stop
    return out


def extract_subsystem(spec: NDimSpec, indices) -> NDimSpec:
    """Restrict to the given coordinates (kept in block order)."""
    idx = sorted(set(int(i) for i in indices))
    if not idx:
        raise ContractViolation("empty selection")
    if idx[0] < 0 or idx[-1] >= spec.n:
        raise ContractViolation(f"indices out of range for N = {spec.n}")
    idx = np.array(idx)
    owner = spec.block_of[idx]
    blocks = tuple(int(np.sum(owner == b)) for b in range(3))
    offsets = np.concatenate([[0], np.cumsum(spec.blocks)[:-1]])
    weights = {d: spec.weights[d][idx[owner == b] - offsets[b]] for b, d in enumerate(DIMS)}
    return NDimSpec(
        blocks,
        spec.r[idx],
        spec.A[np.ix_(idx, idx)],
        tuple(spec.labels[i] for i in idx),
        weights,
    )


def random_ensemble(blocks, count: int, seed: int, coupling_scale: float = 0.5, rate_range=(0.02, 0.2)) -> list[NDimSpec]:
    """Reproducible random block specs.

    Rates take the block sign (E and S negative, V positive) with magnitudes uniform
    in ``rate_range``; off-diagonal couplings are uniform in [-scale, scale]; zero diagonal.
    """
    if coupling_scale <= 0:
        raise ContractViolation("coupling_scale must be positive")
    blocks = tuple(int(b) for b in blocks)
    n = sum(blocks)
    signs = np.repeat([-1.0, 1.0, -1.0], blocks)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        r = signs * rng.uniform(*rate_range, size=n)
        A = rng.uniform(-coupling_scale, coupling_scale, size=(n, n))
        np.fill_diagonal(A, 0.0)
        out.append(NDimSpec(blocks, r, A))
    return out


def aggregate_trajectory(spec: NDimSpec, traj: Trajectory) -> Trajectory:
    agg = aggregate(spec, traj.states)
    events = [(t, int(spec.block_of[i]), kind) for t, i, kind in traj.events]
    return Trajectory(traj.times.copy(), agg, events, DIMS)


def simulate_n(spec: NDimSpec, x0, cfg: IntegratorConfig | None = None) -> tuple[Trajectory, Trajectory]:
    """Integrate the full N-dim system; return (full trajectory, aggregate trajectory).

    Aggregate event dimensions are the block of the factor that crossed.
    """
    try:
        full = simulate(spec, x0, cfg)
        full.labels = spec.labels
    except NumericalBlowup as exc:
        if exc.trajectory is not None:
            exc.trajectory = aggregate_trajectory(spec, exc.trajectory)
        raise
    return full, aggregate_trajectory(spec, full)


def ensemble_persistence(specs, x0, cfg: IntegratorConfig | None = None, eps: float = 1e-6) -> list[dict]:
    """Per-member persistence of the aggregate trajectory. Blow-ups count as not persisting."""
    cfg = cfg or IntegratorConfig()
    rows = []
    for k, spec in enumerate(specs):
        try:
            _, agg = simulate_n(spec, x0, cfg)
        except NumericalBlowup as exc:
            rows.append({"member": k, "persistent": False, "T1": None, "blowup_time": exc.time, "final": None})
            continue
        t1 = persistence_check(agg, eps)
        rows.append(
            {"member": k, "persistent": t1 is not None, "T1": t1, "blowup_time": None, "final": agg.final.tolist()}
        )
    return rows
