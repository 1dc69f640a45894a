"""
Hybrid quantum-classical states as classically correlated branch ensembles.

A state is a list of branches ``(q_i, p_i, rho_i)``: weight, classical
distribution and density matrix. The two sectors stay type-separated; the
only correlation between them is the classical one carried by the weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import ClassicalDistribution, ClassicalObservable, classical_expectation
from .errors import DegenerateStateError, InvariantError, ShapeError
from .quantum import DensityMatrix, QuantumObservable, expectation

WEIGHT_TOL = 1e-12
DROP_TOL = 1e-14
MERGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HybridBranch:
    weight: float
    classical: ClassicalDistribution
    quantum: DensityMatrix

    def __post_init__(self):
        w = float(self.weight)
        if not np.isfinite(w) or w < 0:
            raise InvariantError(f"branch weight must be non-negative, got {w}")
        object.__setattr__(self, "weight", w)


@dataclass(frozen=True, eq=False)
class HybridState:
    branches: tuple

    def __post_init__(self):
        branches = tuple(self.branches)
        if not branches:
            raise InvariantError("a hybrid state needs at least one branch")
        n = branches[0].classical.n
        d = branches[0].quantum.dim
        for b in branches:
            if b.classical.n != n or b.quantum.dim != d:
                raise ShapeError("all branches must share label count and quantum dimension")
        total = sum(b.weight for b in branches)
        if abs(total - 1) > WEIGHT_TOL:
            raise InvariantError(f"branch weights sum to {total:.15g}, not 1")
        object.__setattr__(self, "branches", branches)

    @property
    def n_labels(self) -> int:
        return self.branches[0].classical.n

    @property
    def q_dim(self) -> int:
        return self.branches[0].quantum.dim

    def __len__(self) -> int:
        return len(self.branches)

    def to_dict(self) -> dict:
        return {
            "branches": [
                {
                    "weight": b.weight,
                    "classical": b.classical.probs.tolist(),
                    "quantum": {
                        "re": b.quantum.matrix.real.tolist(),
                        "im": b.quantum.matrix.imag.tolist(),
                    },
                }
                for b in self.branches
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> HybridState:
        branches = []
        for b in data["branches"]:
            rho = np.asarray(b["quantum"]["re"], dtype=float) + 1j * np.asarray(
                b["quantum"]["im"], dtype=float
            )
            branches.append(
                HybridBranch(b["weight"], ClassicalDistribution(b["classical"]), DensityMatrix(rho))
            )
        return cls(tuple(branches))


def product_state(p: ClassicalDistribution, rho: DensityMatrix) -> HybridState:
    """Uncorrelated state: a single branch of weight one."""
    return HybridState((HybridBranch(1.0, p, rho),))


def hybrid_expectation(
    chi: HybridState, o_c: ClassicalObservable, o_q: QuantumObservable
) -> tuple[float, float, float]:
    """
    Return ``(<O_C>, <O_Q>, <O_C> + <O_Q>)`` for the additive observable.

    Each sector is averaged branch by branch,
    ``<O_C> = sum_j q_j {p_j, O_C}`` and ``<O_Q> = sum_j q_j Tr(rho_j O_Q)``,
    and the total is their plain sum.
    """
    if o_c.n != chi.n_labels or o_q.dim != chi.q_dim:
        raise ShapeError("observables do not match the hybrid state's shape")
    c = 0.0
    q = 0.0
    for b in chi.branches:
        c += b.weight * classical_expectation(b.classical, o_c)
        q += b.weight * expectation(b.quantum, o_q)
    return c, q, c + q


def reduced_classical(chi: HybridState) -> ClassicalDistribution:
    if len(chi) == 1:
        return chi.branches[0].classical
    p = sum(b.weight * b.classical.probs for b in chi.branches)
    return ClassicalDistribution(p / p.sum())


def reduced_quantum(chi: HybridState) -> DensityMatrix:
    if len(chi) == 1:
        return chi.branches[0].quantum
    m = sum(b.weight * b.quantum.matrix for b in chi.branches)
    return DensityMatrix(m / np.trace(m).real)


def _renormalized(branches: list[HybridBranch]) -> HybridState:
    total = sum(b.weight for b in branches)
    return HybridState(
        tuple(HybridBranch(b.weight / total, b.classical, b.quantum) for b in branches)
    )


def canonicalize(chi: HybridState) -> HybridState:
    """
    Drop negligible branches, merge identical ones, renormalize.

    Branches with weight below 1e-14 are removed. Two branches merge when
    their classical distributions and density matrices agree entrywise to
    1e-12; the surviving branch keeps the first one's data. A state with
    nothing to drop or merge is returned as is, so the operation is
    idempotent bit for bit.
    """
    kept: list[list] = []
    for b in chi.branches:
        if b.weight < DROP_TOL:
            continue
        for slot in kept:
            other = slot[1]
            if (
                np.max(np.abs(other.classical.probs - b.classical.probs)) <= MERGE_TOL
                and np.max(np.abs(other.quantum.matrix - b.quantum.matrix)) <= MERGE_TOL
            ):
                slot[0] += b.weight
                break
        else:
            kept.append([b.weight, b])
    if not kept:
        raise DegenerateStateError("canonicalization dropped every branch")
    if len(kept) == len(chi.branches):
        return chi
    return _renormalized([HybridBranch(w, b.classical, b.quantum) for w, b in kept])


def merge_by_label(chi: HybridState) -> HybridState:
    """
    Collapse branches whose classical part is the same pure label.

    ``sum_k q_k State_j (+) rho_k`` for a fixed label ``j`` is the same
    hybrid state as ``Q State_j (+) (sum_k q_k rho_k) / Q``: every
    expectation and every subsequent slice acts linearly on the conditional
    state of label ``j``. Branches with mixed classical parts pass through
    untouched. Used by the engines to keep branch counts bounded by the
    label count.
    """
    by_label: dict[int, list[HybridBranch]] = {}
    others: list[HybridBranch] = []
    order: list = []
    for b in chi.branches:
        j = b.classical.pure_label()
        if j is None:
            others.append(b)
            order.append(b)
            continue
        if j not in by_label:
            by_label[j] = []
            order.append(j)
        by_label[j].append(b)
    out = []
    for key in order:
        if isinstance(key, HybridBranch):
            out.append(key)
            continue
        group = by_label[key]
        if len(group) == 1:
            out.append(group[0])
            continue
        w = sum(b.weight for b in group)
        if w == 0:
            continue
        m = sum(b.weight * b.quantum.matrix for b in group) / w
        out.append(HybridBranch(w, group[0].classical, DensityMatrix(m / np.trace(m).real)))
    return HybridState(tuple(out))
