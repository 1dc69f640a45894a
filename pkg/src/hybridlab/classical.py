"""
Classical sector on a finite label set.

States are column vectors of probabilities and stochastic maps are
column-stochastic, so a map acts as ``V @ p``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvariantError, ShapeError

SUM_TOL = 1e-12
NEG_TOL = 1e-15
DEGENERACY_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class ClassicalDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ShapeError(f"probabilities must be a non-empty vector, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise InvariantError("probabilities must be finite")
        if p.min() < -NEG_TOL:
            raise InvariantError(f"negative probability {p.min():.3e}")
        p = np.clip(p, 0.0, None)
        if abs(p.sum() - 1) > SUM_TOL:
            raise InvariantError(f"probabilities sum to {p.sum():.15g}, not 1")
        object.__setattr__(self, "probs", _readonly(p))

    @property
    def n(self) -> int:
        return self.probs.size

    @classmethod
    def pure(cls, n: int, label: int) -> ClassicalDistribution:
        p = np.zeros(n)
        p[label] = 1.0
        return cls(p)

    @classmethod
    def uniform(cls, n: int) -> ClassicalDistribution:
        return cls(np.full(n, 1.0 / n))

    def pure_label(self) -> int | None:
        """The label carrying all the weight, or None for a mixed distribution."""
        nz = np.flatnonzero(self.probs)
        if nz.size == 1 and self.probs[nz[0]] == 1.0:
            return int(nz[0])
        return None


@dataclass(frozen=True, eq=False)
class StochasticMap:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ShapeError(f"stochastic map must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvariantError("stochastic map entries must be finite")
        if m.min() < -NEG_TOL or m.max() > 1 + NEG_TOL:
            raise InvariantError("stochastic map entries must lie in [0, 1]")
        dev = np.max(np.abs(m.sum(axis=0) - 1))
        if dev > SUM_TOL:
            raise InvariantError(f"column sums deviate from 1 by {dev:.3e}")
        object.__setattr__(self, "matrix", _readonly(np.clip(m, 0.0, 1.0)))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int) -> StochasticMap:
        return cls(np.eye(n))

    def compose(self, other: StochasticMap) -> StochasticMap:
        """Map applying ``other`` first, then ``self``."""
        if self.n != other.n:
            raise ShapeError("cannot compose maps on different label sets")
        return StochasticMap(self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class ClassicalObservable:
    """Diagonal observable sum_i o_i |i><i| stored as its value vector."""

    values: np.ndarray
    name: str = "O_C"

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ShapeError(f"observable values must be a non-empty vector, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvariantError("observable values must be finite")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def n(self) -> int:
        return self.values.size

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.values).astype(complex)


def classical_expectation(p: ClassicalDistribution, obs: ClassicalObservable) -> float:
    if p.n != obs.n:
        raise ShapeError(f"distribution has {p.n} labels, observable has {obs.n}")
    return float(p.probs @ obs.values)


def apply_stochastic(v: StochasticMap, p: ClassicalDistribution) -> ClassicalDistribution:
    if v.n != p.n:
        raise ShapeError(f"map acts on {v.n} labels, distribution has {p.n}")
    q = v.matrix @ p.probs
    # keep total probability exact against accumulated rounding
    return ClassicalDistribution(q / q.sum())


def degenerate_classes(values, tol: float = DEGENERACY_TOL) -> list[list[int]]:
    """Group label indices whose observable values are chained within ``tol``."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    classes = [[int(order[0])]]
    for a, b in zip(order[:-1], order[1:]):
        if values[b] - values[a] <= tol:
            classes[-1].append(int(b))
        else:
            classes.append([int(b)])
    return [sorted(c) for c in classes]


def conserving_stochastic_map(
    obs: ClassicalObservable,
    rng: np.random.Generator,
    n_perms: int | None = None,
) -> StochasticMap:
    """
    Random stochastic map preserving ``<obs>`` for every input distribution.

    Built as a convex mixture of permutations, each of which only permutes
    labels inside one degenerate-value class of ``obs``. Every column ``j``
    is then supported on labels with value ``o_j``, so sum_i V_ij o_i = o_j.
    """
    if n_perms is None:
        n_perms = int(rng.integers(1, 4))
    n = obs.n
    classes = degenerate_classes(obs.values)
    weights = rng.dirichlet(np.ones(n_perms))
    m = np.zeros((n, n))
    for w in weights:
        perm = np.arange(n)
        for cls_ in classes:
            if len(cls_) > 1:
                perm[cls_] = rng.permutation(cls_)
        m[perm, np.arange(n)] += w
    return StochasticMap(m)


def random_stochastic_map(n: int, rng: np.random.Generator) -> StochasticMap:
    """Columns drawn independently from the flat Dirichlet distribution."""
    if n < 1:
        raise DomainError("label count must be at least 1")
    m = rng.dirichlet(np.ones(n), size=n).T
    return StochasticMap(m / m.sum(axis=0))


def random_distribution(n: int, rng: np.random.Generator) -> ClassicalDistribution:
    if n < 1:
        raise DomainError("label count must be at least 1")
    p = rng.dirichlet(np.ones(n))
    return ClassicalDistribution(p / p.sum())
