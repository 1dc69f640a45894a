import numpy as np
import pytest
from hypothesis import given, strategies as st

from hybridlab.classical import (
    ClassicalDistribution,
    ClassicalObservable,
    StochasticMap,
    apply_stochastic,
    classical_expectation,
    conserving_stochastic_map,
    degenerate_classes,
    random_distribution,
    random_stochastic_map,
)
from hybridlab.errors import InvariantError, ShapeError


def test_expectation_examples():
    assert classical_expectation(ClassicalDistribution([1, 0]), ClassicalObservable([3, 7])) == 3
    assert classical_expectation(ClassicalDistribution([0.5, 0.5]), ClassicalObservable([0, 1])) == 0.5
    got = classical_expectation(ClassicalDistribution([0.2, 0.3, 0.5]), ClassicalObservable([1, 2, 3]))
    assert abs(got - 2.3) <= 1e-15


def test_expectation_shape_error():
    with pytest.raises(ShapeError):
        classical_expectation(ClassicalDistribution([1.0]), ClassicalObservable([1, 2]))


def test_distribution_invariants():
    with pytest.raises(InvariantError):
        ClassicalDistribution([0.5, 0.6])
    with pytest.raises(InvariantError):
        ClassicalDistribution([1.2, -0.2])
    assert ClassicalDistribution.pure(3, 1).pure_label() == 1
    assert ClassicalDistribution.uniform(3).pure_label() is None


def test_apply_examples():
    p = ClassicalDistribution([0.3, 0.7])
    assert np.array_equal(apply_stochastic(StochasticMap.identity(2), p).probs, p.probs)
    swap = StochasticMap([[0, 1], [1, 0]])
    assert np.max(np.abs(apply_stochastic(swap, p).probs - [0.7, 0.3])) == 0
    uni = StochasticMap(np.full((4, 4), 0.25))
    out = apply_stochastic(uni, ClassicalDistribution([0.1, 0.2, 0.3, 0.4]))
    assert np.max(np.abs(out.probs - 0.25)) <= 1e-15


def test_map_invariants():
    with pytest.raises(InvariantError):
        StochasticMap([[0.5, 0.5], [0.4, 0.5]])
    with pytest.raises(ShapeError):
        StochasticMap([[1.0, 0.0]])


def test_degenerate_classes():
    assert degenerate_classes([1, 1, 4]) == [[0, 1], [2]]
    assert degenerate_classes([3, 1, 3, 1 + 1e-10]) == [[1, 3], [0, 2]]


def test_conserving_map_nondegenerate_is_identity(rng):
    v = conserving_stochastic_map(ClassicalObservable([1, 2, 3]), rng)
    assert np.array_equal(v.matrix, np.eye(3))


def test_conserving_map_degenerate_pair(rng):
    obs = ClassicalObservable([5, 5])
    for _ in range(20):
        v = conserving_stochastic_map(obs, rng)
        p = random_distribution(2, rng)
        assert abs(classical_expectation(apply_stochastic(v, p), obs) - 5) <= 1e-14


def test_conserving_map_partial_degeneracy(rng):
    obs = ClassicalObservable([1, 1, 4])
    v = conserving_stochastic_map(obs, rng, n_perms=3)
    assert abs(v.matrix[2, 2] - 1) <= 1e-15
    assert v.matrix[0, 2] == v.matrix[1, 2] == v.matrix[2, 0] == v.matrix[2, 1] == 0
    assert np.max(np.abs(obs.values @ v.matrix - obs.values)) <= 1e-14


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_conserving_map_property(n, seed):
    rng = np.random.default_rng(seed)
    obs = ClassicalObservable(rng.integers(0, 3, n).astype(float))
    v = conserving_stochastic_map(obs, rng)
    for _ in range(100):
        p = random_distribution(n, rng)
        got = classical_expectation(apply_stochastic(v, p), obs)
        assert abs(got - classical_expectation(p, obs)) <= 1e-10


def test_random_map_examples(rng):
    assert np.array_equal(random_stochastic_map(1, rng).matrix, np.ones((1, 1)))


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_random_map_property(n, seed):
    rng = np.random.default_rng(seed)
    v = random_stochastic_map(n, rng)
    assert np.max(np.abs(v.matrix.sum(axis=0) - 1)) <= 1e-12
    w = random_stochastic_map(n, rng)
    vw = v.compose(w)
    assert np.max(np.abs(vw.matrix.sum(axis=0) - 1)) <= 1e-12
    out = apply_stochastic(vw, random_distribution(n, rng))
    assert abs(out.probs.sum() - 1) <= 1e-12
    assert out.probs.min() >= 0
