import numpy as np
import pytest
from hypothesis import given, strategies as st

from hybridlab import linalg
from hybridlab.classical import (
    ClassicalDistribution,
    ClassicalObservable,
    StochasticMap,
    conserving_stochastic_map,
    random_distribution,
    random_stochastic_map,
)
from hybridlab.dynamics import (
    DecomposedStep,
    HybridHamiltonian,
    apply_step,
    conditional_unitaries,
    evolve_hamiltonian,
    half_steps,
    run_trajectory,
)
from hybridlab.errors import InvariantError, ShapeError
from hybridlab.hybrid import HybridBranch, HybridState, hybrid_expectation, product_state, reduced_classical, reduced_quantum
from hybridlab.nogo import random_degenerate_observables, random_hybrid_hamiltonian, random_hybrid_state
from hybridlab.quantum import (
    DensityMatrix,
    KrausChannel,
    QuantumObservable,
    conserving_channel,
    dephasing_channel,
    random_density_matrix,
    random_kraus_channel,
)

X, Z = linalg.PAULI_X, linalg.PAULI_Z
UP = DensityMatrix.basis(2, 0)
PLUS = DensityMatrix.pure([1, 1])


def same_state(a, b, tol=1e-14):
    if len(a) != len(b):
        return False
    for x, y in zip(a.branches, b.branches):
        if abs(x.weight - y.weight) > tol:
            return False
        if np.max(np.abs(x.classical.probs - y.classical.probs)) > tol:
            return False
        if np.max(np.abs(x.quantum.matrix - y.quantum.matrix)) > tol:
            return False
    return True


def test_hamiltonian_shape_checks():
    with pytest.raises(ShapeError):
        HybridHamiltonian([0.0, 1.0], np.zeros((2, 2)), [(1.0, Z)])
    with pytest.raises(ShapeError):
        HybridHamiltonian([0.0], np.zeros((2, 2)), [(1.0, np.eye(3))])


def test_uncoupled_unitaries_are_phases():
    ham = HybridHamiltonian([0.3, -1.2], np.zeros((2, 2)), [(0.0, Z), (0.0, X)])
    for eps, u in zip([0.3, -1.2], conditional_unitaries(ham, 1.7)):
        assert np.max(np.abs(u - np.exp(-1j * eps * 1.7) * np.eye(2))) <= 1e-14


def test_single_label_pauli_z_unitary():
    ham = HybridHamiltonian([0.0], np.zeros((2, 2)), [(1.0, Z)])
    (u,) = conditional_unitaries(ham, np.pi)
    assert np.max(np.abs(u - np.diag([np.exp(-1j * np.pi), np.exp(1j * np.pi)]))) <= 1e-14


def test_diagonal_couplings_differ_by_phases():
    ham = HybridHamiltonian([0.0, 0.0], np.zeros((2, 2)), [(0.4, np.diag([0.0, 1.0])), (1.1, np.diag([0.0, 1.0]))])
    u0, u1 = conditional_unitaries(ham, 2.0)
    assert np.max(np.abs(u0 - np.diag([1, np.exp(-0.8j)]))) <= 1e-14
    assert np.max(np.abs(u1 - np.diag([1, np.exp(-2.2j)]))) <= 1e-14


def test_evolve_at_zero_time_is_identity(rng):
    ham = random_hybrid_hamiltonian(3, 2, rng)
    chi = random_hybrid_state(3, 2, rng)
    out = evolve_hamiltonian(chi, ham, 0.0)
    o_c, o_q = ClassicalObservable(rng.standard_normal(3)), QuantumObservable(X)
    a, b = hybrid_expectation(chi, o_c, o_q), hybrid_expectation(out, o_c, o_q)
    assert max(abs(x - y) for x, y in zip(a, b)) <= 1e-14


@given(st.integers(1, 4), st.integers(1, 4), st.floats(-10, 10), st.integers(0, 2**32 - 1))
def test_evolution_freezes_classical_marginal(n, d, t, seed):
    rng = np.random.default_rng(seed)
    ham = random_hybrid_hamiltonian(n, d, rng)
    chi = random_hybrid_state(n, d, rng)
    out = evolve_hamiltonian(chi, ham, t)
    assert np.max(np.abs(reduced_classical(out).probs - reduced_classical(chi).probs)) <= 1e-12


def test_interferometer_phase():
    ham = HybridHamiltonian([0.0, 0.0], np.zeros((2, 2)), [(0.0, np.diag([0.0, 1.0])), (1.0, np.diag([0.0, 1.0]))])
    chi = product_state(ClassicalDistribution([0.5, 0.5]), PLUS)
    for t in np.linspace(0, 5, 11):
        out = evolve_hamiltonian(chi, ham, t)
        rho1 = [b.quantum.matrix for b in out.branches if b.classical.pure_label() == 1][0]
        assert abs(rho1[0, 1] - 0.5 * np.exp(1j * t)) <= 1e-14
        port = PLUS.matrix
        prob = float(np.real(np.trace(rho1 @ port)))
        assert abs(prob - (1 + np.cos(t)) / 2) <= 1e-14


def test_identity_step_leaves_state(rng):
    chi = random_hybrid_state(3, 2, rng)
    step = DecomposedStep(StochasticMap.identity(3), [KrausChannel.identity(2)] * 3)
    out = apply_step(chi, step)
    o_c, o_q = ClassicalObservable([1, 2, 5]), QuantumObservable(X + Z)
    a, b = hybrid_expectation(chi, o_c, o_q), hybrid_expectation(out, o_c, o_q)
    assert max(abs(x - y) for x, y in zip(a, b)) <= 1e-14


def test_single_label_dephasing():
    chi = product_state(ClassicalDistribution([1.0]), PLUS)
    out = apply_step(chi, DecomposedStep(StochasticMap.identity(1), [dephasing_channel(2)]))
    assert np.max(np.abs(reduced_quantum(out).matrix - np.eye(2) / 2)) <= 1e-15
    assert reduced_classical(out).probs.tolist() == [1.0]


def test_label_controlled_flip_correlates_sectors():
    chi = product_state(ClassicalDistribution([0.5, 0.5]), UP)
    step = DecomposedStep(StochasticMap.identity(2), [KrausChannel.identity(2), KrausChannel.unitary(X)])
    out = apply_step(chi, step)
    expected = HybridState((
        HybridBranch(0.5, ClassicalDistribution.pure(2, 0), UP),
        HybridBranch(0.5, ClassicalDistribution.pure(2, 1), DensityMatrix.basis(2, 1)),
    ))
    assert same_state(out, expected)


def test_state_dependent_generators_see_pre_step_state():
    seen = []

    def v_gen(chi):
        seen.append(reduced_classical(chi).probs.copy())
        return StochasticMap([[0, 1], [1, 0]])

    chi = product_state(ClassicalDistribution([0.2, 0.8]), UP)
    step = DecomposedStep(v_gen, lambda chi: [KrausChannel.identity(2)] * 2)
    out = apply_step(chi, step)
    assert seen[0].tolist() == [0.2, 0.8]
    assert np.max(np.abs(reduced_classical(out).probs - [0.8, 0.2])) <= 1e-15


def test_bad_generator_reports_step_index():
    chi = product_state(ClassicalDistribution([0.5, 0.5]), UP)
    steps = [DecomposedStep(StochasticMap.identity(2), [KrausChannel.identity(2)] * 2)] * 2
    steps.append(DecomposedStep(StochasticMap.identity(2), lambda chi: [KrausChannel.identity(2)]))
    with pytest.raises(InvariantError) as info:
        run_trajectory(chi, steps, (ClassicalObservable([0, 1]), QuantumObservable(Z)))
    assert info.value.step == 3


def test_empty_and_identity_trajectories(rng):
    chi = random_hybrid_state(2, 2, rng)
    obs = (ClassicalObservable([1, 3]), QuantumObservable(Z))
    assert len(run_trajectory(chi, [], obs)) == 1
    step = DecomposedStep(StochasticMap.identity(2), [KrausChannel.identity(2)] * 2)
    traj = run_trajectory(chi, [step] * 5, obs)
    assert len(traj) == 11
    recs = np.array(traj.records)
    assert np.max(np.abs(recs - recs[0])) <= 1e-14


def test_hamiltonian_trajectory_matches_direct_evolution(rng):
    ham = random_hybrid_hamiltonian(3, 3, rng)
    chi = random_hybrid_state(3, 3, rng)
    obs = (ClassicalObservable([1, 2, 3]), QuantumObservable(np.diag([1.0, 0.0, -1.0])))
    traj = run_trajectory(chi, (ham, 0.25, 8), obs)
    assert traj.t[-1] == 2.0
    direct = hybrid_expectation(evolve_hamiltonian(chi, ham, 2.0), *obs)
    assert max(abs(x - y) for x, y in zip(traj.records[-1], direct)) <= 1e-12


def test_from_hamiltonian_step_matches_engine(rng):
    ham = random_hybrid_hamiltonian(2, 2, rng)
    chi = random_hybrid_state(2, 2, rng)
    obs = (ClassicalObservable([0.5, -1.0]), QuantumObservable(X))
    a = hybrid_expectation(apply_step(chi, DecomposedStep.from_hamiltonian(ham, 0.7)), *obs)
    b = hybrid_expectation(evolve_hamiltonian(chi, ham, 0.7), *obs)
    assert max(abs(x - y) for x, y in zip(a, b)) <= 1e-13


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_half_slice_structure(n, d, seed):
    rng = np.random.default_rng(seed)
    chi = random_hybrid_state(n, d, rng)
    o_c = ClassicalObservable(rng.standard_normal(n))
    step = DecomposedStep(
        random_stochastic_map(n, rng),
        [random_kraus_channel(d, 2, rng) for _ in range(n)],
    )
    mid, out = half_steps(chi, step)
    # V leaves every branch's quantum part alone
    for a, b in zip(chi.branches, mid.branches):
        assert np.array_equal(a.quantum.matrix, b.quantum.matrix)
    # controls never move the classical marginal
    assert np.max(np.abs(reduced_classical(out).probs - reduced_classical(mid).probs)) <= 1e-12
    assert abs(sum(b.weight for b in out.branches) - 1) <= 1e-12
    c_mid = hybrid_expectation(mid, o_c, QuantumObservable(np.eye(d)))[0]
    c_out = hybrid_expectation(out, o_c, QuantumObservable(np.eye(d)))[0]
    assert abs(c_mid - c_out) <= 1e-12


def test_conserving_trajectory_twenty_slices(rng):
    o_c, o_q = random_degenerate_observables(4, 4, rng)
    chi = product_state(random_distribution(4, rng), random_density_matrix(4, rng))
    steps = [
        DecomposedStep(conserving_stochastic_map(o_c, rng), [conserving_channel(o_q, rng) for _ in range(4)])
        for _ in range(20)
    ]
    recs = np.array(run_trajectory(chi, steps, (o_c, o_q)).records)
    drift = np.abs(recs - recs[0]).max(axis=0)
    assert drift[2] <= 1e-12 and drift[0] <= 1e-9 and drift[1] <= 1e-9
