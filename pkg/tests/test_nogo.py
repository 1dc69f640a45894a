import json

import numpy as np
import pytest

from hybridlab import linalg
from hybridlab.classical import ClassicalDistribution, ClassicalObservable
from hybridlab.dynamics import DecomposedStep, HybridHamiltonian, run_trajectory
from hybridlab.errors import DomainError
from hybridlab.hybrid import product_state
from hybridlab.nogo import (
    Verdict,
    audit_conservation,
    audit_records,
    block_commutator_norms,
    classify,
    conditional_filter_trials,
    exchange_records,
    quantum_exchange_counterexample,
    random_hybrid_hamiltonian,
    random_hybrid_state,
    verify_theorem1,
    verify_theorem1_trials,
    verify_theorem2_trials,
)
from hybridlab.quantum import DensityMatrix, KrausChannel, QuantumObservable
from hybridlab.classical import StochasticMap

from oracles import exchange_sz1


def test_classify_boundaries():
    assert classify(0.0, 0.0, 0.0, 1e-12, 1e-9) is Verdict.FROZEN
    assert classify(1e-12, 1e-9, 1e-9, 1e-12, 1e-9) is Verdict.FROZEN
    assert classify(0.0, 2e-9, 0.0, 1e-12, 1e-9) is Verdict.MOVED
    assert classify(2e-12, 0.0, 0.0, 1e-12, 1e-9) is Verdict.VIOLATED


def test_audit_needs_two_records():
    with pytest.raises(DomainError):
        audit_records([(0.0, 0.0, 0.0)])


def test_constant_trajectory_frozen():
    chi = product_state(ClassicalDistribution([0.5, 0.5]), DensityMatrix.basis(2, 0))
    step = DecomposedStep(StochasticMap.identity(2), [KrausChannel.identity(2)] * 2)
    traj = run_trajectory(chi, [step] * 3, (ClassicalObservable([1, 2]), QuantumObservable(linalg.PAULI_Z)))
    r = audit_conservation(traj)
    assert r.verdict is Verdict.FROZEN
    assert r.global_drift == r.local_c_drift == r.local_q_drift == 0.0
    assert [s[0] for s in r.slices] == list(range(7))


def test_exchange_trajectory_maps_to_moved():
    r = audit_records(exchange_records(np.linspace(0, np.pi / 2, 9)))
    assert r.verdict is Verdict.MOVED


def test_theorem1_uncoupled_commuting_quantum_part_frozen(rng):
    h_q = np.diag([0.3, -0.7, 1.1])
    ham = HybridHamiltonian([0.2, -0.4], h_q, [(0.0, np.eye(3)), (0.0, np.eye(3))])
    chi = random_hybrid_state(2, 3, rng)
    o_q = QuantumObservable(np.diag([1.0, 2.0, 2.0]))
    r = verify_theorem1(ham, ClassicalObservable([1, -1]), [0.5, 3.0, 9.0], chi, o_q)
    assert r.extras["holds"]
    assert r.verdict is Verdict.FROZEN


def test_theorem1_interferometer_phase_rotates():
    s = np.diag([0.0, 1.0])
    ham = HybridHamiltonian([0.0, 0.0], np.zeros((2, 2)), [(0.0, s), (2.0, s)])
    chi = product_state(ClassicalDistribution([0.5, 0.5]), DensityMatrix.pure([1, 1]))
    o_q = QuantumObservable(linalg.PAULI_X)
    r = verify_theorem1(ham, ClassicalObservable([3.0, 7.0]), np.linspace(0.1, 2, 6), chi, o_q)
    assert r.extras["holds"] and r.local_c_drift <= 1e-12
    assert r.local_q_drift > 0.1  # [O_Q, H] != 0


def test_block_commutators_vanish(rng):
    for _ in range(20):
        ham = random_hybrid_hamiltonian(4, 4, rng)
        o_c = ClassicalObservable(rng.uniform(-2, 2, 4))
        assert max(block_commutator_norms(ham, o_c)) <= 1e-10
    # a generator that moves labels would fail the same check
    h = ham.block_matrix().copy()
    h[0, 4] = h[4, 0] = 1.0
    oc = np.kron(np.diag([0.0, 1.0, 2.0, 3.0]), np.eye(4))
    assert linalg.commutator_norm(oc, h) >= 1.0


def test_theorem1_trials_small_and_deterministic():
    a = verify_theorem1_trials(4, 4, 30, seed=5)
    b = verify_theorem1_trials(4, 4, 30, seed=5)
    assert a.n_fail == 0
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())


def test_theorem2_trials_small():
    s = verify_theorem2_trials(4, 4, 20, 50, seed=3)
    assert s.n_fail == 0 and s.n_pass == 50
    assert s.extras["max_global_drift"] <= 1e-12


def test_theorem2_trivial_dims():
    s = verify_theorem2_trials(1, 1, 5, 20, seed=0)
    assert s.n_fail == 0
    assert s.extras["max_local_c_drift"] == 0


def test_theorem2_deterministic():
    a = verify_theorem2_trials(3, 3, 5, 20, seed=11).to_dict()
    b = verify_theorem2_trials(3, 3, 5, 20, seed=11).to_dict()
    c = verify_theorem2_trials(3, 3, 5, 20, seed=12).to_dict()
    assert json.dumps(a) == json.dumps(b)
    assert a["extras"] != c["extras"]


def test_trial_argument_checks():
    with pytest.raises(DomainError):
        verify_theorem2_trials(4, 4, 20, 0, seed=1)
    with pytest.raises(DomainError):
        verify_theorem2_trials(4, 4, 0, 5, seed=1)
    with pytest.raises(DomainError):
        verify_theorem1_trials(4, 4, 5, seed=-1)


def test_conditional_filter_small():
    s = conditional_filter_trials(2, 2, 3, 300, seed=9)
    assert s.n_fail == 0
    assert s.extras["n_conditioned"] > 20


@pytest.mark.parametrize("t", [0.0, 0.3, np.pi / 4, np.pi / 2, 2.0, np.pi])
def test_exchange_matches_series_oracle(t):
    sz1, sz2, total = exchange_records([t])[0]
    assert abs(sz1 - exchange_sz1(t)) <= 1e-12
    assert abs(sz1 - np.cos(2 * t)) <= 1e-12
    assert abs(total) <= 1e-15


def test_counterexample_report():
    r = quantum_exchange_counterexample()
    assert abs(r.extras["final_sz1"] + 1) <= 1e-9
    assert abs(r.extras["final_sz2"] - 1) <= 1e-9
    assert r.global_drift <= 1e-12
    assert r.local_c_drift >= 1.9 and r.local_q_drift >= 1.9
    assert r.verdict is Verdict.MOVED
    assert r.extras["global_conserved"] and r.extras["local_moved"]


def test_counterexample_edge_times():
    r0 = quantum_exchange_counterexample(0.0)
    assert r0.verdict is Verdict.FROZEN and not r0.extras["local_moved"]
    rpi = quantum_exchange_counterexample(np.pi)
    assert abs(rpi.extras["final_sz1"] - 1) <= 1e-9
