"""
Conservation auditing and randomized no-go verifiers.

The two hybrid frameworks forbid a conserved additive quantity
``O_C + O_Q`` from moving between sectors. The verifiers here build many
random instances of each framework, audit every recorded slice, and report
how many instances behave as predicted. ``quantum_exchange_counterexample``
shows that two quantum systems do exchange the quantity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .classical import (
    ClassicalObservable,
    conserving_stochastic_map,
    random_distribution,
    random_stochastic_map,
)
from .dynamics import (
    HybridHamiltonian,
    Trajectory,
    apply_controls,
    apply_v,
    evolve_hamiltonian,
)
from .errors import DomainError, InvariantError
from .hybrid import HybridBranch, HybridState, hybrid_expectation, product_state
from .quantum import (
    QuantumObservable,
    conserving_channels,
    random_density_matrix,
    random_kraus_channel,
    random_unitary,
)
from .rng import check_seed, trial_rng

TOL_GLOBAL = 1e-12
TOL_LOCAL = 1e-9
THEOREM1_DRIFT_TOL = 1e-12
THEOREM1_COMMUTATOR_TOL = 1e-10
MAX_POWER = 4
MAX_LABELS = 16
MAX_QDIM = 16


class Verdict(str, enum.Enum):
    FROZEN = "GlobalConservedLocalsFrozen"
    MOVED = "GlobalConservedLocalsMoved"
    VIOLATED = "GlobalViolated"


@dataclass
class ConservationReport:
    """
    Per-slice expectations with drifts measured against slice 0.

    ``slices`` rows are ``(index, <O_C>, <O_Q>, <O_C + O_Q>)``. For purely
    quantum runs the two columns hold the two local subsystems. ``extras``
    carries check-specific numbers such as commutator norms.
    """

    slices: list
    global_drift: float
    local_c_drift: float
    local_q_drift: float
    verdict: Verdict
    tol_global: float
    tol_local: float
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "slices": [[int(i), float(c), float(q), float(s)] for i, c, q, s in self.slices],
            "global_drift": self.global_drift,
            "local_c_drift": self.local_c_drift,
            "local_q_drift": self.local_q_drift,
            "verdict": self.verdict.value,
            "tol_global": self.tol_global,
            "tol_local": self.tol_local,
            "extras": self.extras,
        }


@dataclass
class TrialSummary:
    n_trials: int
    n_pass: int
    n_fail: int
    seed: int
    failures: list
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_pass + self.n_fail != self.n_trials:
            raise ValueError("n_pass + n_fail must equal n_trials")

    def to_dict(self) -> dict:
        return {
            "n_trials": self.n_trials,
            "n_pass": self.n_pass,
            "n_fail": self.n_fail,
            "seed": self.seed,
            "failures": [{"trial": k, "report": r.to_dict()} for k, r in self.failures],
            "extras": self.extras,
        }


def classify(global_drift: float, local_c: float, local_q: float, tol_global: float, tol_local: float) -> Verdict:
    if global_drift > tol_global:
        return Verdict.VIOLATED
    if local_c > tol_local or local_q > tol_local:
        return Verdict.MOVED
    return Verdict.FROZEN


def audit_records(records, tol_global: float = TOL_GLOBAL, tol_local: float = TOL_LOCAL, indices=None) -> ConservationReport:
    """Audit a sequence of ``(<O_C>, <O_Q>, <O_C+O_Q>)`` rows."""
    if len(records) < 2:
        raise DomainError("a conservation audit needs at least two recorded slices")
    arr = np.asarray(records, dtype=float)
    if indices is None:
        indices = list(range(len(records)))
    d = np.abs(arr - arr[0])
    g, c, q = float(d[:, 2].max()), float(d[:, 0].max()), float(d[:, 1].max())
    return ConservationReport(
        slices=[(int(i), *map(float, r)) for i, r in zip(indices, arr)],
        global_drift=g,
        local_c_drift=c,
        local_q_drift=q,
        verdict=classify(g, c, q, tol_global, tol_local),
        tol_global=tol_global,
        tol_local=tol_local,
    )


def audit_conservation(traj: Trajectory, tol_global: float = TOL_GLOBAL, tol_local: float = TOL_LOCAL) -> ConservationReport:
    return audit_records(traj.records, tol_global, tol_local, indices=traj.times)


# --- Hamiltonian formalism -------------------------------------------------


def block_commutator_norms(ham: HybridHamiltonian, o_c: ClassicalObservable, max_power: int = MAX_POWER) -> list[float]:
    """``max|[O_C (x) I, H^k]|`` for k = 1..max_power on the explicit block matrix."""
    h = ham.block_matrix()
    oc = linalg.tensor_product(o_c.as_matrix(), np.eye(ham.q_dim))
    norms = []
    hk = np.eye(h.shape[0], dtype=complex)
    for _ in range(max_power):
        hk = hk @ h
        norms.append(linalg.commutator_norm(oc, hk))
    return norms


def verify_theorem1(
    ham: HybridHamiltonian,
    o_c: ClassicalObservable,
    times,
    chi0: HybridState,
    o_q: QuantumObservable | None = None,
    tol_global: float = TOL_GLOBAL,
    tol_local: float = TOL_LOCAL,
) -> ConservationReport:
    """
    Evolve ``chi0`` to each time in ``times`` and audit the expectations.

    The report's ``extras`` hold the block-commutator norms for powers
    1..4 and a ``holds`` flag: ``<O_C>`` drift at most 1e-12 and every
    commutator norm at most 1e-10. ``o_q`` defaults to the zero observable.
    """
    if o_q is None:
        o_q = QuantumObservable(np.zeros((ham.q_dim, ham.q_dim)), "zero")
    times = [0.0] + [float(t) for t in times]
    records = [hybrid_expectation(chi0, o_c, o_q)]
    for t in times[1:]:
        records.append(hybrid_expectation(evolve_hamiltonian(chi0, ham, t), o_c, o_q))
    report = audit_records(records, tol_global, tol_local)
    norms = block_commutator_norms(ham, o_c)
    report.extras = {
        "times": times,
        "commutator_norms": norms,
        "holds": bool(report.local_c_drift <= THEOREM1_DRIFT_TOL and max(norms) <= THEOREM1_COMMUTATOR_TOL),
    }
    return report


def _random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (a + a.conj().T) / 2


def random_hybrid_hamiltonian(n_labels: int, q_dim: int, rng: np.random.Generator) -> HybridHamiltonian:
    eps = rng.uniform(-1, 1, n_labels)
    h_q = _random_hermitian(q_dim, rng, 0.5)
    couplings = [(float(rng.uniform(-1, 1)), _random_hermitian(q_dim, rng, 0.5)) for _ in range(n_labels)]
    return HybridHamiltonian(eps, h_q, couplings)


def random_hybrid_state(n_labels: int, q_dim: int, rng: np.random.Generator, n_branches: int | None = None) -> HybridState:
    """Classically correlated random state with 1..3 branches."""
    if n_branches is None:
        n_branches = int(rng.integers(1, 4))
    w = rng.dirichlet(np.ones(n_branches))
    w = w / w.sum()
    return HybridState(
        tuple(
            HybridBranch(float(wi), random_distribution(n_labels, rng), random_density_matrix(q_dim, rng))
            for wi in w
        )
    )


def _check_dims(n_labels: int, q_dim: int, n_trials: int):
    if n_trials < 1:
        raise DomainError("n_trials must be at least 1")
    if not 1 <= n_labels <= MAX_LABELS or not 1 <= q_dim <= MAX_QDIM:
        raise DomainError(f"dims must lie in [1, {MAX_LABELS}] x [1, {MAX_QDIM}]")


def verify_theorem1_trials(n_labels: int, q_dim: int, n_trials: int, seed: int, n_times: int = 5, t_max: float = 10.0) -> TrialSummary:
    """Randomized Hamiltonians (dims drawn up to the caps) at random times in [0, t_max]."""
    _check_dims(n_labels, q_dim, n_trials)
    seed = check_seed(seed)
    failures = []
    worst_drift = 0.0
    worst_comm = 0.0
    for k in range(n_trials):
        rng = trial_rng(seed, k)
        n = int(rng.integers(1, n_labels + 1))
        d = int(rng.integers(1, q_dim + 1))
        ham = random_hybrid_hamiltonian(n, d, rng)
        o_c = ClassicalObservable(rng.uniform(-2, 2, n))
        chi0 = random_hybrid_state(n, d, rng)
        times = np.sort(rng.uniform(0, t_max, n_times))
        report = verify_theorem1(ham, o_c, times, chi0)
        worst_drift = max(worst_drift, report.local_c_drift)
        worst_comm = max(worst_comm, max(report.extras["commutator_norms"]))
        if not report.extras["holds"]:
            failures.append((k, report))
    return TrialSummary(
        n_trials, n_trials - len(failures), len(failures), seed, failures,
        {"theorem": 1, "max_c_drift": worst_drift, "max_commutator_norm": worst_comm},
    )


# --- operational decomposition ---------------------------------------------


def random_degenerate_observables(n_labels: int, q_dim: int, rng: np.random.Generator, levels: int = 3):
    """
    Observables with integer-spaced, frequently degenerate spectra.

    Degeneracies matter: without them conserving maps reduce to the trivial
    diagonal ones.
    """
    scale = rng.uniform(0.5, 2.0)
    o_c = ClassicalObservable(scale * rng.integers(0, levels, n_labels), "O_C")
    eig = scale * rng.integers(0, levels, q_dim)
    u = random_unitary(q_dim, rng)
    o_q = QuantumObservable((u * eig) @ u.conj().T, "O_Q")
    return o_c, o_q


def _run_audited(chi, v_fn, controls_fn, n_slices, o_c, o_q, tol_global, tol_local, stop_on_violation=False):
    """
    Half-slice loop with lazily drawn maps.

    ``controls_fn`` is only called once the V half-slice is recorded, so an
    early stop skips drawing controls that would never be used.
    """
    records = [hybrid_expectation(chi, o_c, o_q)]
    base = records[0][2]
    for m in range(1, n_slices + 1):
        for half, fn in ((apply_v, v_fn), (apply_controls, controls_fn)):
            try:
                chi = half(chi, fn(m))
            except InvariantError as exc:
                raise InvariantError(str(exc), step=m) from exc
            records.append(hybrid_expectation(chi, o_c, o_q))
            if stop_on_violation and abs(records[-1][2] - base) > tol_global:
                return audit_records(records, tol_global, tol_local)
    return audit_records(records, tol_global, tol_local)


def theorem2_trial(k: int, n_labels: int, q_dim: int, n_slices: int, seed: int, tol_global=TOL_GLOBAL, tol_local=TOL_LOCAL) -> ConservationReport:
    """One conserving-dynamics trial; dims drawn uniformly up to the caps."""
    rng = trial_rng(seed, k)
    n = int(rng.integers(1, n_labels + 1))
    d = int(rng.integers(1, q_dim + 1))
    o_c, o_q = random_degenerate_observables(n, d, rng)
    chi0 = product_state(random_distribution(n, rng), random_density_matrix(d, rng))

    report = _run_audited(
        chi0,
        lambda m: conserving_stochastic_map(o_c, rng),
        lambda m: conserving_channels(o_q, rng, n),
        n_slices, o_c, o_q, tol_global, tol_local,
    )
    report.extras = {"n_labels": n, "q_dim": d}
    return report


def verify_theorem2_trials(
    n_labels: int,
    q_dim: int,
    n_slices: int,
    n_trials: int,
    seed: int,
    tol_global: float = TOL_GLOBAL,
    tol_local: float = TOL_LOCAL,
) -> TrialSummary:
    """
    Conserving-dynamics trials; a trial passes iff its verdict is
    GlobalConservedLocalsFrozen at every recorded half-slice.
    """
    _check_dims(n_labels, q_dim, n_trials)
    if n_slices < 1:
        raise DomainError("n_slices must be at least 1")
    seed = check_seed(seed)
    failures = []
    worst = [0.0, 0.0, 0.0]
    for k in range(n_trials):
        r = theorem2_trial(k, n_labels, q_dim, n_slices, seed, tol_global, tol_local)
        worst = [max(worst[0], r.global_drift), max(worst[1], r.local_c_drift), max(worst[2], r.local_q_drift)]
        if r.verdict is not Verdict.FROZEN:
            failures.append((k, r))
    return TrialSummary(
        n_trials, n_trials - len(failures), len(failures), seed, failures,
        {
            "theorem": 2,
            "mode": "conserving",
            "n_slices": n_slices,
            "max_global_drift": worst[0],
            "max_local_c_drift": worst[1],
            "max_local_q_drift": worst[2],
        },
    )


def unconstrained_trial(k: int, n_labels: int, q_dim: int, n_slices: int, seed: int, tol_global=TOL_GLOBAL, tol_local=TOL_LOCAL) -> ConservationReport:
    """
    One trial with unconstrained random V and random Kraus controls.

    Observables take values in {0, 1} (scaled), so small dims often make
    them trivially conserved. The run stops at the first half-slice whose
    global drift exceeds ``tol_global``: such a trial is outside the
    implication being tested.
    """
    rng = trial_rng(seed, k)
    n = int(rng.integers(1, n_labels + 1))
    d = int(rng.integers(1, q_dim + 1))
    o_c, o_q = random_degenerate_observables(n, d, rng, levels=2)
    chi0 = product_state(random_distribution(n, rng), random_density_matrix(d, rng))

    report = _run_audited(
        chi0,
        lambda m: random_stochastic_map(n, rng),
        lambda m: [random_kraus_channel(d, int(rng.integers(1, 4)), rng) for _ in range(n)],
        n_slices, o_c, o_q, tol_global, tol_local, stop_on_violation=True,
    )
    report.extras = {"n_labels": n, "q_dim": d}
    return report


def conditional_filter_trials(
    n_labels: int,
    q_dim: int,
    n_slices: int,
    n_trials: int,
    seed: int,
    tol_global: float = TOL_GLOBAL,
    tol_local: float = TOL_LOCAL,
) -> TrialSummary:
    """
    Implication check on unconstrained dynamics.

    A trial fails only if its global drift stayed within ``tol_global`` at
    every half-slice while a local drift exceeded ``tol_local``. Trials that
    broke global conservation pass vacuously; ``extras['n_conditioned']``
    counts the ones that did not.
    """
    _check_dims(n_labels, q_dim, n_trials)
    seed = check_seed(seed)
    failures = []
    conditioned = 0
    for k in range(n_trials):
        r = unconstrained_trial(k, n_labels, q_dim, n_slices, seed, tol_global, tol_local)
        if r.verdict is Verdict.VIOLATED:
            continue
        conditioned += 1
        if r.verdict is Verdict.MOVED:
            failures.append((k, r))
    return TrialSummary(
        n_trials, n_trials - len(failures), len(failures), seed, failures,
        {"theorem": 2, "mode": "unconstrained", "n_slices": n_slices, "n_conditioned": conditioned},
    )


# --- quantum-quantum exchange ----------------------------------------------

EXCHANGE_H = np.kron(linalg.SIGMA_PLUS, linalg.SIGMA_MINUS) + np.kron(linalg.SIGMA_MINUS, linalg.SIGMA_PLUS)
SZ_1 = np.kron(linalg.PAULI_Z, linalg.IDENTITY2)
SZ_2 = np.kron(linalg.IDENTITY2, linalg.PAULI_Z)


def exchange_records(times) -> list[tuple[float, float, float]]:
    """``(<sz x I>, <I x sz>, sum)`` under the flip-flop Hamiltonian from |up, down>."""
    psi0 = np.zeros(4, dtype=complex)
    psi0[1] = 1.0  # |0> (x) |1> = |up, down>
    w, v = np.linalg.eigh(EXCHANGE_H)
    out = []
    for t in times:
        psi = v @ (np.exp(-1j * w * t) * (v.conj().T @ psi0))
        a = float(np.vdot(psi, SZ_1 @ psi).real)
        b = float(np.vdot(psi, SZ_2 @ psi).real)
        out.append((a, b, a + b))
    return out


def quantum_exchange_counterexample(t: float = np.pi / 2, n_points: int = 50, tol_global: float = TOL_GLOBAL, tol_local: float = TOL_LOCAL) -> ConservationReport:
    """
    Two qubits exchanging ``sz`` through ``s+ s- + s- s+``.

    The total ``sz x I + I x sz`` commutes with the Hamiltonian while each
    local term does not, so ``<sz x I>`` goes from +1 to ``cos(2t)``.
    Records ``n_points`` samples evenly spaced on ``[0, t]``.
    """
    times = np.linspace(0.0, float(t), n_points)
    report = audit_records(exchange_records(times), tol_global, tol_local)
    final = report.slices[-1]
    report.extras = {
        "t": float(t),
        "times": times.tolist(),
        "final_sz1": final[1],
        "final_sz2": final[2],
        "local_moved": bool(max(report.local_c_drift, report.local_q_drift) > tol_local),
        "global_conserved": bool(report.global_drift <= tol_global),
    }
    return report
