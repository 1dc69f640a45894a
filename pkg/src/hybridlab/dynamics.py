"""
Evolution engines for hybrid states.

Two engines share the branch representation:

* Hamiltonian formalism. The generator ``H_C + H_Q + sum_i g_i |i><i| (x) S_i``
  is kept in conditional-block form: label ``i`` evolves the quantum sector
  with ``exp(-i(eps_i + H_Q + g_i S_i) t)`` and the label itself never moves.
* Operational decomposition. One slice is a stochastic map ``V`` on the
  classical sector followed by one quantum channel per pure label.

State-dependent dynamics enter through generator callables: a step's ``V``
or control list may be a function of the full pre-step hybrid state (not
only its classical marginal). It is evaluated once per slice.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .classical import ClassicalDistribution, ClassicalObservable, StochasticMap
from .errors import DomainError, InvariantError, ShapeError
from .hybrid import (
    HybridBranch,
    HybridState,
    canonicalize,
    hybrid_expectation,
    merge_by_label,
)
from .quantum import DensityMatrix, KrausChannel, QuantumObservable


@dataclass(frozen=True, eq=False)
class HybridHamiltonian:
    """
    Block-structured hybrid generator.

    Parameters
    ----------
    classical_energies : array_like of float
        ``eps_i`` for ``H_C = sum_i eps_i |i><i|``.
    h_q : array_like
        Local quantum Hamiltonian.
    couplings : sequence of (float, array_like)
        One ``(gamma_i, S_i)`` pair per classical label.
    """

    classical_energies: np.ndarray
    h_q: np.ndarray
    couplings: tuple

    def __post_init__(self):
        eps = np.array(self.classical_energies, dtype=float)
        if eps.ndim != 1 or eps.size == 0 or not np.all(np.isfinite(eps)):
            raise ShapeError("classical energies must be a non-empty finite vector")
        eps.flags.writeable = False
        h_q = linalg.hermitian(self.h_q)
        couplings = tuple((float(g), linalg.hermitian(s)) for g, s in self.couplings)
        if len(couplings) != eps.size:
            raise ShapeError(f"{eps.size} labels but {len(couplings)} coupling entries")
        for _, s in couplings:
            if s.shape != h_q.shape:
                raise ShapeError("every S_i must match the dimension of H_Q")
        object.__setattr__(self, "classical_energies", eps)
        object.__setattr__(self, "h_q", h_q)
        object.__setattr__(self, "couplings", couplings)

    @property
    def n_labels(self) -> int:
        return self.classical_energies.size

    @property
    def q_dim(self) -> int:
        return self.h_q.shape[0]

    def block(self, i: int) -> np.ndarray:
        """Quantum-sector generator conditioned on classical label ``i``."""
        g, s = self.couplings[i]
        return self.classical_energies[i] * np.eye(self.q_dim) + self.h_q + g * s

    @cached_property
    def _block_spectra(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [np.linalg.eigh(self.block(i)) for i in range(self.n_labels)]

    def block_matrix(self) -> np.ndarray:
        """
        Explicit ``n_labels*q_dim`` square matrix of the full generator.

        Only for commutator checks; the engines never evolve with it.
        """
        n, d = self.n_labels, self.q_dim
        eye_n = np.eye(n, dtype=complex)
        eye_d = np.eye(d, dtype=complex)
        h = linalg.tensor_product(np.diag(self.classical_energies), eye_d)
        h = h + linalg.tensor_product(eye_n, self.h_q)
        for i, (g, s) in enumerate(self.couplings):
            proj = np.zeros((n, n), dtype=complex)
            proj[i, i] = 1
            h = h + g * linalg.tensor_product(proj, s)
        return h


def conditional_unitaries(ham: HybridHamiltonian, t: float) -> list[np.ndarray]:
    """One unitary ``exp(-i(eps_i + H_Q + g_i S_i) t)`` per classical label."""
    if not np.isfinite(t):
        raise DomainError("evolution time must be finite")
    out = []
    for w, v in ham._block_spectra:
        out.append((v * np.exp(-1j * w * t)) @ v.conj().T)
    return out


def _split_by_label(chi: HybridState, channels: Sequence[Callable[[np.ndarray], np.ndarray]]):
    """Branch (q, p, rho) -> sum_j (q p_j, State_j, channel_j(rho)), merged per label."""
    n = chi.n_labels
    # conditional (unnormalized) quantum state for each label, linear in rho
    weights = np.zeros(n)
    mixed = [None] * n
    for b in chi.branches:
        for j in np.flatnonzero(b.classical.probs):
            w = b.weight * b.classical.probs[j]
            weights[j] += w
            mixed[j] = w * b.quantum.matrix if mixed[j] is None else mixed[j] + w * b.quantum.matrix
    branches = []
    for j in range(n):
        if mixed[j] is None or weights[j] == 0:
            continue
        rho = channels[j](mixed[j] / weights[j])
        branches.append(
            HybridBranch(weights[j], ClassicalDistribution.pure(n, j), DensityMatrix(rho))
        )
    return branches


def _finish(branches) -> HybridState:
    total = sum(b.weight for b in branches)
    chi = HybridState(tuple(HybridBranch(b.weight / total, b.classical, b.quantum) for b in branches))
    return canonicalize(merge_by_label(chi))


def evolve_hamiltonian(chi: HybridState, ham: HybridHamiltonian, t: float) -> HybridState:
    """
    Evolve under the Hamiltonian formalism for time ``t``.

    Each branch splits over pure labels ``j`` with weight ``q p_j`` and
    quantum state ``U_j rho U_j^dagger``. The reduced classical distribution
    is left unchanged.
    """
    if chi.n_labels != ham.n_labels or chi.q_dim != ham.q_dim:
        raise ShapeError("Hamiltonian does not match the hybrid state's shape")
    us = conditional_unitaries(ham, t)
    channels = [lambda r, u=u: u @ r @ u.conj().T for u in us]
    return _finish(_split_by_label(chi, channels))


StochasticGenerator = Callable[[HybridState], StochasticMap]
ControlGenerator = Callable[[HybridState], Sequence[KrausChannel]]


@dataclass(frozen=True)
class DecomposedStep:
    """
    One slice of the operational dynamics.

    ``v_map`` is a :class:`StochasticMap` or a callable returning one;
    ``controls`` is a sequence of :class:`KrausChannel` (one per label) or a
    callable returning such a sequence. Callables receive the pre-step state.
    """

    v_map: StochasticMap | StochasticGenerator
    controls: Sequence[KrausChannel] | ControlGenerator

    def resolve(self, chi: HybridState, index: int | None = None):
        v = self.v_map(chi) if callable(self.v_map) else self.v_map
        controls = self.controls(chi) if callable(self.controls) else self.controls
        if not isinstance(v, StochasticMap):
            raise InvariantError("V generator did not return a StochasticMap", step=index)
        controls = list(controls)
        if v.n != chi.n_labels:
            raise InvariantError(f"V acts on {v.n} labels, state has {chi.n_labels}", step=index)
        if len(controls) != chi.n_labels:
            raise InvariantError(
                f"{len(controls)} control channels for {chi.n_labels} labels", step=index
            )
        for ch in controls:
            if not isinstance(ch, KrausChannel) or ch.dim != chi.q_dim:
                raise InvariantError("control is not a Kraus channel of the quantum dimension", step=index)
        return v, controls

    @classmethod
    def from_hamiltonian(cls, ham: HybridHamiltonian, dt: float) -> DecomposedStep:
        """The Hamiltonian-formalism slice written as V = I plus unitary controls."""
        us = conditional_unitaries(ham, dt)
        return cls(StochasticMap.identity(ham.n_labels), [KrausChannel.unitary(u) for u in us])


def apply_v(chi: HybridState, v: StochasticMap) -> HybridState:
    """Odd half-slice: V acts on every branch's classical part; quantum parts untouched."""
    branches = []
    for b in chi.branches:
        q = v.matrix @ b.classical.probs
        branches.append(HybridBranch(b.weight, ClassicalDistribution(q / q.sum()), b.quantum))
    return HybridState(tuple(branches))


def apply_controls(chi: HybridState, controls: Sequence[KrausChannel]) -> HybridState:
    """Even half-slice: split over pure labels and apply the label's channel."""
    return _finish(_split_by_label(chi, [ch.apply_matrix for ch in controls]))


def half_steps(chi: HybridState, step: DecomposedStep, index: int | None = None):
    """Return the states after ``V`` and after the controls."""
    try:
        v, controls = step.resolve(chi, index)
        mid = apply_v(chi, v)
        return mid, apply_controls(mid, controls)
    except InvariantError as exc:
        if exc.step is None and index is not None:
            raise InvariantError(str(exc), step=index) from exc
        raise


def apply_step(chi: HybridState, step: DecomposedStep, index: int | None = None) -> HybridState:
    return half_steps(chi, step, index)[1]


@dataclass
class Trajectory:
    """
    Recorded evolution.

    ``times`` holds slice indices; for decomposed runs odd indices are the
    states right after ``V`` and even indices the states after the controls.
    ``t`` holds physical times for Hamiltonian runs and is None otherwise.
    """

    times: list
    states: list
    records: list
    t: list | None = None

    def __post_init__(self):
        if not (len(self.times) == len(self.states) == len(self.records)):
            raise InvariantError("trajectory fields must have equal lengths")
        if self.t is not None and len(self.t) != len(self.times):
            raise InvariantError("trajectory time column has the wrong length")

    def __len__(self) -> int:
        return len(self.times)


def run_trajectory(
    chi0: HybridState,
    steps,
    observables: tuple[ClassicalObservable, QuantumObservable],
) -> Trajectory:
    """
    Run a multi-slice evolution and record ``hybrid_expectation`` as it goes.

    ``steps`` is either a sequence of :class:`DecomposedStep` (records after
    every half-slice) or a tuple ``(HybridHamiltonian, dt, n)`` (records after
    every full step of length ``dt``).
    """
    o_c, o_q = observables
    times = [0]
    states = [chi0]
    records = [hybrid_expectation(chi0, o_c, o_q)]
    if isinstance(steps, tuple) and len(steps) == 3 and isinstance(steps[0], HybridHamiltonian):
        ham, dt, n = steps
        t = [0.0]
        chi = chi0
        us = conditional_unitaries(ham, dt)
        channels = [lambda r, u=u: u @ r @ u.conj().T for u in us]
        for k in range(1, int(n) + 1):
            chi = _finish(_split_by_label(chi, channels))
            times.append(k)
            t.append(k * dt)
            states.append(chi)
            records.append(hybrid_expectation(chi, o_c, o_q))
        return Trajectory(times, states, records, t)

    chi = chi0
    for m, step in enumerate(steps, start=1):
        mid, chi = half_steps(chi, step, index=m)
        for k, s in ((2 * m - 1, mid), (2 * m, chi)):
            times.append(k)
            states.append(s)
            records.append(hybrid_expectation(s, o_c, o_q))
    return Trajectory(times, states, records)
