"""
Quantum sector: density matrices, observables and Kraus channels.

The random generators take an explicit ``numpy.random.Generator`` and never
touch global state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .errors import DomainError, InvariantError, ShapeError

TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
COMPLETENESS_TOL = 1e-10
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Unit-trace positive semidefinite operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.hermitian(self.matrix)
        tr = np.trace(m)
        if abs(tr - 1) > TRACE_TOL:
            raise InvariantError(f"density matrix trace {tr.real:.15g} differs from 1")
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -POSITIVITY_TOL:
            raise InvariantError(f"density matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, vec) -> DensityMatrix:
        v = np.asarray(vec, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> DensityMatrix:
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def basis(cls, dim: int, index: int) -> DensityMatrix:
        m = np.zeros((dim, dim), dtype=complex)
        m[index, index] = 1
        return cls(m)


@dataclass(frozen=True, eq=False)
class QuantumObservable:
    matrix: np.ndarray
    name: str = "O_Q"

    def __post_init__(self):
        object.__setattr__(self, "matrix", linalg.hermitian(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Ascending eigenvalues and the matching eigenvector columns."""
        return np.linalg.eigh(self.matrix)

    @cached_property
    def eigenspaces(self) -> list[np.ndarray]:
        """Orthonormal bases of the (near-)degenerate eigenspaces."""
        w, v = self.spectrum
        return [v[:, idx] for idx in _degenerate_blocks(w)]

    def __add__(self, other: QuantumObservable) -> QuantumObservable:
        return QuantumObservable(self.matrix + other.matrix, f"{self.name}+{other.name}")


def _degenerate_blocks(sorted_values: np.ndarray, tol: float = DEGENERACY_TOL) -> list[list[int]]:
    blocks = [[0]]
    for i in range(1, len(sorted_values)):
        if sorted_values[i] - sorted_values[i - 1] <= tol:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return blocks


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """CPTP map given by Kraus operators satisfying sum K^dagger K = I."""

    kraus_ops: tuple

    def __post_init__(self):
        ops = [linalg.as_matrix(k, square=True) for k in self.kraus_ops]
        if not ops:
            raise InvariantError("a Kraus channel needs at least one operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise ShapeError("Kraus operators must share one square dimension")
        stack = np.stack(ops)
        dev = linalg.max_abs(np.einsum("kji,kjl->il", stack.conj(), stack) - np.eye(d))
        if dev > COMPLETENESS_TOL:
            raise InvariantError(f"Kraus completeness violated by {dev:.3e}")
        stack.flags.writeable = False
        object.__setattr__(self, "kraus_ops", tuple(ops))
        object.__setattr__(self, "_stack", stack)

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    @classmethod
    def identity(cls, dim: int) -> KrausChannel:
        return cls((np.eye(dim, dtype=complex),))

    @classmethod
    def unitary(cls, u) -> KrausChannel:
        return cls((u,))

    def apply_matrix(self, rho: np.ndarray) -> np.ndarray:
        """Kraus sum on a raw matrix; no validation of the output."""
        k = self._stack
        out = np.einsum("kij,jl,kml->im", k, rho, k.conj())
        return (out + out.conj().T) / 2

    def dual(self, op: np.ndarray) -> np.ndarray:
        """Heisenberg-picture action sum K^dagger O K."""
        k = self._stack
        return np.einsum("kji,jl,klm->im", k.conj(), op, k)


def expectation(rho: DensityMatrix, obs: QuantumObservable) -> float:
    """
    Return ``Re Tr(rho O)``.

    Raises
    ------
    ShapeError
        On dimension mismatch.
    InvariantError
        If the imaginary part exceeds 1e-12.
    """
    if rho.dim != obs.dim:
        raise ShapeError(f"state dimension {rho.dim} != observable dimension {obs.dim}")
    # Tr(AB) = sum_ij A_ij B_ji
    val = np.sum(rho.matrix * obs.matrix.T)
    if abs(val.imag) > 1e-12:
        raise InvariantError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def apply_channel(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    if ch.dim != rho.dim:
        raise ShapeError(f"channel dimension {ch.dim} != state dimension {rho.dim}")
    return DensityMatrix(ch.apply_matrix(rho.matrix))


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitaries(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    ``count`` independent Haar unitaries stacked along axis 0.

    QR of Ginibre matrices with the phases of ``diag(R)`` divided out; in
    dimension one this reduces to a uniform random phase.
    """
    if dim == 1:
        return np.exp(2j * np.pi * rng.random((count, 1, 1)))
    g = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Single Haar-distributed unitary."""
    return random_unitaries(dim, 1, rng)[0]


def random_density_matrix(dim: int, rng: np.random.Generator) -> DensityMatrix:
    """Hilbert-Schmidt random state ``G G^dagger / Tr``; full rank almost surely."""
    if dim < 1:
        raise DomainError("dimension must be at least 1")
    g = _ginibre(rng, dim, dim)
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_kraus_channel(dim: int, n_ops: int, rng: np.random.Generator) -> KrausChannel:
    """Random CPTP map from a random isometry ``dim -> dim*n_ops`` cut into blocks."""
    if dim < 1 or n_ops < 1:
        raise DomainError("dim and n_ops must be at least 1")
    q, r = np.linalg.qr(_ginibre(rng, dim * n_ops, dim))
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return KrausChannel(tuple(q[k * dim:(k + 1) * dim, :] for k in range(n_ops)))


def conserving_channel(
    obs: QuantumObservable,
    rng: np.random.Generator,
    n_unitaries: int | None = None,
) -> KrausChannel:
    """
    Random channel whose dual fixes ``obs``: Tr(L(rho) O) = Tr(rho O) for all rho.

    The channel is a convex mixture of unitaries that are block diagonal in
    the eigenbasis of ``obs``; each block is Haar random on one degenerate
    eigenspace.
    """
    return conserving_channels(obs, rng, 1, None if n_unitaries is None else [n_unitaries])[0]


def conserving_channels(
    obs: QuantumObservable,
    rng: np.random.Generator,
    count: int,
    n_unitaries=None,
) -> list[KrausChannel]:
    """
    ``count`` independent draws of :func:`conserving_channel`.

    All Haar blocks for one eigenspace are drawn in a single batch.
    ``n_unitaries`` gives the mixture size per channel (default: 1 to 3 at
    random).
    """
    if n_unitaries is None:
        n_unitaries = rng.integers(1, 4, count)
    sizes = [int(k) for k in n_unitaries]
    weights = [rng.dirichlet(np.ones(k)) for k in sizes]
    total = sum(sizes)
    us = np.zeros((total, obs.dim, obs.dim), dtype=complex)
    for basis in obs.eigenspaces:
        blocks = random_unitaries(basis.shape[1], total, rng)
        us += basis @ blocks @ basis.conj().T
    out = []
    start = 0
    for k, w in zip(sizes, weights):
        out.append(KrausChannel(tuple(np.sqrt(w)[:, None, None] * us[start:start + k])))
        start += k
    return out


def dephasing_channel(dim: int) -> KrausChannel:
    """Full dephasing in the computational basis."""
    ops = []
    for i in range(dim):
        p = np.zeros((dim, dim), dtype=complex)
        p[i, i] = 1
        ops.append(p)
    return KrausChannel(tuple(ops))
