"""
Dense complex matrix kernel.

Every operator in the package is a plain 2-D ``numpy`` array of dtype
``complex128``. Constructors here return read-only copies so values can be
shared freely. Tolerances use the max-abs-entry norm throughout.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import CapacityError, DomainError, InvariantError, ShapeError

DIM_CAP = 4096
HERMITIAN_TOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
# sigma_+ raises |1> (down) to |0> (up); sigma_z |0> = +|0>
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()

for _m in (PAULI_X, PAULI_Y, PAULI_Z, IDENTITY2, SIGMA_PLUS, SIGMA_MINUS):
    _m.flags.writeable = False


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Validate ``a`` as a finite complex matrix and return a read-only copy."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvariantError("matrix has non-finite entries")
    return _frozen(m)


def max_abs(a) -> float:
    """Max-abs-entry norm."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """
    Validate Hermiticity and return the exactly symmetrized form.

    Raises
    ------
    InvariantError
        If ``max|M - M^dagger| > tol``.
    """
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ShapeError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvariantError("matrix has non-finite entries")
    dev = max_abs(m - m.conj().T)
    if dev > tol:
        raise InvariantError(f"matrix is not Hermitian (deviation {dev:.3e})")
    return _frozen((m + m.conj().T) / 2)


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and max_abs(a - a.conj().T) <= tol


def unitary_from_generator(h, t: float) -> np.ndarray:
    """
    Return ``exp(-i h t)`` for a Hermitian generator ``h`` (hbar = 1).

    The exponential is taken through the spectral decomposition of ``h``, so
    the result is unitary to eigensolver precision for any finite ``t``.

    Examples
    --------
    >>> u = unitary_from_generator(PAULI_Z, np.pi)
    >>> bool(np.allclose(u, -np.eye(2)))
    True
    """
    h = hermitian(h)
    if not np.isfinite(t):
        raise DomainError("evolution time must be finite")
    if t == 0:
        return _frozen(np.eye(h.shape[0], dtype=complex))
    w, v = np.linalg.eigh(h)
    return _frozen((v * np.exp(-1j * w * t)) @ v.conj().T)


def tensor_product(a, b, cap: int = DIM_CAP) -> np.ndarray:
    """Kronecker product with row index ``i*rB + k`` and column index ``j*cB + l``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError("tensor_product expects 2-D operands")
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > cap:
        raise CapacityError(f"tensor product dimension {max(rows, cols)} exceeds cap {cap}")
    return _frozen(np.kron(a, b))


def kron_all(*ops, cap: int = DIM_CAP) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = tensor_product(out, op, cap=cap)
    return out


def partial_trace(m, dims: Sequence[int], keep: int) -> np.ndarray:
    """
    Reduce ``m`` on a multipartite space to the operator on subsystem ``keep``.

    Parameters
    ----------
    m : array_like
        Square operator on ``prod(dims)`` dimensions.
    dims : sequence of int
        Subsystem dimensions in tensor-product order.
    keep : int
        Index of the subsystem to keep.
    """
    m = np.asarray(m, dtype=complex)
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims):
        raise ShapeError("subsystem dimensions must be positive")
    n = int(np.prod(dims))
    if m.ndim != 2 or m.shape != (n, n):
        raise ShapeError(f"matrix shape {m.shape} does not match dims {dims}")
    if not 0 <= keep < len(dims):
        raise ShapeError(f"keep={keep} out of range for {len(dims)} subsystems")
    k = len(dims)
    t = m.reshape(dims + dims)
    row = list(range(k))
    col = [k + i for i in range(k)]
    for i in range(k):
        if i != keep:
            col[i] = row[i]
    out = np.einsum(t, row + col, [row[keep], col[keep]])
    return _frozen(np.ascontiguousarray(out))


def commutator(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def commutator_norm(a, b) -> float:
    """``max|AB - BA|``."""
    return max_abs(commutator(a, b))


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return max_abs(u.conj().T @ u - np.eye(u.shape[0])) <= tol
