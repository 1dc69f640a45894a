"""
Three distinguishable particles S, E, M on an L-site ring.

E mediates between S and M: the Hamiltonian has hopping for each particle
plus density-density couplings S-E and E-M at a fixed site offset, summed
over all sites so the total translation ``T (x) T (x) T`` is a symmetry.
Terms are kept as a list tagged with the particles they act on; the
locality gate inspects that list and refuses any S-M term.

Quasimomentum of a single particle is ``sum_m k_m |k_m><k_m|`` with
``k_m = 2 pi m / L`` and ``m`` in the first Brillouin zone
``-floor(L/2) .. ceil(L/2) - 1``. Additive momentum is conserved only modulo
``2 pi``; mirror-symmetric setups (S and M placed symmetrically about E,
equal hopping and couplings) keep ``<P_S> = -<P_M>`` and ``<P_E> = 0``, so
the additive total stays put.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import linalg
from .errors import CapacityError, DomainError, LocalityError

PARTICLES = ("S", "E", "M")


@dataclass(frozen=True)
class RingLatticeModel:
    n_sites: int = 5
    hop_S: float = 1.0
    hop_E: float = 1.0
    hop_M: float = 1.0
    g_SE: float = 0.3
    g_EM: float = 0.3
    offset: int = 1
    g_SM: float = 0.0
    centers: tuple = (0, 2, 4)
    width: float = 0.8

    def __post_init__(self):
        if self.n_sites < 1:
            raise DomainError("n_sites must be positive")
        if self.n_sites**3 > linalg.DIM_CAP:
            raise CapacityError(f"L^3 = {self.n_sites**3} exceeds the dimension cap {linalg.DIM_CAP}")
        if len(self.centers) != 3:
            raise DomainError("centers needs one packet position per particle (S, E, M)")
        if self.width <= 0:
            raise DomainError("packet width must be positive")
        object.__setattr__(self, "centers", tuple(float(c) for c in self.centers))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["centers"] = list(self.centers)
        return d


@dataclass(frozen=True)
class Term:
    """Hamiltonian term ``op`` acting on ``particles`` (in S, E, M order)."""

    name: str
    particles: tuple
    op: np.ndarray


def zone_indices(n_sites: int) -> np.ndarray:
    return np.arange(-(n_sites // 2), n_sites - n_sites // 2)


def fourier_matrix(n_sites: int) -> np.ndarray:
    """Columns are plane waves ``e^{i k_m x} / sqrt(L)`` ordered by zone index."""
    x = np.arange(n_sites)
    k = 2 * np.pi * zone_indices(n_sites) / n_sites
    return np.exp(1j * np.outer(x, k)) / np.sqrt(n_sites)


def quasimomentum(n_sites: int) -> np.ndarray:
    f = fourier_matrix(n_sites)
    k = 2 * np.pi * zone_indices(n_sites) / n_sites
    p = (f * k) @ f.conj().T
    return (p + p.conj().T) / 2


def translation(n_sites: int) -> np.ndarray:
    """One-site shift ``|x> -> |x+1 mod L>``."""
    return np.roll(np.eye(n_sites, dtype=complex), 1, axis=0)


def hopping(n_sites: int, amplitude: float) -> np.ndarray:
    """Nearest-neighbour ring hopping ``-J sum_x (|x+1><x| + h.c.)``."""
    t = translation(n_sites)
    if n_sites == 1:
        return np.zeros((1, 1), dtype=complex)
    if n_sites == 2:
        return -amplitude * (t + t.T) / 2
    return -amplitude * (t + t.T)


def density_coupling(n_sites: int, strength: float, offset: int) -> np.ndarray:
    """``g sum_a n_A(a) n_B(a + offset)`` on the two-particle space A (x) B."""
    diag = np.zeros((n_sites, n_sites))
    a = np.arange(n_sites)
    diag[a, (a + offset) % n_sites] = strength
    return np.diag(diag.ravel()).astype(complex)


def potential(n_sites: int, center: float) -> np.ndarray:
    """Single-particle cosine well ``-cos(2 pi (x - c) / L)``."""
    x = np.arange(n_sites)
    return np.diag(-np.cos(2 * np.pi * (x - center) / n_sites)).astype(complex)


def wavepacket(n_sites: int, center: float, width: float) -> np.ndarray:
    """Real Gaussian on the ring (zero mean momentum), unit norm."""
    x = np.arange(n_sites)
    dist = (x - center + n_sites / 2) % n_sites - n_sites / 2
    v = np.exp(-(dist**2) / (2 * width**2)).astype(complex)
    return v / np.linalg.norm(v)


def hamiltonian_terms(model: RingLatticeModel) -> list[Term]:
    L = model.n_sites
    terms = [
        Term("hop_S", ("S",), hopping(L, model.hop_S)),
        Term("hop_E", ("E",), hopping(L, model.hop_E)),
        Term("hop_M", ("M",), hopping(L, model.hop_M)),
        Term("SE", ("S", "E"), density_coupling(L, model.g_SE, model.offset)),
        Term("EM", ("E", "M"), density_coupling(L, model.g_EM, model.offset)),
    ]
    if model.g_SM != 0:
        terms.append(Term("SM", ("S", "M"), density_coupling(L, model.g_SM, model.offset)))
    return terms


def check_locality(terms: list[Term]) -> None:
    """Reject any term touching both S and M; checked on tags, not numbers."""
    for term in terms:
        if "S" in term.particles and "M" in term.particles:
            raise LocalityError(f"term {term.name!r} couples S and M directly")


def embed(term: Term, n_sites: int) -> np.ndarray:
    """Lift a term to the full S (x) E (x) M space."""
    eye = np.eye(n_sites, dtype=complex)
    p = term.particles
    if p == ("S",):
        return linalg.kron_all(term.op, eye, eye)
    if p == ("E",):
        return linalg.kron_all(eye, term.op, eye)
    if p == ("M",):
        return linalg.kron_all(eye, eye, term.op)
    if p == ("S", "E"):
        return linalg.kron_all(term.op, eye)
    if p == ("E", "M"):
        return linalg.kron_all(eye, term.op)
    if p == ("S", "M"):
        # S and M are not adjacent in the ordering: permute E to the middle
        L = n_sites
        op = term.op.reshape(L, L, L, L)  # [s, m, s', m']
        return np.einsum("abcd,eg->aebcgd", op, eye).reshape(L**3, L**3)
    raise DomainError(f"unknown particle tuple {p}")


def assemble(terms: list[Term], n_sites: int) -> np.ndarray:
    h = sum(embed(t, n_sites) for t in terms)
    return linalg.hermitian(h)


def single_particle_ops(n_sites: int, op: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``op`` acting on S, E and M respectively."""
    eye = np.eye(n_sites, dtype=complex)
    return (
        linalg.kron_all(op, eye, eye),
        linalg.kron_all(eye, op, eye),
        linalg.kron_all(eye, eye, op),
    )
