"""
Hybrid quantum-classical dynamics laboratory.

Simulates hybrid states under the Hamiltonian formalism and the operational
V/Lambda decomposition, audits conservation of additive quantities, and
runs the mediated-exchange, interferometry and free-fall scenarios.
"""

from .classical import ClassicalDistribution, ClassicalObservable, StochasticMap
from .dynamics import DecomposedStep, HybridHamiltonian, evolve_hamiltonian, run_trajectory
from .hybrid import HybridBranch, HybridState, hybrid_expectation, product_state
from .nogo import (
    ConservationReport,
    TrialSummary,
    Verdict,
    audit_conservation,
    quantum_exchange_counterexample,
    verify_theorem1,
    verify_theorem1_trials,
    verify_theorem2_trials,
)
from .quantum import DensityMatrix, KrausChannel, QuantumObservable

__version__ = "0.1.0"

__all__ = [
    "ClassicalDistribution",
    "ClassicalObservable",
    "ConservationReport",
    "DecomposedStep",
    "DensityMatrix",
    "HybridBranch",
    "HybridHamiltonian",
    "HybridState",
    "KrausChannel",
    "QuantumObservable",
    "StochasticMap",
    "TrialSummary",
    "Verdict",
    "audit_conservation",
    "evolve_hamiltonian",
    "hybrid_expectation",
    "product_state",
    "quantum_exchange_counterexample",
    "run_trajectory",
    "verify_theorem1",
    "verify_theorem1_trials",
    "verify_theorem2_trials",
]
