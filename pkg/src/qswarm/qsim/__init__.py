"""Statevector engine, Pauli observables and shared entangled resources."""

from .pauli import PAULI_MATRICES, SignedPauliObservable, measure_observable
from .resource import EntangledResource
from .statevector import (
    MAX_QUBITS,
    NORM_TOLERANCE,
    Basis,
    Bell,
    StateSpec,
    StateVector,
    apply_hadamard_all,
    enumerate_outcomes,
    force_outcome,
    make_state,
    measure_qubit,
    outcome_probability,
    tensor_product,
)

__all__ = [
    "MAX_QUBITS",
    "NORM_TOLERANCE",
    "PAULI_MATRICES",
    "Basis",
    "Bell",
    "EntangledResource",
    "SignedPauliObservable",
    "StateSpec",
    "StateVector",
    "apply_hadamard_all",
    "enumerate_outcomes",
    "force_outcome",
    "make_state",
    "measure_observable",
    "measure_qubit",
    "outcome_probability",
    "tensor_product",
]
