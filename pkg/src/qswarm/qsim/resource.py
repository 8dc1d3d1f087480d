"""
Shared entangled resources.

Each emitted resource owns one authoritative state vector. A party refers to
its qubit by (resource, qubit index); measuring any qubit collapses the
shared state, which is how nonlocal correlation shows up for the partners.
"""

from typing import List, Tuple

import numpy as np

from .pauli import SignedPauliObservable, measure_observable
from .statevector import Basis, StateSpec, StateVector, make_state, measure_qubit


class EntangledResource:
    """
    One multi-qubit state shared between parties.
    """

    def __init__(self, resource_id: int, state: StateVector, label: str = ""):
        self.resource_id = resource_id
        self.state = state
        self.label = label
        self.history: List[Tuple[int, str, int]] = []
        self.max_norm_drift = state.norm_drift()

    @classmethod
    def prepare(cls, resource_id: int, spec: StateSpec, label: str = "") -> "EntangledResource":
        return cls(resource_id, make_state(spec), label)

    @property
    def n_qubits(self) -> int:
        return self.state.n_qubits

    def measure(self, qubit: int, basis: Basis, rng: np.random.Generator) -> int:
        """
        Measure one qubit in place.

        Args:
            qubit: Qubit index
            basis: Measurement basis
            rng: Generator supplying the uniform draw

        Returns:
            Outcome bit
        """
        outcome, self.state = measure_qubit(self.state, qubit, basis, float(rng.random()))
        self._record(qubit, basis.value, outcome)
        return outcome

    def measure_observable(self, obs: SignedPauliObservable, rng: np.random.Generator) -> int:
        """Measure a Pauli observable in place; returns +1 or -1."""
        eigenvalue, self.state = measure_observable(self.state, obs, float(rng.random()))
        self._record(obs.qubits[0], obs.label, eigenvalue)
        return eigenvalue

    def _record(self, qubit: int, basis_label: str, outcome: int) -> None:
        self.history.append((qubit, basis_label, outcome))
        self.max_norm_drift = max(self.max_norm_drift, self.state.norm_drift())
