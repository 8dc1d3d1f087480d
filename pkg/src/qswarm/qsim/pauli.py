"""
Signed Pauli-product observables.

An observable is a product of single-qubit Paulis placed on designated qubits,
times a phase. Products of observables keep track of the phase exactly, so
identities such as "the three operators of a magic-square row multiply to +I"
can be checked without floating point.
"""

from dataclasses import dataclass
from functools import reduce
from typing import Dict, Tuple

import numpy as np

from ..errors import StateError
from .statevector import StateVector, apply_single_qubit, check_qubit, choose_outcome

PAULI_MATRICES: Dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_ALLOWED_PHASES = (1, -1, 1j, -1j)


def _build_product_table() -> Dict[Tuple[str, str], Tuple[complex, str]]:
    table: Dict[Tuple[str, str], Tuple[complex, str]] = {}
    for p in "IXYZ":
        table[("I", p)] = (1, p)
        table[(p, "I")] = (1, p)
        table[(p, p)] = (1, "I")
    # cyclic X -> Y -> Z
    for a, b, c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
        table[(a, b)] = (1j, c)
        table[(b, a)] = (-1j, c)
    return table


_PRODUCT_TABLE = _build_product_table()


@dataclass(frozen=True)
class SignedPauliObservable:
    """
    Phase times a tensor product of Paulis on the given qubits.

    Only phases +1 and -1 give a Hermitian, involutory observable; the
    imaginary phases appear as intermediate products.
    """

    factors: str
    qubits: Tuple[int, ...] = (0, 1)
    sign: complex = 1

    def __post_init__(self) -> None:
        if not self.factors or any(f not in PAULI_MATRICES for f in self.factors):
            raise StateError(f"Pauli factors must be over 'IXYZ', got {self.factors!r}")
        qubits = tuple(int(q) for q in self.qubits)
        if len(qubits) != len(self.factors):
            raise StateError(
                f"{len(self.factors)} factors need as many qubits, got {len(qubits)}"
            )
        if len(set(qubits)) != len(qubits):
            raise StateError(f"Qubit indices must be distinct, got {qubits}")
        sign = complex(self.sign)
        if sign not in _ALLOWED_PHASES:
            raise StateError(f"Phase must be one of +1, -1, +i, -i, got {self.sign}")
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "sign", sign)

    @classmethod
    def parse(cls, label: str, qubits: Tuple[int, ...] = (0, 1)) -> "SignedPauliObservable":
        """
        Build an observable from a label such as 'ZZ', '+XI' or '-XZ'.

        Args:
            label: Optional sign followed by one Pauli letter per qubit
            qubits: Qubits the letters act on

        Returns:
            The observable
        """
        sign = 1
        body = label.strip()
        if body and body[0] in "+-":
            sign = -1 if body[0] == "-" else 1
            body = body[1:]
        return cls(factors=body.upper(), qubits=tuple(qubits), sign=sign)

    @property
    def label(self) -> str:
        prefix = {1: "+", -1: "-", 1j: "+i", -1j: "-i"}[self.sign]
        return f"{prefix}{self.factors}"

    def on(self, qubits: Tuple[int, ...]) -> "SignedPauliObservable":
        """Same operator placed on other qubits."""
        return SignedPauliObservable(self.factors, tuple(qubits), self.sign)

    def is_hermitian(self) -> bool:
        return self.sign in (1, -1)

    def is_identity(self) -> bool:
        return set(self.factors) == {"I"}

    def matrix(self) -> np.ndarray:
        """Dense matrix over the observable's own qubits, first qubit most significant."""
        dense = reduce(np.kron, (PAULI_MATRICES[f] for f in self.factors))
        return self.sign * dense

    def commutes_with(self, other: "SignedPauliObservable") -> bool:
        """Pauli products commute iff they anticommute on an even number of qubits."""
        self._check_aligned(other)
        clashes = sum(
            1 for a, b in zip(self.factors, other.factors) if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 0

    def __matmul__(self, other: "SignedPauliObservable") -> "SignedPauliObservable":
        self._check_aligned(other)
        phase = self.sign * other.sign
        factors = []
        for a, b in zip(self.factors, other.factors):
            step_phase, c = _PRODUCT_TABLE[(a, b)]
            phase *= step_phase
            factors.append(c)
        return SignedPauliObservable("".join(factors), self.qubits, phase)

    def _check_aligned(self, other: "SignedPauliObservable") -> None:
        if self.qubits != other.qubits:
            raise StateError(
                f"Observables act on different qubits: {self.qubits} vs {other.qubits}"
            )

    def apply(self, state: StateVector) -> np.ndarray:
        """Raw amplitudes of O|psi>."""
        for qubit in self.qubits:
            check_qubit(state, qubit)
        amplitudes = state.amplitudes
        for factor, qubit in zip(self.factors, self.qubits):
            if factor != "I":
                amplitudes = apply_single_qubit(
                    amplitudes, PAULI_MATRICES[factor], qubit, state.n_qubits
                )
        return self.sign * amplitudes


def measure_observable(
    state: StateVector, obs: SignedPauliObservable, randomness: float
) -> Tuple[int, StateVector]:
    """
    Projective measurement of a +-1 valued Pauli observable.

    Projects with P(+-) = (I +- O)/2 following the Born rule.

    Args:
        state: State to measure
        obs: Observable; must be Hermitian (phase +-1)
        randomness: Uniform real in [0, 1)

    Returns:
        Tuple of (eigenvalue +1 or -1, collapsed state)

    Raises:
        StateError: If the observable does not square to the identity or acts
            outside the state
    """
    if not obs.is_hermitian():
        raise StateError(f"Observable {obs.label} is not involutory (phase {obs.sign})")
    o_psi = obs.apply(state)
    plus = (state.amplitudes + o_psi) / 2
    p_plus = float(np.vdot(plus, plus).real)
    outcome = choose_outcome(p_plus, randomness)
    if outcome == 0:
        eigenvalue, projected = 1, plus
    else:
        eigenvalue, projected = -1, (state.amplitudes - o_psi) / 2
    projected = projected / np.linalg.norm(projected)
    return eigenvalue, StateVector(projected)
