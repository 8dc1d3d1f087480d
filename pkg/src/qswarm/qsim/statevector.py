"""
Minimal multi-qubit statevector engine.

Qubit 0 is the leftmost (most significant) position of the computational
basis label, so |01> has amplitude index 1 and GHZ(3) lives on indices 0 and 7.
Outcome bits: |0> -> 0, |1> -> 1, |+> -> 0, |-> -> 1.
"""

from dataclasses import dataclass
from enum import Enum
from math import sqrt
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import StateError

MAX_QUBITS = 8
NORM_TOLERANCE = 1e-12
# Born probabilities this close to 0 or 1 are treated as certain.
CERTAINTY_TOLERANCE = 1e-12

_SQRT2_INV = 1 / sqrt(2)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV


class Basis(Enum):
    """Single-qubit measurement basis."""

    Z = "Z"
    X = "X"


class Bell(Enum):
    """The four Bell states."""

    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"


_BELL_AMPLITUDES = {
    Bell.PHI_PLUS: (1, 0, 0, 1),
    Bell.PHI_MINUS: (1, 0, 0, -1),
    Bell.PSI_PLUS: (0, 1, 1, 0),
    Bell.PSI_MINUS: (0, 1, -1, 0),
}


@dataclass(frozen=True)
class StateSpec:
    """
    Description of a state a source can prepare.

    Use the constructors ``bell``, ``ghz`` and ``product`` rather than
    building instances directly.
    """

    kind: str
    bell_state: Optional[Bell] = None
    n_qubits: int = 2
    bits: str = ""
    basis: Basis = Basis.Z

    @classmethod
    def bell(cls, which: Bell = Bell.PHI_PLUS) -> "StateSpec":
        return cls(kind="bell", bell_state=which, n_qubits=2)

    @classmethod
    def ghz(cls, n_qubits: int, basis: Basis = Basis.Z) -> "StateSpec":
        """GHZ state; in the X basis it is (|+..+> + |-..->)/sqrt2."""
        return cls(kind="ghz", n_qubits=n_qubits, basis=basis)

    @classmethod
    def product(cls, bits: str) -> "StateSpec":
        return cls(kind="product", n_qubits=len(bits), bits=bits)


class StateVector:
    """
    Normalized complex amplitude array over ``n_qubits`` qubits.
    """

    __slots__ = ("amplitudes", "n_qubits")

    def __init__(self, amplitudes: Sequence[complex]):
        """
        Wrap an amplitude array.

        Args:
            amplitudes: 2**n complex amplitudes, normalized

        Raises:
            StateError: If the length is not a power of two, exceeds the
                qubit limit, or the vector is not normalized
        """
        array = np.array(amplitudes, dtype=complex).reshape(-1)
        size = array.shape[0]
        n_qubits = size.bit_length() - 1
        if size < 2 or 2**n_qubits != size:
            raise StateError(f"Amplitude count must be a power of two >= 2, got {size}")
        if n_qubits > MAX_QUBITS:
            raise StateError(f"At most {MAX_QUBITS} qubits are supported, got {n_qubits}")
        self.amplitudes = array
        self.n_qubits = n_qubits
        if self.norm_drift() > NORM_TOLERANCE:
            raise StateError(f"State is not normalized (norm drift {self.norm_drift():.3e})")

    def norm_drift(self) -> float:
        """Absolute deviation of the squared norm from 1."""
        return float(abs(np.vdot(self.amplitudes, self.amplitudes).real - 1.0))

    def isclose(self, other: "StateVector", atol: float = 1e-12) -> bool:
        return self.n_qubits == other.n_qubits and bool(
            np.allclose(self.amplitudes, other.amplitudes, atol=atol)
        )

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits}, amplitudes={self.amplitudes!r})"


def make_state(spec: StateSpec) -> StateVector:
    """
    Build the textbook state described by a spec.

    Args:
        spec: State description

    Returns:
        The prepared state

    Raises:
        StateError: For unknown kinds, bad bitstrings or too few GHZ qubits
    """
    if spec.kind == "bell":
        if spec.bell_state is None:
            raise StateError("Bell spec needs a Bell state")
        amplitudes = np.array(_BELL_AMPLITUDES[spec.bell_state], dtype=complex) * _SQRT2_INV
        return StateVector(amplitudes)

    if spec.kind == "ghz":
        n = spec.n_qubits
        if n < 2:
            raise StateError(f"GHZ state needs at least 2 qubits, got {n}")
        if n > MAX_QUBITS:
            raise StateError(f"At most {MAX_QUBITS} qubits are supported, got {n}")
        amplitudes = np.zeros(2**n, dtype=complex)
        amplitudes[0] = amplitudes[-1] = _SQRT2_INV
        state = StateVector(amplitudes)
        if spec.basis is Basis.X:
            state = apply_hadamard_all(state)
        return state

    if spec.kind == "product":
        bits = spec.bits
        if not bits or any(ch not in "01" for ch in bits):
            raise StateError(f"Product state bitstring must be non-empty over '01', got {bits!r}")
        if len(bits) > MAX_QUBITS:
            raise StateError(f"At most {MAX_QUBITS} qubits are supported, got {len(bits)}")
        amplitudes = np.zeros(2 ** len(bits), dtype=complex)
        amplitudes[int(bits, 2)] = 1.0
        return StateVector(amplitudes)

    raise StateError(f"Unknown state kind: {spec.kind}")


def apply_single_qubit(
    amplitudes: np.ndarray, matrix: np.ndarray, qubit: int, n: int
) -> np.ndarray:
    """
    Apply a 2x2 operator to one qubit of a raw amplitude array.

    Args:
        amplitudes: Flat amplitude array of length 2**n
        matrix: 2x2 operator
        qubit: Target qubit index
        n: Number of qubits

    Returns:
        New flat amplitude array
    """
    psi = amplitudes.reshape([2] * n)
    psi = np.moveaxis(psi, qubit, 0)
    psi = np.tensordot(matrix, psi, axes=([1], [0]))
    return np.moveaxis(psi, 0, qubit).reshape(-1)


def apply_hadamard_all(state: StateVector) -> StateVector:
    """Apply a Hadamard to every qubit."""
    amplitudes = state.amplitudes
    for qubit in range(state.n_qubits):
        amplitudes = apply_single_qubit(amplitudes, HADAMARD, qubit, state.n_qubits)
    return StateVector(amplitudes)


def check_qubit(state: StateVector, qubit: int) -> None:
    if not isinstance(qubit, (int, np.integer)) or not 0 <= qubit < state.n_qubits:
        raise StateError(f"Qubit index {qubit} out of range for {state.n_qubits}-qubit state")


def _rotated(state: StateVector, qubit: int, basis: Basis) -> np.ndarray:
    """Amplitudes with the target qubit rotated so that `basis` becomes Z."""
    if basis is Basis.X:
        return apply_single_qubit(state.amplitudes, HADAMARD, qubit, state.n_qubits)
    return state.amplitudes.copy()


def _probability_of(amplitudes: np.ndarray, qubit: int, n: int, outcome: int) -> float:
    psi = amplitudes.reshape([2] * n)
    index = [slice(None)] * n
    index[qubit] = outcome
    return float(np.sum(np.abs(psi[tuple(index)]) ** 2))


def choose_outcome(p_zero: float, randomness: float) -> int:
    """
    Sample a bit given the probability of 0 and a uniform draw.

    Args:
        p_zero: Probability of outcome 0
        randomness: Uniform real in [0, 1)

    Returns:
        0 or 1
    """
    if not 0.0 <= randomness < 1.0:
        raise StateError(f"Randomness must lie in [0, 1), got {randomness}")
    if p_zero >= 1.0 - CERTAINTY_TOLERANCE:
        return 0
    if p_zero <= CERTAINTY_TOLERANCE:
        return 1
    return 0 if randomness < p_zero else 1


def outcome_probability(state: StateVector, qubit: int, basis: Basis, outcome: int) -> float:
    """
    Exact Born probability of an outcome, without collapsing the state.

    Args:
        state: State to inspect
        qubit: Qubit index
        basis: Measurement basis
        outcome: Outcome bit

    Returns:
        Probability in [0, 1]
    """
    check_qubit(state, qubit)
    if outcome not in (0, 1):
        raise StateError(f"Outcome must be 0 or 1, got {outcome}")
    return _probability_of(_rotated(state, qubit, basis), qubit, state.n_qubits, outcome)


def measure_qubit(
    state: StateVector, qubit: int, basis: Basis, randomness: float
) -> Tuple[int, StateVector]:
    """
    Projectively measure one qubit in the Z or X basis.

    X measurements conjugate the target with a Hadamard and project in Z.

    Args:
        state: State to measure
        qubit: Qubit index
        basis: Measurement basis
        randomness: Uniform real in [0, 1) deciding the outcome

    Returns:
        Tuple of (outcome bit, collapsed and renormalized state)
    """
    check_qubit(state, qubit)
    n = state.n_qubits
    amplitudes = _rotated(state, qubit, basis)
    outcome = choose_outcome(_probability_of(amplitudes, qubit, n, 0), randomness)

    psi = amplitudes.reshape([2] * n)
    index = [slice(None)] * n
    index[qubit] = 1 - outcome
    psi[tuple(index)] = 0.0
    collapsed = psi.reshape(-1)
    collapsed = collapsed / np.linalg.norm(collapsed)

    if basis is Basis.X:
        collapsed = apply_single_qubit(collapsed, HADAMARD, qubit, n)
    return outcome, StateVector(collapsed)


def tensor_product(*states: StateVector) -> StateVector:
    """Joint state of independent registers; the first state takes the lowest qubit indices."""
    amplitudes = states[0].amplitudes
    for state in states[1:]:
        amplitudes = np.kron(amplitudes, state.amplitudes)
    return StateVector(amplitudes)


def force_outcome(state: StateVector, qubit: int, basis: Basis, outcome: int) -> StateVector:
    """Collapse onto a given outcome, which must have nonzero probability."""
    randomness = 0.0 if outcome == 0 else float(np.nextafter(1.0, 0.0))
    forced, collapsed = measure_qubit(state, qubit, basis, randomness)
    if forced != outcome:
        raise StateError(f"Outcome {outcome} has zero probability on qubit {qubit}")
    return collapsed


def enumerate_outcomes(
    state: StateVector, measurements: Sequence[Tuple[int, Basis]]
) -> Dict[Tuple[int, ...], float]:
    """
    Exact joint distribution of a sequence of single-qubit measurements.

    Walks every branch of the measurement tree; branches with probability
    below the certainty tolerance are pruned.

    Args:
        state: Initial state
        measurements: (qubit, basis) pairs in measurement order

    Returns:
        Outcome tuple -> probability
    """
    results: Dict[Tuple[int, ...], float] = {}

    def branch(current: StateVector, depth: int, bits: Tuple[int, ...], weight: float) -> None:
        if depth == len(measurements):
            results[bits] = results.get(bits, 0.0) + weight
            return
        qubit, basis = measurements[depth]
        for outcome in (0, 1):
            p = outcome_probability(current, qubit, basis, outcome)
            if p < CERTAINTY_TOLERANCE:
                continue
            collapsed = force_outcome(current, qubit, basis, outcome)
            branch(collapsed, depth + 1, bits + (outcome,), weight * p)

    branch(state, 0, (), 1.0)
    return results
