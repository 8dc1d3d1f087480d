import numpy as np
import pytest

from qswarm.errors import StateError
from qswarm.qsim import (
    Basis,
    Bell,
    EntangledResource,
    SignedPauliObservable,
    StateSpec,
    make_state,
    measure_observable,
)


def test_parse_reads_sign_and_factors():
    obs = SignedPauliObservable.parse("-XZ")
    assert obs.factors == "XZ"
    assert obs.sign == -1
    assert obs.label == "-XZ"
    assert SignedPauliObservable.parse("yy").label == "+YY"


@pytest.mark.parametrize("label", ["", "AB", "X"])
def test_parse_rejects_bad_labels(label):
    with pytest.raises(StateError):
        SignedPauliObservable.parse(label)


def test_single_qubit_products_track_phase():
    x = SignedPauliObservable.parse("X", qubits=(0,))
    y = SignedPauliObservable.parse("Y", qubits=(0,))
    product = x @ y
    assert product.factors == "Z"
    assert product.sign == 1j
    assert (y @ x).sign == -1j


def test_symbolic_product_matches_dense_matrices():
    a = SignedPauliObservable.parse("XZ")
    b = SignedPauliObservable.parse("-ZX")
    assert np.allclose((a @ b).matrix(), a.matrix() @ b.matrix())


def test_commutation_counts_anticommuting_positions():
    xx = SignedPauliObservable.parse("XX")
    zz = SignedPauliObservable.parse("ZZ")
    xi = SignedPauliObservable.parse("XI")
    assert xx.commutes_with(zz)
    assert not xi.commutes_with(zz)


def test_products_need_the_same_qubits():
    with pytest.raises(StateError):
        SignedPauliObservable.parse("XX") @ SignedPauliObservable.parse("XX", qubits=(1, 2))


def test_measurement_rejects_non_hermitian_phase():
    obs = SignedPauliObservable("XX", (0, 1), 1j)
    with pytest.raises(StateError):
        measure_observable(make_state(StateSpec.bell()), obs, 0.5)


@pytest.mark.parametrize("label,value", [("ZZ", 1), ("XX", 1), ("YY", -1)])
def test_phi_plus_is_a_pauli_eigenstate(label, value):
    state = make_state(StateSpec.bell(Bell.PHI_PLUS))
    eigenvalue, collapsed = measure_observable(state, SignedPauliObservable.parse(label), 0.3)
    assert eigenvalue == value
    assert collapsed.isclose(state)


def test_resource_collapse_is_shared_between_holders(rng):
    for _ in range(50):
        resource = EntangledResource.prepare(0, StateSpec.ghz(3))
        outcomes = {resource.measure(q, Basis.Z, rng) for q in range(3)}
        assert len(outcomes) == 1
        assert len(resource.history) == 3
        assert resource.max_norm_drift <= 1e-12


def test_resource_observable_measurement_is_recorded(rng):
    resource = EntangledResource.prepare(0, StateSpec.bell())
    assert resource.measure_observable(SignedPauliObservable.parse("ZZ"), rng) == 1
    assert resource.history == [(0, "+ZZ", 1)]
