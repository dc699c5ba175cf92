import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from entanglement_lab.exceptions import (
    DimMismatch,
    MissingStructure,
    NonHermitian,
    NotDichotomous,
    NotNormalized,
    ZeroVector,
)
from entanglement_lab.hilbert import (
    BellScenario,
    HermitianOperator,
    StateVector,
    basis_state,
    commutator,
    expectation,
    identity,
    normalize,
    operator_norm,
    partial_trace_factor,
    pauli,
    random_dichotomous,
    random_hermitian,
    singlet,
    spectral_norm,
    tensor,
    verify_local_structure,
)

DIM = 4
ELEMENTS = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)


def test_normalize_scales_to_unit_norm():
    psi = normalize([3, 4j])
    assert np.allclose(psi.amplitudes, [0.6, 0.8j])
    assert psi.dim == 2
    assert np.allclose(psi.probabilities(), [0.36, 0.64])


def test_normalize_rejects_zero_vector():
    with pytest.raises(ZeroVector):
        normalize([0, 0, 0])


def test_state_vector_requires_unit_norm():
    with pytest.raises(NotNormalized):
        StateVector(np.array([1.0, 1.0]))


def test_state_vector_is_read_only():
    psi = singlet()
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 1.0


def test_hermitian_operator_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        HermitianOperator(np.array([[0, 1], [0, 0]]))


def test_hermitian_operator_symmetrizes_roundoff():
    m = np.array([[1.0, 2.0 + 1e-13], [2.0, -1.0]])
    op = HermitianOperator(m)
    assert np.array_equal(op.entries, op.entries.conj().T)


def test_from_matrix_tolerates_boundary_roundoff():
    m = np.array([[0.0, 1.0 + 1e-10], [1.0, 0.0]])
    with pytest.raises(NonHermitian):
        HermitianOperator(m)
    assert HermitianOperator.from_matrix(m).dim == 2


def test_hermitian_operator_dimension_limit():
    with pytest.raises(DimMismatch):
        HermitianOperator(np.eye(65))


def test_pauli_algebra():
    x, z = pauli("x"), pauli("z")
    assert spectral_norm(commutator(x, z)) == pytest.approx(2.0)
    assert operator_norm(pauli("y")) == pytest.approx(1.0)
    assert np.allclose(x @ x, np.eye(2))
    with pytest.raises(ValueError):
        pauli("w")


def test_expectation_of_basis_state():
    assert expectation(pauli("z"), basis_state(2, 0)) == pytest.approx(1.0)
    assert expectation(pauli("z"), basis_state(2, 1)) == pytest.approx(-1.0)


def test_expectation_rejects_imaginary_value():
    anti = np.array([[0, 1], [-1, 0]], dtype=complex)
    with pytest.raises(NonHermitian):
        expectation(anti, normalize([1, 1j]))


def test_expectation_dimension_mismatch():
    with pytest.raises(DimMismatch):
        expectation(pauli("z"), singlet())


def test_tensor_and_partial_trace_recover_factor():
    x = pauli("x")
    lifted = tensor(x, identity(2))
    assert lifted.dim == 4
    assert np.allclose(partial_trace_factor(lifted, (2, 2), "a"), x.entries)
    assert np.allclose(partial_trace_factor(tensor(identity(2), x), (2, 2), "b"), x.entries)


def test_verify_local_structure():
    z, x = pauli("z").entries, pauli("x").entries
    assert verify_local_structure(BellScenario.local(z, x, z, x, dichotomous=True))

    eye = np.eye(2)
    nonlocal_scenario = BellScenario(
        A1=HermitianOperator(np.kron(z, z)),
        A2=HermitianOperator(np.kron(x, eye)),
        B1=HermitianOperator(np.kron(eye, z)),
        B2=HermitianOperator(np.kron(eye, x)),
        local_structure=(2, 2),
    )
    assert not verify_local_structure(nonlocal_scenario)


def test_verify_local_structure_needs_structure():
    op = HermitianOperator(np.eye(4))
    with pytest.raises(MissingStructure):
        verify_local_structure(BellScenario(op, op, op, op))


def test_scenario_dimension_checks():
    with pytest.raises(DimMismatch):
        BellScenario(identity(2), identity(2), identity(4), identity(4))
    with pytest.raises(DimMismatch):
        BellScenario(identity(4), identity(4), identity(4), identity(4), local_structure=(3, 2))


def test_dichotomous_scenario_rejects_other_spectra():
    z = pauli("z").entries
    with pytest.raises(NotDichotomous):
        BellScenario.local(2 * z, z, z, z, dichotomous=True)


def test_random_hermitian_is_hermitian(rng):
    op = random_hermitian(DIM, rng)
    assert np.allclose(op.entries, op.entries.conj().T)


@settings(max_examples=50, deadline=None)
@given(
    raw=arrays(np.float64, (2, DIM, DIM), elements=ELEMENTS),
    vector=arrays(np.float64, (2, DIM), elements=ELEMENTS),
)
def test_expectation_bounded_by_operator_norm(raw, vector):
    assume(np.linalg.norm(vector) > 1e-3)
    m = raw[0] + 1j * raw[1]
    op = HermitianOperator.from_matrix((m + m.conj().T) / 2)
    psi = normalize(vector[0] + 1j * vector[1])
    assert abs(expectation(op, psi)) <= operator_norm(op) + 1e-9


@settings(max_examples=50, deadline=None)
@given(
    x=arrays(np.float64, (DIM, DIM), elements=ELEMENTS),
    y=arrays(np.float64, (DIM, DIM), elements=ELEMENTS),
)
def test_commutator_is_antisymmetric(x, y):
    assert np.allclose(commutator(x, y), -commutator(y, x))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), dim=st.integers(min_value=2, max_value=6))
def test_random_dichotomous_squares_to_identity(seed, dim):
    d = random_dichotomous(dim, np.random.default_rng(seed))
    assert np.allclose(d @ d, np.eye(dim), atol=1e-10)


def test_tensor_examples():
    z = pauli("z")
    assert np.allclose(tensor(identity(2), identity(2)).entries, np.eye(4))
    assert np.allclose(tensor(z, identity(2)).entries, np.diag([1, 1, -1, -1]))
    assert expectation(tensor(pauli("x"), pauli("x")), singlet()) == pytest.approx(-1.0, abs=1e-12)


def test_commutator_examples():
    x, y, z = pauli("x"), pauli("y"), pauli("z")
    assert np.allclose(commutator(x, y), 2j * z.entries)
    assert np.allclose(commutator(z, z), 0)
    assert np.allclose(commutator(tensor(z, identity(2)), tensor(identity(2), x)), 0)


@settings(max_examples=50, deadline=None)
@given(vector=arrays(np.float64, (2, DIM), elements=ELEMENTS))
def test_normalize_is_idempotent(vector):
    assume(np.linalg.norm(vector) > 1e-3)
    psi = normalize(vector[0] + 1j * vector[1])
    assert np.allclose(normalize(psi.amplitudes).amplitudes, psi.amplitudes, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(x=arrays(np.float64, (DIM, DIM), elements=ELEMENTS))
def test_self_commutator_vanishes(x):
    assert np.allclose(commutator(x, x), 0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), dim=st.integers(min_value=1, max_value=4))
def test_operator_norm_survives_identity_extension(seed, dim):
    x = random_hermitian(dim, np.random.default_rng(seed))
    extended = operator_norm(tensor(x, identity(3)))
    assert extended == pytest.approx(operator_norm(x), rel=1e-10, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_tensor_is_associative(seed):
    rng = np.random.default_rng(seed)
    x, y, z = random_hermitian(2, rng), random_hermitian(2, rng), random_hermitian(3, rng)
    assert np.allclose(tensor(tensor(x, y), z).entries, tensor(x, tensor(y, z)).entries)
