import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qverify.errors import BadDimError, NonHermitianError
from qverify.qcore import (
    EIG_TIE_TOL,
    PAULI_MATRICES,
    PAULI_X,
    PAULI_Z,
    HermitianOperator,
    Ket,
    basis_ket,
    eig_hermitian,
    haar_random_ket,
    identity,
    is_projector,
    ordered_eigh,
    orthocomplement_basis,
    partial_transpose_qubit2,
    tensor,
    tensor_all,
)


def random_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (raw + raw.conj().T) / 2.0


def test_ket_requires_unit_norm():
    Ket(np.array([1.0, 0.0], dtype=complex))
    with pytest.raises(ValueError):
        Ket(np.array([1.0, 1.0], dtype=complex))


def test_ket_requires_power_of_two_dim():
    with pytest.raises(BadDimError):
        Ket(np.array([0.0, 1.0, 0.0], dtype=complex) / 1.0)


def test_ket_normalized_constructor():
    k = Ket.normalized([3.0, 4.0])
    assert k.dim == 2
    assert abs(np.linalg.norm(k.amplitudes) - 1.0) < 1e-15
    with pytest.raises(ValueError):
        Ket.normalized([0.0, 0.0])


def test_ket_amplitudes_frozen():
    k = basis_ket(4, 2)
    with pytest.raises(ValueError):
        k.amplitudes[0] = 1.0


def test_ket_inner_and_fidelity():
    zero = basis_ket(2, 0)
    one = basis_ket(2, 1)
    plus = Ket.normalized([1.0, 1.0])
    assert zero.inner(one) == 0.0
    assert abs(plus.fidelity(zero) - 0.5) < 1e-15
    with pytest.raises(BadDimError):
        zero.inner(basis_ket(4, 0))


def test_density_is_projector():
    k = haar_random_ket(8, seed=5)
    rho = k.density()
    assert is_projector(rho)
    assert abs(rho.trace() - 1.0) < 1e-12
    assert abs(rho.expectation(k) - 1.0) < 1e-12


def test_hermitian_operator_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
    with pytest.raises(BadDimError):
        HermitianOperator(np.zeros((2, 3), dtype=complex))


def test_pauli_matrices_square_to_identity():
    for name, mat in PAULI_MATRICES.items():
        assert np.allclose(mat @ mat, np.eye(2)), name
        assert np.allclose(mat, mat.conj().T), name


def test_tensor_rejects_mixed_arguments():
    with pytest.raises(TypeError):
        tensor(basis_ket(2, 0), identity(2))


def test_tensor_kets_matches_kron():
    a = haar_random_ket(2, seed=1)
    b = haar_random_ket(4, seed=2)
    joint = tensor(a, b)
    assert np.allclose(joint.amplitudes, np.kron(a.amplitudes, b.amplitudes))
    assert joint.num_qubits == 3


@given(st.lists(st.sampled_from("IXYZ"), min_size=2, max_size=4))
@settings(max_examples=30, deadline=None)
def test_tensor_all_associative_on_paulis(names):
    ops = [HermitianOperator(PAULI_MATRICES[n]) for n in names]
    left = tensor_all(ops)
    folded = ops[0]
    for op in ops[1:]:
        folded = tensor(folded, op)
    assert np.array_equal(left.entries, folded.entries)


def test_ordered_eigh_descending_and_reconstructs():
    mat = random_hermitian(8, seed=3)
    vals, vecs = ordered_eigh(mat)
    assert np.all(np.diff(vals) <= 1e-12)
    rebuilt = (vecs * vals) @ vecs.conj().T
    assert np.max(np.abs(rebuilt - mat)) < 1e-10


def test_ordered_eigh_deterministic_on_degenerate_spectrum():
    # identity has a fully degenerate spectrum: ordering must still be
    # reproducible and phase-fixed
    mat = np.eye(4, dtype=complex)
    vals1, vecs1 = ordered_eigh(mat)
    vals2, vecs2 = ordered_eigh(mat)
    assert np.array_equal(vecs1, vecs2)
    assert np.allclose(vals1, 1.0)
    mat2 = PAULI_Z.astype(complex)
    _, vecs = ordered_eigh(np.kron(mat2, mat2))
    _, again = ordered_eigh(np.kron(mat2, mat2))
    assert np.array_equal(vecs, again)


def test_ordered_eigh_phase_convention():
    # largest amplitude entry of every column is real positive
    mat = random_hermitian(8, seed=11)
    _, vecs = ordered_eigh(mat)
    for i in range(vecs.shape[1]):
        col = vecs[:, i]
        pivot = col[int(np.argmax(np.abs(col)))]
        assert abs(pivot.imag) < 1e-12
        assert pivot.real > 0


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=25, deadline=None)
def test_eig_hermitian_spectrum_properties(seed):
    op = HermitianOperator(random_hermitian(4, seed))
    spec = eig_hermitian(op)
    assert len(spec.eigenvalues) == 4
    assert all(
        spec.eigenvalues[i] >= spec.eigenvalues[i + 1] - EIG_TIE_TOL
        for i in range(3)
    )
    assert np.max(np.abs(spec.reconstruct() - op.entries)) < 1e-10


def test_partial_transpose_swaps_second_factor():
    a = random_hermitian(2, seed=21)
    b = random_hermitian(2, seed=22)
    joint = HermitianOperator(np.kron(a, b))
    swapped = partial_transpose_qubit2(joint)
    assert np.allclose(swapped.entries, np.kron(a, b.T))
    with pytest.raises(BadDimError):
        partial_transpose_qubit2(identity(8))


def test_partial_transpose_detects_entanglement():
    bell = Ket.normalized([1.0, 0.0, 0.0, 1.0])
    vals = np.linalg.eigvalsh(partial_transpose_qubit2(bell.density()).entries)
    assert vals[0] < -0.49


def test_is_projector():
    assert is_projector(basis_ket(4, 1).density())
    assert is_projector(identity(4))
    assert not is_projector(HermitianOperator(0.5 * np.eye(4, dtype=complex)))


def test_haar_random_ket_seeded():
    a = haar_random_ket(8, seed=42)
    b = haar_random_ket(8, seed=42)
    c = haar_random_ket(8, seed=43)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert not np.array_equal(a.amplitudes, c.amplitudes)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=25, deadline=None)
def test_orthocomplement_basis_spans_orthogonal_subspace(seed):
    state = haar_random_ket(8, seed)
    basis = orthocomplement_basis(state)
    assert basis.shape == (8, 7)
    overlaps = basis.conj().T @ state.amplitudes
    assert np.max(np.abs(overlaps)) < 1e-10
    gram = basis.conj().T @ basis
    assert np.max(np.abs(gram - np.eye(7))) < 1e-10


def test_basis_ket_bounds():
    with pytest.raises(BadDimError):
        basis_ket(4, 4)


def test_expectation_of_parity():
    zz = HermitianOperator(np.kron(PAULI_Z, PAULI_Z))
    bell = Ket.normalized([1.0, 0.0, 0.0, 1.0])
    assert abs(zz.expectation(bell) - 1.0) < 1e-12
    xx = HermitianOperator(np.kron(PAULI_X, PAULI_X))
    assert abs(xx.expectation(bell) - 1.0) < 1e-12
