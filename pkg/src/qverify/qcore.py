"""Dense complex linear algebra for small multi-qubit systems.

States are unit vectors in a 2**N dimensional complex space and
observables are Hermitian matrices over the same space. Everything is
double precision, dense, and immutable after construction; dimensions
stay small (N <= 12) so exact methods (full eigendecomposition,
Kronecker products) remain cheap and well conditioned.

Two tolerances are used throughout the package: TOL_INPUT for structural
checks on directly constructed values (norms, Hermiticity, weights) and
TOL_DERIVED for quantities that went through arithmetic (eigenvalues,
assembled operators, acceptance probabilities).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import BadDimError, NonHermitianError

TOL_INPUT = 1e-12
TOL_DERIVED = 1e-10

# Eigenvalues closer than this are treated as one degenerate cluster
# when ordering eigenvectors.
EIG_TIE_TOL = 1e-10

# Dense operations are meant for at most this many qubits.
MAX_QUBITS = 12

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI_MATRICES = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


def _frozen_array(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _check_dense_dim(dim: int, what: str) -> None:
    if not _is_power_of_two(dim):
        raise BadDimError(f"{what} dimension {dim} is not a power of two")
    if dim > 2**MAX_QUBITS:
        raise BadDimError(
            f"{what} dimension {dim} exceeds the dense limit of {MAX_QUBITS} qubits"
        )


@dataclass(frozen=True, eq=False)
class Ket:
    """A unit vector over a 2**N dimensional complex space.

    The amplitude array is copied on construction and frozen; the L2
    norm must equal 1 within TOL_INPUT. Use Ket.normalized to build from
    an unnormalized vector.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.amplitudes)
        if arr.ndim != 1:
            raise BadDimError("ket amplitudes must form a flat vector")
        object.__setattr__(self, "amplitudes", arr)
        _check_dense_dim(arr.shape[0], "ket")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > TOL_INPUT:
            raise ValueError(
                f"ket norm {norm!r} deviates from 1 by more than {TOL_INPUT}"
            )

    @classmethod
    def normalized(cls, amplitudes) -> "Ket":
        arr = np.asarray(amplitudes, dtype=complex)
        norm = float(np.linalg.norm(arr))
        if norm < 1e-12:
            raise ValueError("cannot normalize a (near) zero vector")
        return cls(arr / norm)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def inner(self, other: "Ket") -> complex:
        """<self|other>."""
        if other.dim != self.dim:
            raise BadDimError("inner product needs matching dimensions")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "Ket") -> float:
        return float(abs(self.inner(other)) ** 2)

    def density(self) -> "HermitianOperator":
        """The rank one density matrix |self><self|."""
        return HermitianOperator(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A Hermitian matrix over a 2**N dimensional space.

    Entries are copied and frozen; max |H - H^dagger| must be at most
    TOL_INPUT or construction fails with NonHermitianError.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise BadDimError("operator entries must form a square matrix")
        object.__setattr__(self, "entries", arr)
        _check_dense_dim(arr.shape[0], "operator")
        residual = float(np.max(np.abs(arr - arr.conj().T)))
        if residual > TOL_INPUT:
            raise NonHermitianError(
                f"operator deviates from Hermitian by {residual!r} (> {TOL_INPUT})"
            )

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def expectation(self, state: Ket) -> float:
        """<state|self|state>, guaranteed real for Hermitian entries."""
        if state.dim != self.dim:
            raise BadDimError("expectation needs matching dimensions")
        val = np.vdot(state.amplitudes, self.entries @ state.amplitudes)
        return float(val.real)

    def matvec(self, state: Ket) -> np.ndarray:
        if state.dim != self.dim:
            raise BadDimError("matvec needs matching dimensions")
        return self.entries @ state.amplitudes


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Full eigensystem of a Hermitian operator, eigenvalues descending."""

    eigenvalues: tuple[float, ...]
    eigenvectors: tuple[Ket, ...]

    def reconstruct(self) -> np.ndarray:
        dim = self.eigenvectors[0].dim
        out = np.zeros((dim, dim), dtype=complex)
        for val, vec in zip(self.eigenvalues, self.eigenvectors):
            out += val * np.outer(vec.amplitudes, vec.amplitudes.conj())
        return out


def identity(dim: int) -> HermitianOperator:
    _check_dense_dim(dim, "identity")
    return HermitianOperator(np.eye(dim, dtype=complex))


def basis_ket(dim: int, index: int) -> Ket:
    if not 0 <= index < dim:
        raise BadDimError(f"basis index {index} outside [0, {dim})")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return Ket(amps)


def tensor(a, b):
    """Kronecker product of two kets or two operators (never a mix)."""
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, HermitianOperator) and isinstance(b, HermitianOperator):
        return HermitianOperator(np.kron(a.entries, b.entries))
    raise TypeError("tensor takes two Kets or two HermitianOperators")


def tensor_all(factors) -> HermitianOperator | Ket:
    return reduce(tensor, factors)


def _fix_phase(column: np.ndarray) -> np.ndarray:
    """Rotate a vector's global phase so its largest amplitude is real positive.

    Ties on magnitude (within TOL_INPUT) resolve to the lowest index.
    """
    mags = np.abs(column)
    top = float(mags.max())
    pivot = int(np.flatnonzero(mags >= top - TOL_INPUT)[0])
    phase = column[pivot] / abs(column[pivot])
    return column / phase


def _lex_key(column: np.ndarray) -> tuple:
    rounded = np.round(column, 8)
    key = []
    for amp in rounded:
        key.append(float(amp.real) + 0.0)  # normalize -0.0 to 0.0
        key.append(float(amp.imag) + 0.0)
    return tuple(key)


def ordered_eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with deterministic ordering and phases.

    Returns (values, vectors) with values descending and vectors as
    columns. Each vector's phase is fixed by _fix_phase; inside a
    cluster of eigenvalues equal within EIG_TIE_TOL, vectors are ordered
    by the lexicographic key of their rounded amplitudes so the output
    does not depend on backend ordering of degenerate subspaces.
    """
    vals, vecs = np.linalg.eigh(matrix)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    cols = [_fix_phase(vecs[:, i]) for i in range(vecs.shape[1])]

    out_vals: list[float] = []
    out_cols: list[np.ndarray] = []
    i = 0
    n = len(vals)
    while i < n:
        j = i + 1
        while j < n and abs(vals[j - 1] - vals[j]) <= EIG_TIE_TOL:
            j += 1
        cluster = sorted(range(i, j), key=lambda k: _lex_key(cols[k]))
        out_vals.extend(float(vals[k]) for k in cluster)
        out_cols.extend(cols[k] for k in cluster)
        i = j
    return np.array(out_vals), np.column_stack(out_cols)


def eig_hermitian(op: HermitianOperator) -> Spectrum:
    """Spectrum of op with the deterministic ordering of ordered_eigh.

    For dimensions up to 256 the decomposition is verified to
    reconstruct the operator within TOL_DERIVED.
    """
    vals, vecs = ordered_eigh(op.entries)
    spectrum = Spectrum(
        eigenvalues=tuple(float(v) for v in vals),
        eigenvectors=tuple(Ket(vecs[:, i]) for i in range(vecs.shape[1])),
    )
    if op.dim <= 256:
        residual = float(np.max(np.abs(spectrum.reconstruct() - op.entries)))
        assert residual <= TOL_DERIVED, (
            f"spectral reconstruction residual {residual!r} exceeds {TOL_DERIVED}"
        )
    return spectrum


def partial_transpose_qubit2(op: HermitianOperator) -> HermitianOperator:
    """Transpose the second tensor factor of a two qubit operator.

    Entry <ij|M|kl> moves to <il|M|kj>. The result of transposing one
    factor of a Hermitian matrix is again Hermitian. Raises BadDimError
    unless dim == 4.
    """
    if op.dim != 4:
        raise BadDimError(f"partial transpose defined for dim 4, got {op.dim}")
    m = op.entries.reshape(2, 2, 2, 2)
    return HermitianOperator(m.transpose(0, 3, 2, 1).reshape(4, 4))


def is_projector(op: HermitianOperator, tol: float = TOL_DERIVED) -> bool:
    """True when op is idempotent with eigenvalues in {0, 1} within tol."""
    mat = op.entries
    if float(np.max(np.abs(mat @ mat - mat))) > tol:
        return False
    vals = np.linalg.eigvalsh(mat)
    return bool(np.all(np.minimum(np.abs(vals), np.abs(vals - 1.0)) <= tol))


def haar_random_ket(dim: int, seed: int) -> Ket:
    """A Haar distributed pure state; identical seed gives identical output."""
    if dim < 1:
        raise BadDimError("haar_random_ket needs dim >= 1")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return Ket.normalized(v)


def orthocomplement_basis(state: Ket) -> np.ndarray:
    """Columns forming an orthonormal basis of the subspace orthogonal to state.

    Deterministic: QR of [state, e_0, ..., e_{d-2}] and drop the first
    column. Shape (d, d-1).
    """
    d = state.dim
    stacked = np.zeros((d, d), dtype=complex)
    stacked[:, 0] = state.amplitudes
    stacked[:, 1:] = np.eye(d, dtype=complex)[:, : d - 1]
    q, _ = np.linalg.qr(stacked)
    return q[:, 1:]
