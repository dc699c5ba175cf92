"""
Finite-dimensional complex Hilbert space: state vectors, Hermitian operators,
tensor products, commutators and spectral norms.

Everything is dense; the scenarios handled here never exceed dimension 64.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.stats import unitary_group

from entanglement_lab.exceptions import (
    DimMismatch,
    MissingStructure,
    NonHermitian,
    NotDichotomous,
    NotNormalized,
    ZeroVector,
)

NORM_ATOL = 1e-12
ZERO_NORM = 1e-15
HERMITIAN_ATOL = 1e-12
BOUNDARY_ATOL = 1e-9
IMAG_ATOL = 1e-10
COMMUTE_ATOL = 1e-10
MAX_DIM = 64


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    Represents a normalized pure state.

    Fields:
        amplitudes (ndarray): Complex amplitudes c_j, unit Euclidean norm.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(np.ravel(self.amplitudes))
        if amplitudes.size < 1:
            raise DimMismatch("A state needs at least one amplitude.")
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > NORM_ATOL:
            raise NotNormalized(
                f"State amplitudes have norm {norm!r}; use normalize() on raw vectors."
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def probabilities(self) -> np.ndarray:
        probabilities = np.abs(self.amplitudes) ** 2
        return probabilities / probabilities.sum()


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """
    Represents an observable as a dense Hermitian matrix.

    Fields:
        entries (ndarray): dim x dim complex matrix equal to its conjugate transpose.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        _check_hermitian(entries, HERMITIAN_ATOL)
        object.__setattr__(self, "entries", _frozen((entries + entries.conj().T) / 2))

    @classmethod
    def from_matrix(cls, matrix, atol: float = BOUNDARY_ATOL) -> "HermitianOperator":
        """Build from a computed matrix, tolerating accumulated roundoff up to `atol`."""
        matrix = np.asarray(matrix, dtype=np.complex128)
        _check_hermitian(matrix, atol)
        return cls((matrix + matrix.conj().T) / 2)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def __matmul__(self, other):
        if isinstance(other, HermitianOperator):
            other = other.entries
        return self.entries @ other


def _check_hermitian(matrix: np.ndarray, atol: float) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
        raise DimMismatch(f"Expected a non-empty square matrix, got shape {matrix.shape}.")
    if matrix.shape[0] > MAX_DIM:
        raise DimMismatch(f"Dimension {matrix.shape[0]} exceeds {MAX_DIM}.")
    deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
    if deviation > atol:
        raise NonHermitian(
            f"Matrix deviates from Hermitian symmetry by {deviation:.3e} (> {atol:.0e})."
        )


OperatorLike = Union[HermitianOperator, np.ndarray]


def _matrix(x: OperatorLike) -> np.ndarray:
    if isinstance(x, HermitianOperator):
        return x.entries
    return np.asarray(x, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class BellScenario:
    """
    Represents the four observables of a CHSH test.

    Fields:
        A1, A2 (HermitianOperator): First party's observables.
        B1, B2 (HermitianOperator): Second party's observables.
        local_structure (tuple, optional): (dim_a, dim_b) when the space is H_a ⊗ H_b.
        dichotomous (bool): All observables have spectrum in {-1, +1}.
    """

    A1: HermitianOperator
    A2: HermitianOperator
    B1: HermitianOperator
    B2: HermitianOperator
    local_structure: Optional[tuple[int, int]] = None
    dichotomous: bool = False

    def __post_init__(self):
        dims = {op.dim for op in self.operators}
        if len(dims) != 1:
            raise DimMismatch(f"Scenario operators have unequal dimensions {sorted(dims)}.")
        if self.local_structure is not None:
            dim_a, dim_b = self.local_structure
            if dim_a * dim_b != self.dim:
                raise DimMismatch(
                    f"Local structure {dim_a}x{dim_b} does not match dimension {self.dim}."
                )
        if self.dichotomous:
            for op in self.operators:
                eigenvalues = np.linalg.eigvalsh(op.entries)
                if np.max(np.abs(np.abs(eigenvalues) - 1.0)) > BOUNDARY_ATOL:
                    raise NotDichotomous(
                        f"Observable spectrum {np.round(eigenvalues, 12)} is not in {{-1, +1}}."
                    )

    @property
    def operators(self) -> tuple[HermitianOperator, ...]:
        return (self.A1, self.A2, self.B1, self.B2)

    @property
    def dim(self) -> int:
        return self.A1.dim

    @classmethod
    def local(cls, a1, a2, b1, b2, dichotomous: bool = False) -> "BellScenario":
        """Lift local observables to A_i = a_i ⊗ I and B_j = I ⊗ b_j."""
        a1, a2, b1, b2 = (
            op if isinstance(op, HermitianOperator) else HermitianOperator(op)
            for op in (a1, a2, b1, b2)
        )
        if a1.dim != a2.dim or b1.dim != b2.dim:
            raise DimMismatch("Each party's observables must share a dimension.")
        id_a, id_b = identity(a1.dim), identity(b1.dim)
        return cls(
            A1=tensor(a1, id_b),
            A2=tensor(a2, id_b),
            B1=tensor(id_a, b1),
            B2=tensor(id_a, b2),
            local_structure=(a1.dim, b1.dim),
            dichotomous=dichotomous,
        )


# ----------------------------
# Constructors
# ----------------------------
_PAULI = {
    "i": np.eye(2),
    "x": np.array([[0, 1], [1, 0]]),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]]),
}


def pauli(label: str) -> HermitianOperator:
    try:
        return HermitianOperator(_PAULI[label.lower()])
    except KeyError:
        raise ValueError(f"Unknown Pauli label '{label}'.")


def identity(dim: int) -> HermitianOperator:
    return HermitianOperator(np.eye(dim))


def normalize(raw: Sequence[complex]) -> StateVector:
    """Scale raw amplitudes C_j to unit norm, c_j = C_j / sqrt(sum |C_j|^2)."""
    raw = np.ravel(np.asarray(raw, dtype=np.complex128))
    if raw.size < 1:
        raise DimMismatch("Cannot normalize an empty vector.")
    norm = np.linalg.norm(raw)
    if not np.isfinite(norm) or norm <= ZERO_NORM:
        raise ZeroVector(f"Vector norm {norm!r} is too small to normalize.")
    return StateVector(raw / norm)


def singlet() -> StateVector:
    return normalize([0, 1, -1, 0])


def basis_state(dim: int, index: int) -> StateVector:
    amplitudes = np.zeros(dim, dtype=np.complex128)
    amplitudes[index] = 1.0
    return StateVector(amplitudes)


# ----------------------------
# Operations
# ----------------------------
def tensor(x: OperatorLike, y: OperatorLike) -> HermitianOperator:
    return HermitianOperator.from_matrix(np.kron(_matrix(x), _matrix(y)))


def commutator(x: OperatorLike, y: OperatorLike) -> np.ndarray:
    x, y = _matrix(x), _matrix(y)
    if x.shape != y.shape:
        raise DimMismatch(f"Cannot commute shapes {x.shape} and {y.shape}.")
    return x @ y - y @ x


def spectral_norm(matrix) -> float:
    """Largest singular value of an arbitrary square matrix."""
    return float(np.linalg.norm(_matrix(matrix), ord=2))


def operator_norm(x: OperatorLike) -> float:
    """max |eigenvalue| of a Hermitian operator, i.e. sup |<psi|X|psi>| over unit psi."""
    matrix = _matrix(x)
    _check_hermitian(matrix, BOUNDARY_ATOL)
    eigenvalues = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)
    return float(np.max(np.abs(eigenvalues)))


def eigh(x: OperatorLike) -> tuple[np.ndarray, np.ndarray]:
    matrix = _matrix(x)
    _check_hermitian(matrix, BOUNDARY_ATOL)
    return np.linalg.eigh((matrix + matrix.conj().T) / 2)


def expectation(x: OperatorLike, psi: StateVector) -> float:
    matrix = _matrix(x)
    if matrix.shape[0] != psi.dim:
        raise DimMismatch(f"Operator dimension {matrix.shape[0]} != state dimension {psi.dim}.")
    value = np.vdot(psi.amplitudes, matrix @ psi.amplitudes)
    if abs(value.imag) > IMAG_ATOL:
        raise NonHermitian(f"Expectation has imaginary part {value.imag:.3e}.")
    return float(value.real)


def partial_trace_factor(x: OperatorLike, dims: tuple[int, int], keep: str) -> np.ndarray:
    """
    Recover the local factor of X assuming X = a ⊗ I (keep="a") or I ⊗ b (keep="b"),
    by tracing out the other factor and dividing by its dimension.
    """
    dim_a, dim_b = dims
    tensor4 = _matrix(x).reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "a":
        return np.einsum("ijkj->ik", tensor4) / dim_b
    if keep == "b":
        return np.einsum("ijil->jl", tensor4) / dim_a
    raise ValueError(f"keep must be 'a' or 'b', got '{keep}'.")


def verify_local_structure(s: BellScenario) -> bool:
    """
    True iff every A_i commutes with every B_j and each operator factorizes as
    a_i ⊗ I (first party) or I ⊗ b_j (second party).
    """
    if s.local_structure is None:
        raise MissingStructure("Scenario carries no (dim_a, dim_b) tensor structure.")
    dim_a, dim_b = s.local_structure

    for a in (s.A1, s.A2):
        for b in (s.B1, s.B2):
            if spectral_norm(commutator(a, b)) >= COMMUTE_ATOL:
                return False

    for a in (s.A1, s.A2):
        factor = partial_trace_factor(a, s.local_structure, "a")
        if np.max(np.abs(np.kron(factor, np.eye(dim_b)) - a.entries)) > BOUNDARY_ATOL:
            return False
    for b in (s.B1, s.B2):
        factor = partial_trace_factor(b, s.local_structure, "b")
        if np.max(np.abs(np.kron(np.eye(dim_a), factor) - b.entries)) > BOUNDARY_ATOL:
            return False
    return True


# ----------------------------
# Random constructors
# ----------------------------
def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    return normalize(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianOperator:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator.from_matrix((raw + raw.conj().T) / 2)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def random_dichotomous(dim: int, rng: np.random.Generator) -> HermitianOperator:
    """V diag(±1) V† with Haar-random V."""
    v = random_unitary(dim, rng)
    signs = rng.choice(np.array([-1.0, 1.0]), size=dim)
    return HermitianOperator.from_matrix(v @ np.diag(signs) @ v.conj().T)
