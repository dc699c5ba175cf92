"""
Exact CHSH analysis: the Bell operator, the Landau identity, compatibility
bounds, the permutation criterion, and a local hidden variable baseline.

Normalization: <B> = 1/2 [<A1 B1> + <A1 B2> + <A2 B1> - <A2 B2>], so the
classical bound is 1 and the quantum bound is sqrt(2).
"""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from entanglement_lab.exceptions import DimMismatch, InvalidWeights
from entanglement_lab.hilbert import (
    BellScenario,
    HermitianOperator,
    StateVector,
    commutator,
    expectation,
    identity,
    operator_norm,
    pauli,
    random_dichotomous,
    spectral_norm,
)
from entanglement_lab.stats import SettingCounts

logger = logging.getLogger(__name__)

COMPATIBLE_ATOL = 1e-10
TIE_ATOL = 1e-12
SETTINGS = ((1, 1), (1, 2), (2, 1), (2, 2))

# Signs of the correlators (A1B1, A1B2, A2B1, A2B2): the four placements of the single
# minus sign. "swap-ab" is the B- operator, minus sign on A1B1.
PERMUTATIONS = {
    "identity": (1, 1, 1, -1),
    "swap-a": (1, -1, 1, 1),
    "swap-b": (1, 1, -1, 1),
    "swap-ab": (-1, 1, 1, 1),
}


class Classification(str, enum.Enum):
    LOCALLY_COMPATIBLE = "LocallyCompatible"
    DOUBLY_INCOMPATIBLE = "DoublyIncompatible"


@dataclass(frozen=True)
class ChshReport:
    """
    Summary of the operator analysis of a scenario.

    Fields:
        bell_norm (float): Spectral norm of the Bell operator.
        landau_residual (float): Norm of B^2 - (I - 1/4 [A1,A2][B1,B2]).
        commutator_A_norm (float): Norm of [A1, A2].
        commutator_B_norm (float): Norm of [B1, B2].
        permutation_max (float): Largest Bell norm over index permutations.
        permutation (str): Permutation achieving permutation_max.
        classification (Classification): Compatibility class of the scenario.
    """

    bell_norm: float
    landau_residual: float
    commutator_A_norm: float
    commutator_B_norm: float
    permutation_max: float
    permutation: str
    classification: Classification


@dataclass(frozen=True, eq=False)
class LhvModel:
    """
    A finite local hidden variable model.

    Fields:
        weights (ndarray): Probability of each hidden state lambda.
        responses (ndarray): Shape (|Lambda|, 4) table of xi_A1, xi_A2, xi_B1, xi_B2
            with values in {-1, 0, +1}; 0 is a non-detection.
    """

    weights: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64).ravel()
        responses = np.asarray(self.responses, dtype=np.int64)
        if responses.ndim == 1:
            responses = responses.reshape(1, -1)
        if weights.size < 1 or responses.shape != (weights.size, 4):
            raise InvalidWeights(
                f"Need one response row of 4 values per weight, got {responses.shape} "
                f"for {weights.size} weights."
            )
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise InvalidWeights(f"Weights must be a probability vector (sum {weights.sum()!r}).")
        if not np.all(np.isin(responses, (-1, 0, 1))):
            raise InvalidWeights("Responses must take values in {-1, 0, +1}.")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "responses", responses)

    @property
    def sample_space_size(self) -> int:
        return int(self.weights.size)


# ----------------------------
# Operator analysis
# ----------------------------
def _signed_bell_matrix(s: BellScenario, signs) -> np.ndarray:
    a1, a2, b1, b2 = (op.entries for op in s.operators)
    terms = (a1 @ b1, a1 @ b2, a2 @ b1, a2 @ b2)
    return 0.5 * sum(sign * term for sign, term in zip(signs, terms))


def bell_operator(s: BellScenario) -> HermitianOperator:
    return HermitianOperator.from_matrix(_signed_bell_matrix(s, PERMUTATIONS["identity"]))


def chsh_value(s: BellScenario, psi: StateVector) -> float:
    if psi.dim != s.dim:
        raise DimMismatch(f"State dimension {psi.dim} != scenario dimension {s.dim}.")
    a1, a2, b1, b2 = s.operators
    return 0.5 * (
        expectation(a1 @ b1, psi)
        + expectation(a1 @ b2, psi)
        + expectation(a2 @ b1, psi)
        - expectation(a2 @ b2, psi)
    )


def landau_residual(s: BellScenario) -> float:
    bell = _signed_bell_matrix(s, PERMUTATIONS["identity"])
    rhs = identity(s.dim).entries - 0.25 * commutator(s.A1, s.A2) @ commutator(s.B1, s.B2)
    return spectral_norm(bell @ bell - rhs)


def max_chsh(s: BellScenario) -> float:
    return operator_norm(bell_operator(s))


def permutation_max(s: BellScenario) -> tuple[float, str]:
    norms = {
        label: operator_norm(HermitianOperator.from_matrix(_signed_bell_matrix(s, signs)))
        for label, signs in PERMUTATIONS.items()
    }
    best = max(norms.values())
    label = next(label for label, value in norms.items() if value >= best - TIE_ATOL)
    return best, label


def analyze(s: BellScenario) -> ChshReport:
    comm_a = spectral_norm(commutator(s.A1, s.A2))
    comm_b = spectral_norm(commutator(s.B1, s.B2))
    perm_value, perm_label = permutation_max(s)
    if min(comm_a, comm_b) < COMPATIBLE_ATOL:
        classification = Classification.LOCALLY_COMPATIBLE
    else:
        classification = Classification.DOUBLY_INCOMPATIBLE
    report = ChshReport(
        bell_norm=max_chsh(s),
        landau_residual=landau_residual(s),
        commutator_A_norm=comm_a,
        commutator_B_norm=comm_b,
        permutation_max=perm_value,
        permutation=perm_label,
        classification=classification,
    )
    logger.debug(f"CHSH analysis: {report}")
    return report


def joint_outcome_probabilities(s: BellScenario, psi: StateVector, i: int, j: int) -> np.ndarray:
    """
    Born probabilities of the outcome pairs (+,+), (+,-), (-,+), (-,-) when A_i and
    B_j are measured together on psi. Requires dichotomous observables.
    """
    if psi.dim != s.dim:
        raise DimMismatch(f"State dimension {psi.dim} != scenario dimension {s.dim}.")
    a = (s.A1, s.A2)[i - 1].entries
    b = (s.B1, s.B2)[j - 1].entries
    eye = np.eye(s.dim)
    projectors_a = ((eye + a) / 2, (eye - a) / 2)
    projectors_b = ((eye + b) / 2, (eye - b) / 2)
    probabilities = np.array(
        [
            np.vdot(psi.amplitudes, pa @ pb @ psi.amplitudes).real
            for pa, pb in itertools.product(projectors_a, projectors_b)
        ]
    )
    probabilities = np.clip(probabilities, 0.0, None)
    return probabilities / probabilities.sum()


# ----------------------------
# Preset and random scenarios
# ----------------------------
def scenario_preset(name: str) -> BellScenario:
    z, x = pauli("z").entries, pauli("x").entries
    if name == "optimal":
        return BellScenario.local(
            z, x, (z + x) / np.sqrt(2), (z - x) / np.sqrt(2), dichotomous=True
        )
    if name == "compatible":
        return BellScenario.local(z, x, z, z, dichotomous=True)
    if name == "doubly-incompatible-nonoptimal":
        # B2 tilted pi/6 away from B1: ||B|| = sqrt(1 + sin(pi/6))
        tilted = np.cos(np.pi / 6) * z + np.sin(np.pi / 6) * x
        return BellScenario.local(z, x, z, tilted, dichotomous=True)
    if name == "identity":
        eye = np.eye(2)
        return BellScenario.local(eye, eye, eye, eye, dichotomous=True)
    raise ValueError(f"Unknown scenario preset '{name}'.")


SCENARIO_PRESETS = (
    "optimal",
    "compatible",
    "doubly-incompatible-nonoptimal",
    "identity",
)


def random_local_scenario(
    rng: np.random.Generator, dims: tuple[int, int] = (2, 2), compatible_b: bool = False
) -> BellScenario:
    dim_a, dim_b = dims
    a1, a2 = random_dichotomous(dim_a, rng), random_dichotomous(dim_a, rng)
    b1 = random_dichotomous(dim_b, rng)
    b2 = b1 if compatible_b else random_dichotomous(dim_b, rng)
    return BellScenario.local(a1, a2, b1, b2, dichotomous=True)


# ----------------------------
# Local hidden variables
# ----------------------------
def _strategy_values(responses: np.ndarray) -> np.ndarray:
    a1, a2, b1, b2 = (responses[..., k] for k in range(4))
    return a1 * (b1 + b2) + a2 * (b1 - b2)


def lhv_correlations(m: LhvModel) -> dict[tuple[int, int], float]:
    r = m.responses
    return {
        (i, j): float(np.dot(m.weights, r[:, i - 1] * r[:, j + 1]))
        for i, j in SETTINGS
    }


def lhv_chsh(m: LhvModel) -> float:
    return 0.5 * abs(float(np.dot(m.weights, _strategy_values(m.responses))))


def deterministic_strategies() -> np.ndarray:
    """All 3^4 single-valued response patterns, shape (81, 4)."""
    return np.array(list(itertools.product((-1, 0, 1), repeat=4)), dtype=np.int64)


def exhaustive_lhv_max() -> float:
    values = np.abs(_strategy_values(deterministic_strategies()))
    return float(values.max()) / 2


def random_lhv_model(size: int, rng: np.random.Generator) -> LhvModel:
    weights = rng.dirichlet(np.ones(size))
    weights = weights / weights.sum()
    return LhvModel(weights=weights, responses=rng.integers(-1, 2, size=(size, 4)))


def lhv_sweep(models: int, rng: np.random.Generator, size: int = 16) -> np.ndarray:
    """CHSH values of `models` random mixtures over `size` hidden states each."""
    weights = rng.dirichlet(np.ones(size), size=models)
    weights = weights / weights.sum(axis=1, keepdims=True)
    responses = rng.integers(-1, 2, size=(models, size, 4))
    return 0.5 * np.abs(np.einsum("ml,ml->m", weights, _strategy_values(responses)))


def lhv_sample_counts(
    m: LhvModel, trials: int, rng: np.random.Generator
) -> dict[tuple[int, int], SettingCounts]:
    """
    Simulate `trials` runs per setting pair. Runs where either response is 0 are
    non-detections; they are kept in the denominator as n_null.
    """
    counts = {}
    for i, j in SETTINGS:
        hidden = rng.choice(m.sample_space_size, size=trials, p=m.weights)
        a = m.responses[hidden, i - 1]
        b = m.responses[hidden, j + 1]
        counts[(i, j)] = SettingCounts.from_outcomes(a, b)
    return counts


def default_lhv_model() -> LhvModel:
    """Uniform mixture of the eight deterministic ±1 strategies that saturate S = 1."""
    strategies = [
        row for row in itertools.product((-1, 1), repeat=4)
        if _strategy_values(np.array(row)) == 2
    ]
    weights = np.full(len(strategies), 1.0 / len(strategies))
    return LhvModel(weights=weights, responses=np.array(strategies))


def quantum_sample_counts(
    s: BellScenario, psi: StateVector, trials: int, rng: np.random.Generator
) -> dict[tuple[int, int], SettingCounts]:
    counts = {}
    for i, j in SETTINGS:
        probabilities = joint_outcome_probabilities(s, psi, i, j)
        n_pp, n_pm, n_mp, n_mm = rng.multinomial(trials, probabilities)
        counts[(i, j)] = SettingCounts(
            n_pp=int(n_pp), n_pm=int(n_pm), n_mp=int(n_mp), n_mm=int(n_mm)
        )
    return counts

