"""
Classical field models: mode superpositions, intensities and the classical
Born rule, intra-system entangled field states, and stochastic intensity
samplers feeding the detectors.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from entanglement_lab.exceptions import DimMismatch, IndexOutOfRange, ZeroField
from entanglement_lab.hilbert import BellScenario, StateVector, normalize

logger = logging.getLogger(__name__)

SCHMIDT_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class ModeSuperposition:
    """
    A classical field expanded over a finite set of orthogonal modes.

    Fields:
        amplitudes (ndarray): Complex mode amplitudes C_j, in arbitrary field units.
        mode_labels (tuple): Optional label per mode (e.g. a frequency).
    """

    amplitudes: np.ndarray
    mode_labels: tuple = ()

    def __post_init__(self):
        amplitudes = np.array(np.ravel(self.amplitudes), dtype=np.complex128)
        if amplitudes.size < 1 or not np.any(np.abs(amplitudes) > 0):
            raise ZeroField("A field superposition needs at least one non-zero amplitude.")
        amplitudes.setflags(write=False)
        labels = tuple(self.mode_labels) or tuple(range(amplitudes.size))
        if len(labels) != amplitudes.size:
            raise DimMismatch(f"{len(labels)} labels for {amplitudes.size} modes.")
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "mode_labels", labels)

    @property
    def intensities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def intensity(m: ModeSuperposition, j: int) -> float:
    """I_j = |C_j|^2, the finite-mode form of the integral of |Phi_j|^2."""
    if not 0 <= j < m.amplitudes.size:
        raise IndexOutOfRange(f"Mode {j} outside 0..{m.amplitudes.size - 1}.")
    return float(abs(m.amplitudes[j]) ** 2)


def classical_born(m: ModeSuperposition) -> np.ndarray:
    intensities = m.intensities
    total = intensities.sum()
    if total <= 0:
        raise ZeroField("Total field intensity is zero.")
    return intensities / total


# ----------------------------
# Intra-system entanglement
# ----------------------------
def intra_entangled_state(dim_a: int, dim_b: int, amplitudes) -> StateVector:
    """Normalized vector of H_a ⊗ H_b from a dim_a x dim_b amplitude matrix."""
    amplitudes = np.asarray(amplitudes, dtype=np.complex128)
    if amplitudes.size != dim_a * dim_b:
        raise DimMismatch(f"Expected {dim_a * dim_b} amplitudes, got {amplitudes.size}.")
    if not np.any(np.abs(amplitudes) > 0):
        raise ZeroField("All field amplitudes are zero.")
    return normalize(amplitudes.reshape(dim_a * dim_b))


def schmidt_rank(psi: StateVector, dim_a: int, dim_b: int, atol: float = SCHMIDT_ATOL) -> int:
    if psi.dim != dim_a * dim_b:
        raise DimMismatch(f"State dimension {psi.dim} != {dim_a}x{dim_b}.")
    singular_values = np.linalg.svd(psi.amplitudes.reshape(dim_a, dim_b), compute_uv=False)
    return int(np.count_nonzero(singular_values > atol))


def intensity_correlation(s: BellScenario, field_state: StateVector, i: int, j: int) -> float:
    """
    Correlation of dichotomous analyzers A_i, B_j computed from the intensities
    I_ab = ||P_a P_b Psi||^2 of a classical field, normalized by total intensity.
    """
    if field_state.dim != s.dim:
        raise DimMismatch(f"Field dimension {field_state.dim} != scenario dimension {s.dim}.")
    a = (s.A1, s.A2)[i - 1].entries
    b = (s.B1, s.B2)[j - 1].entries
    eye = np.eye(s.dim)
    psi = field_state.amplitudes
    correlation = 0.0
    for sign_a in (1, -1):
        for sign_b in (1, -1):
            channel = ((eye + sign_a * a) / 2) @ ((eye + sign_b * b) / 2) @ psi
            correlation += sign_a * sign_b * float(np.vdot(channel, channel).real)
    return correlation / float(np.vdot(psi, psi).real)


def intensity_chsh(s: BellScenario, field_state: StateVector) -> float:
    e = {(i, j): intensity_correlation(s, field_state, i, j) for i in (1, 2) for j in (1, 2)}
    return 0.5 * (e[(1, 1)] + e[(1, 2)] + e[(2, 1)] - e[(2, 2)])


# ----------------------------
# Stochastic intensity models
# ----------------------------
class FieldKind(str, enum.Enum):
    DETERMINISTIC = "deterministic"
    THERMAL = "thermal"
    ANTI_CORRELATED = "anti-correlated"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class ClassicalFieldModel:
    """
    A sampler of per-trial, non-negative channel intensities.

    Fields:
        kind (FieldKind): Sampling law.
        means (tuple): Declared mean intensity per channel.
        correlated (bool): Thermal only; one exponential draw shared by all channels.
        total (float): Anti-correlated only; energy budget I_tot per trial.
        epsilon (float): Anti-correlated only; residual fraction left in the dark channel.
        jitter (float): Anti-correlated only; Gaussian spread of the bright channel,
            as a fraction of I_tot.
        table (ndarray): Custom only; recorded intensities, one row per trial.
    """

    kind: FieldKind
    means: tuple = ()
    correlated: bool = True
    total: float = 1.0
    epsilon: float = 0.01
    jitter: float = 0.05
    table: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", FieldKind(self.kind))
        if self.kind == FieldKind.ANTI_CORRELATED:
            if self.total <= 0 or not 0 <= self.epsilon < 0.5 or self.jitter < 0:
                raise ValueError("Anti-correlated field needs total > 0, 0 <= epsilon < 0.5, jitter >= 0.")
            object.__setattr__(self, "means", (self.total / 2, self.total / 2))
        elif self.kind == FieldKind.CUSTOM:
            table = np.atleast_2d(np.asarray(self.table, dtype=np.float64))
            if table.size == 0 or np.any(table < 0):
                raise ValueError("Custom intensity table must be non-empty and non-negative.")
            table.setflags(write=False)
            object.__setattr__(self, "table", table)
            object.__setattr__(self, "means", tuple(float(v) for v in table.mean(axis=0)))
        else:
            means = tuple(float(v) for v in self.means)
            if not means or any(v < 0 for v in means):
                raise ValueError("Field means must be a non-empty list of non-negative intensities.")
            object.__setattr__(self, "means", means)

    @property
    def channel_count(self) -> int:
        return len(self.means)

    @classmethod
    def deterministic(cls, means: Sequence[float]) -> "ClassicalFieldModel":
        return cls(kind=FieldKind.DETERMINISTIC, means=tuple(means))

    @classmethod
    def thermal(cls, means: Sequence[float], correlated: bool = True) -> "ClassicalFieldModel":
        return cls(kind=FieldKind.THERMAL, means=tuple(means), correlated=correlated)

    @classmethod
    def anti_correlated(
        cls, total: float = 1.0, epsilon: float = 0.01, jitter: float = 0.05
    ) -> "ClassicalFieldModel":
        return cls(kind=FieldKind.ANTI_CORRELATED, total=total, epsilon=epsilon, jitter=jitter)

    @classmethod
    def custom(cls, table) -> "ClassicalFieldModel":
        return cls(kind=FieldKind.CUSTOM, table=table)


@dataclass(frozen=True)
class IntensitySample:
    """
    Channel intensities of one trial.

    Fields:
        intensities (tuple): Non-negative intensity per channel.
        trial_index (int): Position of the trial in its run.
    """

    intensities: tuple
    trial_index: int = 0


def sample_batch(
    model: ClassicalFieldModel, rng: np.random.Generator, size: int, first_trial: int = 0
) -> np.ndarray:
    """Intensities of `size` consecutive trials, shape (size, channels)."""
    means = np.asarray(model.means)

    if model.kind == FieldKind.DETERMINISTIC:
        return np.broadcast_to(means, (size, means.size)).copy()

    if model.kind == FieldKind.THERMAL:
        if model.correlated:
            return rng.exponential(1.0, size=(size, 1)) * means
        return rng.exponential(1.0, size=(size, means.size)) * means

    if model.kind == FieldKind.ANTI_CORRELATED:
        bright_channel = rng.integers(0, 2, size=size)
        bright = model.total * (1 - model.epsilon) + rng.normal(
            0.0, model.jitter * model.total, size=size
        )
        intensities = np.full((size, 2), model.total * model.epsilon)
        intensities[np.arange(size), bright_channel] = np.maximum(bright, 0.0)
        return intensities

    rows = (first_trial + np.arange(size)) % model.table.shape[0]
    return model.table[rows].copy()


def sample(
    model: ClassicalFieldModel, rng: np.random.Generator, trial_index: int = 0
) -> IntensitySample:
    intensities = sample_batch(model, rng, 1, first_trial=trial_index)[0]
    return IntensitySample(intensities=tuple(float(v) for v in intensities), trial_index=trial_index)


def beam_splitter(intensities: np.ndarray, transmissivity: float = 0.5) -> np.ndarray:
    """Route the total intensity of each trial through a splitter: (T I, (1 - T) I)."""
    if not 0 <= transmissivity <= 1:
        raise ValueError(f"Transmissivity {transmissivity} outside [0, 1].")
    total = np.atleast_2d(intensities).sum(axis=1)
    return np.column_stack((transmissivity * total, (1 - transmissivity) * total))
