"""
Detector models: quantum Born-rule click sampling, semiclassical Poisson
conversion of intensities into photoelectrons, and threshold detection.

Every detector has a batch form working on numpy arrays; the per-trial
operations are its size-1 case.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np
from django.conf import settings

from entanglement_lab.exceptions import IncompatibleSourceDetector
from entanglement_lab.fields import (
    ClassicalFieldModel,
    IntensitySample,
    beam_splitter,
    sample_batch,
)
from entanglement_lab.hilbert import StateVector
from entanglement_lab.stats import DetectionStats, accumulate
from entanglement_lab.utils.rng import chunk_layout, stream

logger = logging.getLogger(__name__)

Source = Union[StateVector, ClassicalFieldModel]


class DetectorModel(str, enum.Enum):
    QUANTUM_BORN = "quantum-born"
    SEMICLASSICAL_POISSON = "semiclassical-poisson"
    THRESHOLD = "threshold"


@dataclass(frozen=True)
class DetectorConfig:
    """
    Detector settings.

    Fields:
        model (DetectorModel): Detection law.
        efficiency (float): Quantum efficiency eta in (0, 1]; semiclassical only.
        gate_time (float): Gate duration dt; semiclassical only.
        threshold (float): Intensity threshold theta >= 0; threshold only.
        dark_rate (float): Dark-count rate added to eta * I; semiclassical only.
    """

    model: DetectorModel
    efficiency: float = 1.0
    gate_time: float = 0.1
    threshold: float = 0.5
    dark_rate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "model", DetectorModel(self.model))
        if not 0 < self.efficiency <= 1:
            raise ValueError(f"Efficiency {self.efficiency} outside (0, 1].")
        if self.gate_time <= 0:
            raise ValueError(f"Gate time {self.gate_time} must be positive.")
        if self.threshold < 0:
            raise ValueError(f"Threshold {self.threshold} must be non-negative.")
        if self.dark_rate < 0:
            raise ValueError(f"Dark-count rate {self.dark_rate} must be non-negative.")


@dataclass(frozen=True)
class ClickRecord:
    """
    Detector outcomes of one trial.

    Fields:
        trial_index (int): Position of the trial in its run.
        clicks (tuple): One boolean per channel.
    """

    trial_index: int
    clicks: tuple

    def __post_init__(self):
        object.__setattr__(self, "clicks", tuple(bool(c) for c in self.clicks))


@dataclass(frozen=True, eq=False)
class ClickBatch:
    """Clicks of consecutive trials starting at `first_trial`, shape (trials, channels)."""

    first_trial: int
    clicks: np.ndarray

    def __len__(self):
        return int(self.clicks.shape[0])

    def records(self) -> Iterator[ClickRecord]:
        for offset, row in enumerate(self.clicks):
            yield ClickRecord(trial_index=self.first_trial + offset, clicks=tuple(row.tolist()))


# ----------------------------
# Detectors
# ----------------------------
def quantum_detect_batch(psi: StateVector, rng: np.random.Generator, size: int) -> np.ndarray:
    """Exactly one click per trial, channel j with probability |c_j|^2."""
    cumulative = np.cumsum(psi.probabilities())
    channel = np.searchsorted(cumulative, rng.random(size), side="right")
    channel = np.minimum(channel, psi.dim - 1)
    clicks = np.zeros((size, psi.dim), dtype=bool)
    clicks[np.arange(size), channel] = True
    return clicks


def quantum_detect(psi: StateVector, rng: np.random.Generator, trial_index: int = 0) -> ClickRecord:
    return ClickRecord(trial_index=trial_index, clicks=tuple(quantum_detect_batch(psi, rng, 1)[0]))


def click_probabilities(intensities: np.ndarray, cfg: DetectorConfig) -> np.ndarray:
    rate = cfg.efficiency * np.asarray(intensities) + cfg.dark_rate
    return -np.expm1(-rate * cfg.gate_time)


def semiclassical_detect_batch(
    intensities: np.ndarray, cfg: DetectorConfig, rng: np.random.Generator
) -> np.ndarray:
    """Independent clicks given the intensities, P(click) = 1 - exp(-(eta I + dark) dt)."""
    intensities = np.atleast_2d(intensities)
    return rng.random(intensities.shape) < click_probabilities(intensities, cfg)


def semiclassical_detect(
    s: IntensitySample, cfg: DetectorConfig, rng: np.random.Generator
) -> ClickRecord:
    clicks = semiclassical_detect_batch(np.array([s.intensities]), cfg, rng)[0]
    return ClickRecord(trial_index=s.trial_index, clicks=tuple(clicks))


def threshold_detect_batch(intensities: np.ndarray, cfg: DetectorConfig) -> np.ndarray:
    return np.atleast_2d(intensities) > cfg.threshold


def threshold_detect(s: IntensitySample, cfg: DetectorConfig) -> ClickRecord:
    clicks = threshold_detect_batch(np.array([s.intensities]), cfg)[0]
    return ClickRecord(trial_index=s.trial_index, clicks=tuple(clicks))


# ----------------------------
# Runs
# ----------------------------
def check_compatible(source: Source, cfg: DetectorConfig) -> None:
    if cfg.model == DetectorModel.QUANTUM_BORN and not isinstance(source, StateVector):
        raise IncompatibleSourceDetector(
            "The quantum-born detector needs a state vector source, not a classical field."
        )
    if cfg.model != DetectorModel.QUANTUM_BORN and not isinstance(source, ClassicalFieldModel):
        raise IncompatibleSourceDetector(
            f"The {cfg.model.value} detector needs a classical field source, not a state vector."
        )


def simulate_chunk(
    source: Source,
    cfg: DetectorConfig,
    seed: int,
    chunk: int,
    first_trial: int,
    size: int,
    splitter: Optional[float] = None,
) -> ClickBatch:
    """Clicks of one chunk; depends only on (seed, chunk) and the configuration."""
    check_compatible(source, cfg)
    detector_rng = stream(seed, chunk, "detector")

    if cfg.model == DetectorModel.QUANTUM_BORN:
        return ClickBatch(first_trial, quantum_detect_batch(source, detector_rng, size))

    intensities = sample_batch(source, stream(seed, chunk, "field"), size, first_trial)
    if splitter is not None:
        intensities = beam_splitter(intensities, splitter)
    if cfg.model == DetectorModel.THRESHOLD:
        return ClickBatch(first_trial, threshold_detect_batch(intensities, cfg))
    return ClickBatch(first_trial, semiclassical_detect_batch(intensities, cfg, detector_rng))


def iter_click_batches(
    source: Source,
    cfg: DetectorConfig,
    trials: int,
    seed: int,
    splitter: Optional[float] = None,
) -> Iterator[ClickBatch]:
    if trials < 1:
        raise ValueError("A run needs at least one trial.")
    check_compatible(source, cfg)
    for chunk, first_trial, size in chunk_layout(trials):
        yield simulate_chunk(source, cfg, seed, chunk, first_trial, size, splitter)


def run_experiment(
    source: Source,
    cfg: DetectorConfig,
    trials: int,
    seed: int,
    splitter: Optional[float] = None,
    aggregate: Optional[bool] = None,
) -> Union[list[ClickRecord], DetectionStats]:
    """
    Simulate `trials` trials. Returns the click records, or, in aggregation mode
    (forced, or above LAB_AGGREGATION_THRESHOLD trials), their DetectionStats.
    """
    if aggregate is None:
        aggregate = trials > settings.LAB_AGGREGATION_THRESHOLD
    batches = iter_click_batches(source, cfg, trials, seed, splitter)
    if aggregate:
        logger.info(f"Aggregating {trials} trials without materializing records.")
        return accumulate(batches)
    return [record for batch in batches for record in batch.records()]
