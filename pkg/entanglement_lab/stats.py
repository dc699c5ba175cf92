"""
Click statistics: singles, coincidences, g2(0), the Grangier anticorrelation
test, and count-based CHSH estimates.

g2 standard error (first-order delta method). With per-trial indicators
X1, X2 and Xc = X1*X2 of means p1, p2, pc, the estimator a = pc / (p1 p2) has

    var(a) = g' S g / N,   g = (-a/p1, -a/p2, 1/(p1 p2))

where S is the per-trial covariance of (X1, X2, Xc):

    S11 = p1(1-p1)   S22 = p2(1-p2)   Scc = pc(1-pc)
    S12 = pc - p1 p2 S1c = pc(1-p1)   S2c = pc(1-p2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from entanglement_lab.exceptions import (
    ChannelCountMismatch,
    EmptyRecordStream,
    EmptySetting,
    UndefinedRatio,
)

STATUS_OK = "ok"
STATUS_INSUFFICIENT = "insufficient-data"


@dataclass(frozen=True)
class DetectionStats:
    """
    Aggregated click counts of a detection run.

    Fields:
        trials (int): Number of trials N.
        singles (tuple): Click count of each channel.
        coincidences (int): Trials where channels 1 and 2 both clicked.
        multi_click_trials (int): Trials with two or more clicks on any channels.
        empty_trials (int): Trials without any click.
        max_clicks (int): Largest number of clicks seen in one trial.
    """

    trials: int
    singles: tuple[int, ...]
    coincidences: int
    multi_click_trials: int = 0
    empty_trials: int = 0
    max_clicks: int = 0

    def __post_init__(self):
        object.__setattr__(self, "singles", tuple(int(n) for n in self.singles))
        if len(self.singles) < 2:
            raise ChannelCountMismatch("Coincidence statistics need at least two channels.")

    @property
    def channels(self) -> int:
        return len(self.singles)

    @property
    def n1(self) -> int:
        return self.singles[0]

    @property
    def n2(self) -> int:
        return self.singles[1]

    @property
    def p1(self) -> float:
        return self.n1 / self.trials

    @property
    def p2(self) -> float:
        return self.n2 / self.trials

    @property
    def pc(self) -> float:
        return self.coincidences / self.trials

    @property
    def status(self) -> str:
        return STATUS_OK if self.n1 > 0 and self.n2 > 0 else STATUS_INSUFFICIENT

    @property
    def g2(self) -> Optional[float]:
        if self.status != STATUS_OK:
            return None
        return self.pc / (self.p1 * self.p2)

    @property
    def se_g2(self) -> Optional[float]:
        if self.status != STATUS_OK:
            return None
        p1, p2, pc, alpha = self.p1, self.p2, self.pc, self.g2
        gradient = np.array([-alpha / p1, -alpha / p2, 1.0 / (p1 * p2)])
        covariance = np.array(
            [
                [p1 * (1 - p1), pc - p1 * p2, pc * (1 - p1)],
                [pc - p1 * p2, p2 * (1 - p2), pc * (1 - p2)],
                [pc * (1 - p1), pc * (1 - p2), pc * (1 - pc)],
            ]
        )
        variance = float(gradient @ covariance @ gradient) / self.trials
        return math.sqrt(max(variance, 0.0))

    def merge(self, other: "DetectionStats") -> "DetectionStats":
        if other.channels != self.channels:
            raise ChannelCountMismatch(
                f"Cannot merge {self.channels}-channel and {other.channels}-channel stats."
            )
        return DetectionStats(
            trials=self.trials + other.trials,
            singles=tuple(a + b for a, b in zip(self.singles, other.singles)),
            coincidences=self.coincidences + other.coincidences,
            multi_click_trials=self.multi_click_trials + other.multi_click_trials,
            empty_trials=self.empty_trials + other.empty_trials,
            max_clicks=max(self.max_clicks, other.max_clicks),
        )

    def to_counts(self) -> dict:
        return {
            "trials": self.trials,
            "singles": list(self.singles),
            "coincidences": self.coincidences,
            "multi_click_trials": self.multi_click_trials,
            "empty_trials": self.empty_trials,
            "max_clicks": self.max_clicks,
        }

    @classmethod
    def from_counts(cls, payload: Mapping) -> "DetectionStats":
        return cls(
            trials=int(payload["trials"]),
            singles=tuple(payload["singles"]),
            coincidences=int(payload["coincidences"]),
            multi_click_trials=int(payload.get("multi_click_trials", 0)),
            empty_trials=int(payload.get("empty_trials", 0)),
            max_clicks=int(payload.get("max_clicks", 0)),
        )


@dataclass(frozen=True)
class GrangierVerdict:
    """
    Outcome of the anticorrelation criterion pc >= p1 p2.

    Fields:
        alpha (float): pc / (p1 p2).
        se (float): Standard error of alpha.
        confidence_sigma (float): Number of standard errors tolerated below 1.
        classical_compatible (bool): alpha >= 1 - confidence_sigma * se.
    """

    alpha: float
    se: float
    confidence_sigma: float
    classical_compatible: bool

    @property
    def label(self) -> str:
        return "classical" if self.classical_compatible else "nonclassical"


@dataclass(frozen=True)
class SettingCounts:
    """
    Outcome-pair counts for one (A_i, B_j) setting.

    Fields:
        n_pp, n_pm, n_mp, n_mm (int): Counts of (+,+), (+,-), (-,+), (-,-).
        n_null (int): Runs where a party returned no outcome.
    """

    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int
    n_null: int = 0

    @property
    def total(self) -> int:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm + self.n_null

    @property
    def correlation(self) -> float:
        if self.total < 1:
            raise EmptySetting("Setting has no counted runs.")
        return (self.n_pp - self.n_pm - self.n_mp + self.n_mm) / self.total

    @property
    def correlation_se(self) -> float:
        detected = (self.total - self.n_null) / self.total
        variance = max(detected - self.correlation**2, 0.0)
        return math.sqrt(variance / self.total)

    @classmethod
    def from_outcomes(cls, a: np.ndarray, b: np.ndarray) -> "SettingCounts":
        a, b = np.asarray(a), np.asarray(b)
        detected = (a != 0) & (b != 0)
        return cls(
            n_pp=int(np.count_nonzero(detected & (a > 0) & (b > 0))),
            n_pm=int(np.count_nonzero(detected & (a > 0) & (b < 0))),
            n_mp=int(np.count_nonzero(detected & (a < 0) & (b > 0))),
            n_mm=int(np.count_nonzero(detected & (a < 0) & (b < 0))),
            n_null=int(np.count_nonzero(~detected)),
        )


@dataclass(frozen=True)
class ChshEstimate:
    value: float
    se: float
    correlations: dict = field(default_factory=dict)


# ----------------------------
# Operations
# ----------------------------
def _batch_stats(clicks: np.ndarray) -> DetectionStats:
    clicks = np.atleast_2d(np.asarray(clicks, dtype=bool))
    per_trial = clicks.sum(axis=1)
    return DetectionStats(
        trials=int(clicks.shape[0]),
        singles=tuple(int(n) for n in clicks.sum(axis=0)),
        coincidences=int(np.count_nonzero(clicks[:, 0] & clicks[:, 1])),
        multi_click_trials=int(np.count_nonzero(per_trial >= 2)),
        empty_trials=int(np.count_nonzero(per_trial == 0)),
        max_clicks=int(per_trial.max(initial=0)),
    )


def accumulate(records: Iterable) -> DetectionStats:
    """
    Count clicks over click records or click batches (anything with a `clicks`
    attribute holding one row per trial).
    """
    total = None
    for item in records:
        partial = _batch_stats(item.clicks)
        if total is not None and partial.channels != total.channels:
            raise ChannelCountMismatch(
                f"Record with {partial.channels} channels in a {total.channels}-channel stream."
            )
        total = partial if total is None else total.merge(partial)
    if total is None or total.trials < 1:
        raise EmptyRecordStream("No click records to accumulate.")
    return total


def merge_all(parts: Iterable[DetectionStats]) -> DetectionStats:
    total = None
    for part in parts:
        total = part if total is None else total.merge(part)
    if total is None:
        raise EmptyRecordStream("No partial statistics to merge.")
    return total


def grangier_test(st: DetectionStats, sigma: float = 3.0) -> GrangierVerdict:
    if st.status != STATUS_OK:
        raise UndefinedRatio(
            f"p1 * p2 = 0 (singles {st.n1}, {st.n2}); the coincidence ratio is undefined."
        )
    alpha, se = st.g2, st.se_g2
    return GrangierVerdict(
        alpha=alpha,
        se=se,
        confidence_sigma=sigma,
        classical_compatible=alpha >= 1 - sigma * se,
    )


def chsh_from_counts(counts: Mapping[tuple[int, int], SettingCounts]) -> ChshEstimate:
    missing = [key for key in ((1, 1), (1, 2), (2, 1), (2, 2)) if key not in counts]
    if missing:
        raise EmptySetting(f"Missing settings {missing}.")
    for key, setting in counts.items():
        if setting.total < 1:
            raise EmptySetting(f"Setting {key} has no counted runs.")
    e = {key: counts[key].correlation for key in counts}
    value = 0.5 * abs(e[(1, 1)] + e[(1, 2)] + e[(2, 1)] - e[(2, 2)])
    se = 0.5 * math.sqrt(sum(counts[key].correlation_se ** 2 for key in e))
    return ChshEstimate(value=value, se=se, correlations=e)


def thermal_alpha(coupling: float, other: Optional[float] = None) -> float:
    """
    Exact pc / (p1 p2) for correlated single-mode thermal light under Poisson
    conversion, with mean coupling c = eta * <I> * dt on channel 1 (and `other`
    on channel 2, default equal). Tends to 2 as both couplings go to 0.
    """
    c1 = float(coupling)
    c2 = c1 if other is None else float(other)
    if c1 <= 0 or c2 <= 0:
        raise UndefinedRatio("Thermal coincidence ratio needs positive couplings.")
    p1 = 1 - 1 / (1 + c1)
    p2 = 1 - 1 / (1 + c2)
    pc = 1 - 1 / (1 + c1) - 1 / (1 + c2) + 1 / (1 + c1 + c2)
    return pc / (p1 * p2)
