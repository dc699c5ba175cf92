"""
Threshold detection of a classical field: a channel clicks iff its intensity
exceeds theta. Anti-correlated fields then give g2(0) < 1 without any photon,
which the semiclassical reference run on the same field does not.
"""

import logging

from entanglement_lab.detection import iter_click_batches
from entanglement_lab.experiments import (
    SUMMARY_HEADER,
    detector_payload,
    source_payload,
    summary_row,
    verdict_or_none,
)
from entanglement_lab.fields import ClassicalFieldModel, FieldKind
from entanglement_lab.serializers import (
    DetectionStatsSerializer,
    GrangierVerdictSerializer,
    source_label,
)
from entanglement_lab.tasks import aggregate_trials, build_from_payloads

logger = logging.getLogger(__name__)

SECTION = "Appendix 2"
DESCRIPTION = "threshold detection of an anti-correlated classical field, g2(0) < 1"

DEFAULTS = {
    "source": {"kind": "field", "model": "anti-correlated"},
    "detector": {"model": "threshold"},
    "trials": 1_000_000,
    "splitter": None,
    "sigma": 3.0,
}

REFERENCE_DETECTOR = {
    "model": "semiclassical-poisson",
    "efficiency": 1.0,
    "gate_time": 0.1,
    "threshold": None,
    "dark_rate": 0.0,
}
REFERENCE_SPLITTER = 0.5


def default_threshold(model: ClassicalFieldModel) -> float:
    """Half the per-trial energy budget."""
    if model.kind == FieldKind.ANTI_CORRELATED:
        return model.total / 2
    return sum(model.means) / 2


def resolve_threshold(config):
    threshold = config["detector"].get("threshold")
    if threshold is None:
        source, _ = build_from_payloads(source_payload(config), detector_payload(config))
        threshold = default_threshold(source)
    return threshold


def run(config):
    label = source_label(config["source"])
    threshold = resolve_threshold(config)
    # the resolved config reports the theta actually used
    config["detector"] = {**config["detector"], "threshold": threshold}
    source_data = source_payload(config)
    detector_data = detector_payload(config, threshold=threshold)
    trials, seed = config["trials"], config["seed"]

    logger.info(f"Threshold run: {label} field, theta = {threshold}, {trials} trials.")
    stats = aggregate_trials(source_data, detector_data, trials, seed, config.get("splitter"))
    verdict = verdict_or_none(stats, config["sigma"])
    if stats.max_clicks > 1:
        logger.warning(f"{stats.multi_click_trials} trials clicked on more than one channel.")

    logger.info("Semiclassical reference run on the same field draws.")
    reference = aggregate_trials(source_data, REFERENCE_DETECTOR, trials, seed, REFERENCE_SPLITTER)
    reference_verdict = verdict_or_none(reference, config["sigma"])

    return {
        "model": label,
        "threshold": threshold,
        "single_click_structure": stats.max_clicks <= 1,
        "stats": DetectionStatsSerializer(stats).data,
        "verdict": GrangierVerdictSerializer(verdict).data if verdict else None,
        "reference": {
            "detector": REFERENCE_DETECTOR["model"],
            "splitter": REFERENCE_SPLITTER,
            "stats": DetectionStatsSerializer(reference).data,
            "verdict": GrangierVerdictSerializer(reference_verdict).data if reference_verdict else None,
        },
    }


def csv_rows(results):
    reference = results["reference"]
    return [
        SUMMARY_HEADER,
        summary_row(results["model"], results["stats"], results["verdict"]),
        summary_row(
            f"{results['model']}+{reference['detector']}", reference["stats"], reference["verdict"]
        ),
    ]


def iter_raw_clicks(config):
    detector_data = detector_payload(config, threshold=resolve_threshold(config))
    source, cfg = build_from_payloads(source_payload(config), detector_data)
    return iter_click_batches(source, cfg, config["trials"], config["seed"], config.get("splitter"))
