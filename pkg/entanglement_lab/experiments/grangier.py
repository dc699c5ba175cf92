import logging

from entanglement_lab.detection import DetectorModel, iter_click_batches
from entanglement_lab.experiments import (
    SUMMARY_HEADER,
    detector_payload,
    source_payload,
    summary_row,
    verdict_or_none,
)
from entanglement_lab.fields import ClassicalFieldModel, FieldKind
from entanglement_lab.hilbert import StateVector
from entanglement_lab.serializers import (
    DetectionStatsSerializer,
    GrangierVerdictSerializer,
    source_label,
)
from entanglement_lab.stats import thermal_alpha
from entanglement_lab.tasks import aggregate_trials, build_from_payloads

logger = logging.getLogger(__name__)

SECTION = "§4"
DESCRIPTION = "single-photon anticorrelation behind a beam splitter vs semiclassical fields"

DEFAULTS = {
    "source": {"kind": "single-photon"},
    "trials": 1_000_000,
    "splitter": 0.5,
    "sigma": 3.0,
}


def splitter_for(config):
    # a state vector already describes both output ports
    if config["source"]["kind"] != "field":
        return None
    return config.get("splitter")


def channel_intensities(model: ClassicalFieldModel, splitter):
    means = model.means
    if splitter is None:
        return means[0], means[1]
    total = sum(means)
    return splitter * total, (1 - splitter) * total


def expected_alpha(source, cfg, splitter):
    """
    Exact pc / (p1 p2) where a closed form exists, otherwise None.
    """
    if isinstance(source, StateVector):
        probabilities = source.probabilities()
        return 0.0 if probabilities[0] > 0 and probabilities[1] > 0 else None

    if cfg.model != DetectorModel.SEMICLASSICAL_POISSON or cfg.dark_rate > 0:
        return None
    if source.channel_count < 2 and splitter is None:
        return None
    i1, i2 = channel_intensities(source, splitter)
    if i1 <= 0 or i2 <= 0:
        return None

    if source.kind == FieldKind.DETERMINISTIC:
        return 1.0
    if source.kind == FieldKind.THERMAL and source.correlated:
        scale = cfg.efficiency * cfg.gate_time
        return thermal_alpha(scale * i1, scale * i2)
    if source.kind == FieldKind.THERMAL and splitter is None:
        return 1.0
    return None


def run(config):
    label = source_label(config["source"])
    splitter = splitter_for(config)
    source_data, detector_data = source_payload(config), detector_payload(config)
    source, cfg = build_from_payloads(source_data, detector_data)

    logger.info(
        f"Grangier run: {label} source, {cfg.model.value} detector, "
        f"{config['trials']} trials, splitter {splitter}."
    )
    stats = aggregate_trials(source_data, detector_data, config["trials"], config["seed"], splitter)
    verdict = verdict_or_none(stats, config["sigma"])
    if verdict is None:
        logger.warning(f"A channel never clicked in {stats.trials} trials; g2 is undefined.")
    else:
        logger.info(f"alpha = {verdict.alpha:.4f} ± {verdict.se:.4f} ({verdict.label})")

    return {
        "model": label,
        "stats": DetectionStatsSerializer(stats).data,
        "verdict": GrangierVerdictSerializer(verdict).data if verdict else None,
        "expected_alpha": expected_alpha(source, cfg, splitter),
    }


def csv_rows(results):
    return [SUMMARY_HEADER, summary_row(results["model"], results["stats"], results["verdict"])]


def iter_raw_clicks(config):
    source, cfg = build_from_payloads(source_payload(config), detector_payload(config))
    return iter_click_batches(source, cfg, config["trials"], config["seed"], splitter_for(config))
