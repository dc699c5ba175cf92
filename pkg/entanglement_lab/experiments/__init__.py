"""
Experiment handlers, resolved by name through `entanglement_lab.utils.registry`.

Each module exposes SECTION, DESCRIPTION, DEFAULTS, run(config) -> dict and
csv_rows(results); click-based experiments also expose iter_raw_clicks(config).
"""

from entanglement_lab.serializers import DetectorSerializer, SourceSerializer
from entanglement_lab.stats import STATUS_OK, grangier_test

SUMMARY_HEADER = ["model", "N", "p1", "p2", "pc", "g2", "se_g2", "alpha", "verdict"]


def source_payload(config):
    return dict(SourceSerializer(config["source"]).data)


def detector_payload(config, **overrides):
    payload = dict(DetectorSerializer(config["detector"]).data)
    payload.update(overrides)
    return payload


def verdict_or_none(stats, sigma):
    """Grangier verdict, or None when a channel never clicked."""
    if stats.status != STATUS_OK:
        return None
    return grangier_test(stats, sigma)


def summary_row(label, stats, verdict):
    return [
        label,
        stats["trials"],
        stats["p1"],
        stats["p2"],
        stats["pc"],
        stats["g2"],
        stats["se_g2"],
        verdict["alpha"] if verdict else "",
        verdict["label"] if verdict else stats["status"],
    ]


def key_value_rows(results, prefix=""):
    rows = [["key", "value"]] if not prefix else []
    for key, value in results.items():
        path = f"{prefix}.{key}" if prefix else key
        if isinstance(value, dict):
            rows.extend(key_value_rows(value, path))
        elif isinstance(value, list):
            rows.append([path, " ".join(str(v) for v in value)])
        else:
            rows.append([path, value])
    return rows
