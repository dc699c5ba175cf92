import json
import re

from rest_framework import serializers

from entanglement_lab.utils.rng import MAX_SEED

STOCHASTIC_EXPERIMENTS = {"grangier", "chsh-counts", "threshold", "lhv"}


def validate_seed(value: int) -> int:
    """Validate a 64-bit unsigned seed."""
    if value is not None and not 0 <= value <= MAX_SEED:
        raise serializers.ValidationError("Seed must be a 64-bit unsigned integer.")
    return value


def validate_amplitudes(value: list) -> list:
    """Validate that at least one amplitude is non-zero."""
    if not value:
        raise serializers.ValidationError("At least one amplitude is required.")
    if all(abs(c) == 0 for c in value):
        raise serializers.ValidationError("Amplitudes must not all be zero.")
    return value


def validate_non_negative_list(value: list) -> list:
    """Validate a non-empty list of non-negative reals."""
    if not value:
        raise serializers.ValidationError("At least one value is required.")
    if any(v < 0 for v in value):
        raise serializers.ValidationError("Values must be non-negative.")
    return value


def validate_source_consistency(attrs):
    """Ensure the fields required by each source kind are present."""
    kind = attrs.get("kind")

    if kind == "state" and not attrs.get("amplitudes"):
        raise serializers.ValidationError(
            {"amplitudes": "A state source requires amplitudes."}
        )

    if kind == "field":
        model = attrs.get("model")
        if not model:
            raise serializers.ValidationError(
                {"model": "A field source requires a model."}
            )
        if model in ("deterministic", "thermal") and not attrs.get("means"):
            raise serializers.ValidationError(
                {"means": f"A {model} field requires per-channel means."}
            )
        if model == "custom" and not attrs.get("table"):
            raise serializers.ValidationError(
                {"table": "A custom field requires an intensity table path."}
            )
    return attrs


def validate_seed_presence(attrs):
    """Stochastic experiments must be seeded explicitly."""
    if attrs.get("experiment") in STOCHASTIC_EXPERIMENTS and attrs.get("seed") is None:
        raise serializers.ValidationError(
            {"seed": f"A seed is required for the {attrs['experiment']} experiment."}
        )
    return attrs


def flatten_errors(detail, prefix=""):
    """
    Flatten nested serializer errors into (field path, message) pairs, e.g.
    ("source.means", "Values must be non-negative.").
    """
    if isinstance(detail, dict):
        pairs = []
        for key, value in detail.items():
            path = f"{prefix}.{key}" if prefix else str(key)
            pairs.extend(flatten_errors(value, path))
        return pairs
    if isinstance(detail, list):
        if all(not isinstance(item, (dict, list)) for item in detail):
            return [(prefix or "config", str(item)) for item in detail]
        pairs = []
        for index, item in enumerate(detail):
            if item:
                pairs.extend(flatten_errors(item, f"{prefix}[{index}]"))
        return pairs
    return [(prefix or "config", str(detail))]


def locate_line(raw_text, path):
    """
    Line number (1-based) of the deepest key of `path` found in the raw JSON text,
    following the path's keys in order. None when no key can be found.
    """
    if not raw_text:
        return None
    position, found = 0, None
    for key in re.findall(r"[A-Za-z_][\w-]*", path):
        match = re.compile(rf'"{re.escape(key)}"\s*:').search(raw_text, position)
        if not match:
            break
        position, found = match.end(), match.start()
    if found is None:
        return None
    return raw_text.count("\n", 0, found) + 1


def parse_config_text(raw_text):
    """Parse a JSON config document, reporting syntax errors with their line."""
    try:
        document = json.loads(raw_text)
    except json.JSONDecodeError as e:
        raise serializers.ValidationError(
            {"config": f"Invalid JSON: {e.msg} (line {e.lineno})"}
        )
    if not isinstance(document, dict):
        raise serializers.ValidationError(
            {"config": "The config document must be a JSON object (line 1)"}
        )
    return document
