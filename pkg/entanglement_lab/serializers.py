"""
Serializers for experiment configuration (input) and results (output).

Input serializers validate a JSON config document and build the domain
objects it describes; output serializers turn domain results into plain
JSON-ready data.
"""

import numpy as np
from rest_framework import serializers

from entanglement_lab.bell import SCENARIO_PRESETS
from entanglement_lab.detection import DetectorConfig, DetectorModel
from entanglement_lab.fields import ClassicalFieldModel, FieldKind
from entanglement_lab.hilbert import normalize
from entanglement_lab.utils.file_handler import read_intensity_table, to_local_path
from entanglement_lab.utils.registry import EXPERIMENT_NAMES
from entanglement_lab.utils.rng import MAX_SEED
from entanglement_lab.utils.validators import (
    validate_amplitudes,
    validate_non_negative_list,
    validate_seed,
    validate_seed_presence,
    validate_source_consistency,
)

SINGLE_PHOTON = (1.0, 1.0)

# Shorthands accepted by `run --source`.
SOURCE_PRESETS = {
    "single-photon": {"kind": "single-photon"},
    "deterministic": {"kind": "field", "model": "deterministic", "means": [1.0, 1.0]},
    "thermal": {"kind": "field", "model": "thermal", "means": [1.0, 1.0]},
    "anti-correlated": {"kind": "field", "model": "anti-correlated"},
}


class ComplexPairField(serializers.Field):
    """A complex number written as [re, im] (a bare real is also accepted)."""

    default_error_messages = {
        "invalid": "Expected a number or a [re, im] pair.",
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail("invalid")
        if isinstance(data, (int, float)):
            return complex(data, 0.0)
        if isinstance(data, (list, tuple)) and len(data) == 2:
            try:
                value = complex(float(data[0]), float(data[1]))
            except (TypeError, ValueError):
                self.fail("invalid")
            if not np.isfinite(value.real) or not np.isfinite(value.imag):
                self.fail("invalid")
            return value
        self.fail("invalid")

    def to_representation(self, value):
        value = complex(value)
        return [value.real, value.imag]


# ----------------------------
# Configuration
# ----------------------------
class SourceSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=["single-photon", "state", "field"])
    amplitudes = serializers.ListField(
        child=ComplexPairField(), required=False, validators=[validate_amplitudes]
    )
    model = serializers.ChoiceField(choices=[k.value for k in FieldKind], required=False)
    means = serializers.ListField(
        child=serializers.FloatField(), required=False, validators=[validate_non_negative_list]
    )
    correlated = serializers.BooleanField(required=False, default=True)
    total = serializers.FloatField(required=False, default=1.0, min_value=0.0)
    epsilon = serializers.FloatField(required=False, default=0.01, min_value=0.0, max_value=0.49)
    jitter = serializers.FloatField(required=False, default=0.05, min_value=0.0)
    table = serializers.CharField(required=False)

    def validate_table(self, value):
        return to_local_path(value, self.context.get("base_dir"))

    def validate(self, attrs):
        return validate_source_consistency(attrs)

    def build(self):
        return build_source(self.validated_data)


def build_source(attrs):
    """StateVector or ClassicalFieldModel described by validated source attributes."""
    kind = attrs["kind"]
    if kind == "single-photon":
        return normalize(SINGLE_PHOTON)
    if kind == "state":
        return normalize(attrs["amplitudes"])

    model = FieldKind(attrs["model"])
    if model == FieldKind.DETERMINISTIC:
        return ClassicalFieldModel.deterministic(attrs["means"])
    if model == FieldKind.THERMAL:
        return ClassicalFieldModel.thermal(attrs["means"], correlated=attrs.get("correlated", True))
    if model == FieldKind.ANTI_CORRELATED:
        return ClassicalFieldModel.anti_correlated(
            total=attrs.get("total", 1.0),
            epsilon=attrs.get("epsilon", 0.01),
            jitter=attrs.get("jitter", 0.05),
        )
    return ClassicalFieldModel.custom(read_intensity_table(attrs["table"]))


def source_label(attrs):
    return attrs["kind"] if attrs["kind"] != "field" else attrs["model"]


class DetectorSerializer(serializers.Serializer):
    model = serializers.ChoiceField(choices=[m.value for m in DetectorModel])
    efficiency = serializers.FloatField(required=False, default=1.0, min_value=1e-12, max_value=1.0)
    gate_time = serializers.FloatField(required=False, default=0.1, min_value=1e-12)
    threshold = serializers.FloatField(required=False, allow_null=True, default=None, min_value=0.0)
    dark_rate = serializers.FloatField(required=False, default=0.0, min_value=0.0)


def build_detector(attrs, default_threshold=0.5):
    threshold = attrs.get("threshold")
    return DetectorConfig(
        model=attrs["model"],
        efficiency=attrs.get("efficiency", 1.0),
        gate_time=attrs.get("gate_time", 0.1),
        threshold=default_threshold if threshold is None else threshold,
        dark_rate=attrs.get("dark_rate", 0.0),
    )


def default_detector(source_attrs):
    """Born-rule clicks for state sources, Poisson conversion for classical fields."""
    model = DetectorModel.QUANTUM_BORN if source_attrs["kind"] != "field" else (
        DetectorModel.SEMICLASSICAL_POISSON
    )
    return {
        "model": model.value,
        "efficiency": 1.0,
        "gate_time": 0.1,
        "threshold": None,
        "dark_rate": 0.0,
    }


class OutputSerializer(serializers.Serializer):
    path = serializers.CharField(required=False, allow_null=True, default=None)
    format = serializers.ChoiceField(choices=["json", "csv"], required=False, default="json")


class ExperimentConfigSerializer(serializers.Serializer):
    experiment = serializers.ChoiceField(choices=EXPERIMENT_NAMES)
    source = SourceSerializer(required=False)
    detector = DetectorSerializer(required=False)
    scenario = serializers.ChoiceField(choices=SCENARIO_PRESETS, required=False, default="optimal")
    trials = serializers.IntegerField(required=False, default=1_000_000, min_value=1)
    seed = serializers.IntegerField(
        required=False, allow_null=True, default=None, min_value=0, max_value=MAX_SEED,
        validators=[validate_seed],
    )
    models = serializers.IntegerField(required=False, default=100_000, min_value=1)
    mixture_size = serializers.IntegerField(required=False, default=16, min_value=1)
    splitter = serializers.FloatField(
        required=False, allow_null=True, default=None, min_value=0.0, max_value=1.0
    )
    sigma = serializers.FloatField(required=False, default=3.0, min_value=0.0)
    raw_clicks = serializers.BooleanField(required=False, default=False)
    output = OutputSerializer(required=False)

    def validate(self, attrs):
        attrs = validate_seed_presence(attrs)
        source, detector = attrs.get("source"), attrs.get("detector")
        if source and not detector:
            attrs["detector"] = default_detector(source)
        elif source and detector:
            quantum_source = source["kind"] != "field"
            quantum_detector = detector["model"] == DetectorModel.QUANTUM_BORN.value
            if quantum_source != quantum_detector:
                raise serializers.ValidationError(
                    {
                        "detector": f"Detector '{detector['model']}' cannot observe a "
                        f"'{source_label(source)}' source."
                    }
                )
        return attrs


# ----------------------------
# Results
# ----------------------------
class DetectionStatsSerializer(serializers.Serializer):
    trials = serializers.IntegerField()
    singles = serializers.ListField(child=serializers.IntegerField())
    coincidences = serializers.IntegerField()
    multi_click_trials = serializers.IntegerField()
    empty_trials = serializers.IntegerField()
    max_clicks = serializers.IntegerField()
    p1 = serializers.FloatField()
    p2 = serializers.FloatField()
    pc = serializers.FloatField()
    g2 = serializers.FloatField(allow_null=True)
    se_g2 = serializers.FloatField(allow_null=True)
    status = serializers.CharField()


class GrangierVerdictSerializer(serializers.Serializer):
    alpha = serializers.FloatField()
    se = serializers.FloatField()
    confidence_sigma = serializers.FloatField()
    classical_compatible = serializers.BooleanField()
    label = serializers.CharField()


class ChshReportSerializer(serializers.Serializer):
    bell_norm = serializers.FloatField()
    landau_residual = serializers.FloatField()
    commutator_A_norm = serializers.FloatField()
    commutator_B_norm = serializers.FloatField()
    permutation_max = serializers.FloatField()
    permutation = serializers.CharField()
    classification = serializers.SerializerMethodField()

    def get_classification(self, obj):
        return obj.classification.value


class SettingCountsSerializer(serializers.Serializer):
    n_pp = serializers.IntegerField()
    n_pm = serializers.IntegerField()
    n_mp = serializers.IntegerField()
    n_mm = serializers.IntegerField()
    n_null = serializers.IntegerField()
    total = serializers.IntegerField()
    correlation = serializers.FloatField()
    correlation_se = serializers.FloatField()


class ChshEstimateSerializer(serializers.Serializer):
    value = serializers.FloatField()
    se = serializers.FloatField()
    correlations = serializers.SerializerMethodField()

    def get_correlations(self, obj):
        return {f"A{i}B{j}": value for (i, j), value in sorted(obj.correlations.items())}
