import csv
import io
import json
import logging
import os

from django.core.management.base import BaseCommand, CommandError
from django.utils import timezone
from rest_framework import serializers

from entanglement_lab.bell import SCENARIO_PRESETS
from entanglement_lab.exceptions import ConfigurationError, NumericalError
from entanglement_lab.serializers import SOURCE_PRESETS, ExperimentConfigSerializer
from entanglement_lab.utils.file_handler import (
    atomic_write,
    clicks_path,
    to_local_path,
    write_click_csv,
)
from entanglement_lab.utils.registry import (
    EXPERIMENT_NAMES,
    build_csv_rows,
    get_experiment_defaults,
    iter_raw_clicks,
    run_experiment_handler,
    supports_raw_clicks,
)
from entanglement_lab.utils.validators import flatten_errors, locate_line, parse_config_text

logger = logging.getLogger("entanglement_lab.run")

CONFIG_ERROR = 2
NUMERICAL_ERROR = 3


class Command(BaseCommand):
    help = "Run a named experiment and write its results as JSON or CSV"
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("experiment", choices=EXPERIMENT_NAMES)
        parser.add_argument("--config", help="JSON config document; flags override its fields")
        parser.add_argument("--seed", type=int, help="64-bit unsigned seed")
        parser.add_argument("--trials", type=int, help="Number of trials (per setting for chsh-counts)")
        parser.add_argument("--out", help="Output path (stdout when omitted)")
        parser.add_argument("--format", choices=["json", "csv"], help="Output format")
        parser.add_argument(
            "--raw-clicks",
            action="store_true",
            help="Also write every trial's clicks to <out stem>.clicks.csv",
        )
        parser.add_argument("--scenario", choices=SCENARIO_PRESETS, help="Preset Bell scenario")
        parser.add_argument("--source", choices=sorted(SOURCE_PRESETS), help="Preset source")
        parser.add_argument("--models", type=int, help="Number of random LHV mixtures")
        parser.add_argument("--threshold", type=float, help="Threshold detector intensity theta")
        parser.add_argument(
            "--no-timestamp",
            action="store_true",
            help="Leave generated_at out of the JSON output",
        )

    def handle(self, *args, **options):
        name = options["experiment"]
        raw_text = None
        try:
            document, raw_text, base_dir = self.read_document(options)
            config = self.resolve(name, document, options, base_dir)
        except serializers.ValidationError as e:
            raise CommandError(self.format_errors(e.detail, raw_text), returncode=CONFIG_ERROR)

        if config.get("raw_clicks"):
            if not supports_raw_clicks(name):
                raise CommandError(f"{name} does not produce click records.", returncode=CONFIG_ERROR)
            if not (config.get("output") or {}).get("path"):
                raise CommandError("--raw-clicks needs an output path (--out).", returncode=CONFIG_ERROR)

        logger.info(f"Running {name}.")
        try:
            results = run_experiment_handler(name, config)
        except (ConfigurationError, serializers.ValidationError) as e:
            logger.error(f"Configuration error in {name}: {e}")
            raise CommandError(str(e), returncode=CONFIG_ERROR)
        except NumericalError as e:
            logger.exception(f"Numerical failure in {name}: {e}")
            raise CommandError(f"{type(e).__name__}: {e}", returncode=NUMERICAL_ERROR)

        output = config.get("output") or {}
        path, fmt = output.get("path"), output.get("format", "json")
        resolved = dict(ExperimentConfigSerializer(config).data)
        if fmt == "csv":
            text = self.render_csv(name, results)
        else:
            text = self.render_json(name, resolved, results, options["no_timestamp"])

        if path:
            atomic_write(path, text)
            self.stdout.write(self.style.SUCCESS(f"Wrote {name} results to {path}"))
        else:
            self.stdout.write(text, ending="")

        if config.get("raw_clicks"):
            self.write_raw_clicks(name, config, path)
        logger.info(f"{name} finished.")

    def read_document(self, options):
        if not options.get("config"):
            return {}, None, None
        path = to_local_path(options["config"])
        try:
            with open(path, encoding="utf-8") as f:
                raw_text = f.read()
        except OSError as e:
            raise CommandError(f"Cannot read config {path}: {e}", returncode=CONFIG_ERROR)
        return parse_config_text(raw_text), raw_text, os.path.dirname(path)

    def resolve(self, name, document, options, base_dir):
        """
        Experiment defaults, then the config document, then command-line flags.
        """
        merged = {**get_experiment_defaults(name), **document, "experiment": name}

        for key in ("seed", "trials", "scenario", "models"):
            if options.get(key) is not None:
                merged[key] = options[key]
        if options.get("source"):
            merged["source"] = dict(SOURCE_PRESETS[options["source"]])
            if "detector" not in document and merged.get("detector", {}).get("model") != "threshold":
                merged.pop("detector", None)
        if options.get("threshold") is not None:
            merged["detector"] = {
                **merged.get("detector", {"model": "threshold"}),
                "threshold": options["threshold"],
            }
        if options.get("out") or options.get("format"):
            output = dict(merged.get("output") or {})
            if options.get("out"):
                output["path"] = options["out"]
            if options.get("format"):
                output["format"] = options["format"]
            merged["output"] = output
        if options.get("raw_clicks"):
            merged["raw_clicks"] = True

        serializer = ExperimentConfigSerializer(data=merged, context={"base_dir": base_dir})
        serializer.is_valid(raise_exception=True)
        return serializer.validated_data

    def format_errors(self, detail, raw_text):
        lines = []
        for path, message in flatten_errors(detail):
            line = locate_line(raw_text, path)
            lines.append(f"{path}: {message}" + (f" (line {line})" if line else ""))
        return "\n".join(lines)

    def render_json(self, name, resolved, results, no_timestamp):
        payload = {"experiment": name, "config": resolved, "results": results}
        if not no_timestamp:
            payload["generated_at"] = timezone.now().isoformat()
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def render_csv(self, name, results):
        buffer = io.StringIO()
        csv.writer(buffer, lineterminator="\n").writerows(build_csv_rows(name, results))
        return buffer.getvalue()

    def write_raw_clicks(self, name, config, path):
        target = clicks_path(path)
        rows = write_click_csv(target, iter_raw_clicks(name, config))
        self.stdout.write(self.style.SUCCESS(f"Wrote {rows} click records to {target}"))
