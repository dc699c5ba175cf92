import json
import math
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from entanglement_lab.utils.registry import EXPERIMENT_NAMES


def run(*args, **options):
    out = StringIO()
    call_command("run", *args, stdout=out, no_timestamp=True, **options)
    return out.getvalue()


def run_json(*args, **options):
    return json.loads(run(*args, **options))


def write_config(tmp_path, text):
    path = tmp_path / "config.json"
    path.write_text(text)
    return str(path)


def test_list_names_every_experiment():
    out = StringIO()
    call_command("list", stdout=out)
    lines = out.getvalue().splitlines()
    assert len(lines) == len(EXPERIMENT_NAMES)
    assert [line.split(" ", 1)[0] for line in lines] == list(EXPERIMENT_NAMES)
    assert any(line.startswith("grangier (§4)") for line in lines)
    assert any(line.startswith("threshold (Appendix 2)") for line in lines)


def test_chsh_operator_optimal():
    payload = run_json("chsh-operator")
    report = payload["results"]["report"]
    assert payload["experiment"] == "chsh-operator"
    assert "generated_at" not in payload
    assert payload["config"]["scenario"] == "optimal"
    assert report["bell_norm"] == pytest.approx(math.sqrt(2), abs=1e-9)
    assert report["landau_residual"] < 1e-10
    assert report["classification"] == "DoublyIncompatible"
    assert payload["results"]["local_structure"] is True
    assert payload["results"]["classical_field"]["schmidt_rank"] == 2


def test_chsh_operator_compatible_scenario():
    report = run_json("chsh-operator", scenario="compatible")["results"]["report"]
    assert report["bell_norm"] == pytest.approx(1.0, abs=1e-10)
    assert report["classification"] == "LocallyCompatible"


def test_timestamp_is_added_by_default():
    out = StringIO()
    call_command("run", "chsh-operator", stdout=out)
    assert "generated_at" in json.loads(out.getvalue())


def test_grangier_single_photon():
    payload = run_json("grangier", seed=7, trials=100_000)
    results = payload["results"]
    assert results["model"] == "single-photon"
    assert results["stats"]["coincidences"] == 0
    assert results["stats"]["pc"] == 0.0
    assert results["verdict"]["label"] == "nonclassical"
    assert results["expected_alpha"] == 0.0
    assert payload["config"]["detector"]["model"] == "quantum-born"


def test_grangier_deterministic_field_is_classical():
    results = run_json("grangier", seed=7, trials=200_000, source="deterministic")["results"]
    assert results["expected_alpha"] == 1.0
    assert results["verdict"]["classical_compatible"] is True


def test_missing_seed_is_a_config_error():
    with pytest.raises(CommandError) as excinfo:
        run("grangier")
    assert excinfo.value.returncode == 2
    assert "seed" in str(excinfo.value)


def test_config_errors_point_at_the_line(tmp_path):
    config = write_config(
        tmp_path,
        '{\n'
        '  "experiment": "grangier",\n'
        '  "seed": 1,\n'
        '  "source": {\n'
        '    "kind": "field",\n'
        '    "model": "thermal",\n'
        '    "means": [-1, 1]\n'
        '  }\n'
        '}\n',
    )
    with pytest.raises(CommandError) as excinfo:
        run("grangier", config=config)
    assert excinfo.value.returncode == 2
    assert str(excinfo.value) == "source.means: Values must be non-negative. (line 7)"


def test_unreadable_config(tmp_path):
    with pytest.raises(CommandError) as excinfo:
        run("grangier", config=str(tmp_path / "missing.json"))
    assert excinfo.value.returncode == 2


def test_invalid_json_config(tmp_path):
    config = write_config(tmp_path, '{\n  "seed": 1,\n  "trials": \n}\n')
    with pytest.raises(CommandError) as excinfo:
        run("grangier", config=config)
    assert excinfo.value.returncode == 2
    assert "(line 4)" in str(excinfo.value)


def test_flags_override_config(tmp_path):
    config = write_config(tmp_path, '{"seed": 1, "trials": 50}')
    payload = run_json("grangier", config=config, trials=80)
    assert payload["config"]["trials"] == 80
    assert payload["results"]["stats"]["trials"] == 80


def test_state_dimension_mismatch_is_numerical(tmp_path):
    config = write_config(tmp_path, '{"source": {"kind": "state", "amplitudes": [1, 0]}}')
    with pytest.raises(CommandError) as excinfo:
        run("chsh-operator", config=config)
    assert excinfo.value.returncode == 3
    assert "DimMismatch" in str(excinfo.value)


def test_identical_runs_give_identical_files(tmp_path):
    target = tmp_path / "result.json"
    run("grangier", seed=11, trials=5000, source="thermal", out=str(target))
    first = target.read_bytes()
    run("grangier", seed=11, trials=5000, source="thermal", out=str(target))
    assert target.read_bytes() == first


def test_csv_output():
    text = run("grangier", seed=3, trials=1000, format="csv")
    header, row = text.splitlines()
    assert header == "model,N,p1,p2,pc,g2,se_g2,alpha,verdict"
    assert row.startswith("single-photon,1000,")
    assert row.endswith(",nonclassical")


def test_raw_clicks(tmp_path):
    target = tmp_path / "run.json"
    run("grangier", seed=3, trials=1000, out=str(target), raw_clicks=True)
    lines = (tmp_path / "run.clicks.csv").read_text().splitlines()
    assert lines[0] == "trial,c1,c2"
    assert len(lines) == 1001
    assert lines[1].startswith("0,")
    assert all(line.split(",")[1:] in (["1", "0"], ["0", "1"]) for line in lines[1:])


def test_raw_clicks_need_an_output_path():
    with pytest.raises(CommandError) as excinfo:
        run("grangier", seed=3, trials=10, raw_clicks=True)
    assert excinfo.value.returncode == 2


def test_raw_clicks_refused_without_click_records(tmp_path):
    with pytest.raises(CommandError) as excinfo:
        run("lhv", seed=3, models=10, out=str(tmp_path / "lhv.json"), raw_clicks=True)
    assert excinfo.value.returncode == 2


def test_lhv():
    results = run_json("lhv", seed=5, models=2000)["results"]
    assert results["strategies"] == 81
    assert results["exhaustive_max"] == 1.0
    assert results["max_s"] == pytest.approx(1.0, abs=1e-12)
    assert results["violations"] == 0


def test_threshold_detection():
    payload = run_json("threshold", seed=5, trials=20_000)
    results = payload["results"]
    assert results["threshold"] == pytest.approx(0.5)
    assert payload["config"]["detector"]["threshold"] == results["threshold"]
    assert results["single_click_structure"] is True
    assert results["stats"]["g2"] < 0.05
    assert results["reference"]["detector"] == "semiclassical-poisson"


def test_threshold_flag(tmp_path):
    results = run_json("threshold", seed=5, trials=1000, threshold=2.0)["results"]
    assert results["threshold"] == 2.0
    assert results["stats"]["empty_trials"] == 1000
    assert results["verdict"] is None


def test_chsh_counts():
    results = run_json("chsh-counts", seed=11, trials=20_000)["results"]
    quantum, lhv = results["quantum"], results["lhv"]
    assert quantum["exact"] == pytest.approx(math.sqrt(2), abs=1e-12)
    assert abs(quantum["estimate"]["value"] - math.sqrt(2)) < 5 * quantum["estimate"]["se"] + 1e-3
    assert lhv["exact"] == pytest.approx(1.0)
    assert lhv["estimate"]["value"] <= 1.0 + 5 * lhv["estimate"]["se"]
    assert set(quantum["counts"]) == {"A1B1", "A1B2", "A2B1", "A2B2"}
