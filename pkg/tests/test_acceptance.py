"""
End-to-end checks at the scale of a real run: 10^4 random scenarios, 10^6 trials
per detection experiment, 10^5 local hidden variable mixtures.
"""

import math

import numpy as np
import pytest

from entanglement_lab.bell import (
    analyze,
    chsh_value,
    landau_residual,
    lhv_sweep,
    max_chsh,
    quantum_sample_counts,
    random_local_scenario,
    scenario_preset,
)
from entanglement_lab.detection import DetectorConfig, run_experiment
from entanglement_lab.fields import ClassicalFieldModel
from entanglement_lab.hilbert import BellScenario, normalize, pauli, singlet
from entanglement_lab.stats import chsh_from_counts, grangier_test, thermal_alpha
from entanglement_lab.utils.rng import stream

N = 1_000_000
POISSON = DetectorConfig(model="semiclassical-poisson", efficiency=1.0, gate_time=0.1)
BORN = DetectorConfig(model="quantum-born")


def qubit_observable(rng):
    """n . sigma for a random unit vector n: traceless, squares to I."""
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    x, y, z = (pauli(label).entries for label in "xyz")
    return n[0] * x + n[1] * y + n[2] * z


def test_landau_identity_on_random_scenarios():
    rng = np.random.default_rng(1)
    worst = max(landau_residual(random_local_scenario(rng)) for _ in range(10_000))
    assert worst < 1e-10


def test_compatible_scenarios_never_exceed_one():
    rng = np.random.default_rng(2)
    worst = max(max_chsh(random_local_scenario(rng, compatible_b=True)) for _ in range(10_000))
    assert worst <= 1 + 1e-10


def test_doubly_incompatible_qubits_exceed_one():
    rng = np.random.default_rng(3)
    for _ in range(1_000):
        s = BellScenario.local(*(qubit_observable(rng) for _ in range(4)), dichotomous=True)
        report = analyze(s)
        assert report.bell_norm > 1
        assert report.permutation_max > 1
        assert report.bell_norm <= math.sqrt(2) + 1e-10


def test_singlet_counts_reach_tsirelson():
    s = scenario_preset("optimal")
    assert abs(chsh_value(s, singlet())) == pytest.approx(math.sqrt(2), abs=1e-12)
    estimate = chsh_from_counts(quantum_sample_counts(s, singlet(), 100_000, stream(4, 0, "counts")))
    assert estimate.value == pytest.approx(math.sqrt(2), abs=0.01)


def test_single_photon_never_coincides():
    st = run_experiment(normalize((1, 1)), BORN, N, seed=5, aggregate=True)
    assert st.coincidences == 0
    assert st.p1 == pytest.approx(0.5, abs=0.0015)
    assert st.p1 + st.p2 == pytest.approx(1.0)
    verdict = grangier_test(st)
    assert verdict.alpha == 0.0
    assert verdict.label == "nonclassical"


def test_deterministic_field_is_uncorrelated():
    st = run_experiment(ClassicalFieldModel.deterministic([5.0, 5.0]), POISSON, N, seed=6, splitter=0.5, aggregate=True)
    assert st.g2 == pytest.approx(1.0, abs=0.02)
    assert grangier_test(st).classical_compatible


def test_thermal_field_bunches():
    st = run_experiment(ClassicalFieldModel.thermal([1.0, 1.0]), POISSON, N, seed=7, splitter=0.5, aggregate=True)
    expected = thermal_alpha(0.1)
    assert expected == pytest.approx(11 / 6)
    assert abs(st.g2 - expected) < 5 * st.se_g2
    assert grangier_test(st).classical_compatible


def test_weakly_coupled_thermal_field_doubles_coincidences():
    # c = eta <I> dt = 0.025 per channel; alpha -> 2 as c -> 0
    weak = DetectorConfig(model="semiclassical-poisson", efficiency=1.0, gate_time=0.025)
    st = run_experiment(
        ClassicalFieldModel.thermal([1.0, 1.0]), weak, 20 * N, seed=17, splitter=0.5, aggregate=True
    )
    assert abs(thermal_alpha(0.025) - 2.0) < 0.1
    assert abs(st.g2 - thermal_alpha(0.025)) < 5 * st.se_g2
    assert abs(st.g2 - 2.0) < 0.1


@pytest.mark.parametrize(
    "model",
    [
        ClassicalFieldModel.deterministic([1.0, 1.0]),
        ClassicalFieldModel.thermal([1.0, 1.0]),
        ClassicalFieldModel.thermal([1.0, 1.0], correlated=False),
        ClassicalFieldModel.anti_correlated(),
    ],
    ids=["deterministic", "thermal", "thermal-uncorrelated", "anti-correlated"],
)
def test_poisson_conversion_stays_classical(model):
    st = run_experiment(model, POISSON, N, seed=8, splitter=0.5, aggregate=True)
    verdict = grangier_test(st)
    assert verdict.alpha >= 1 - 3 * verdict.se


def test_threshold_detection_mimics_antibunching():
    cfg = DetectorConfig(model="threshold", threshold=0.5)
    st = run_experiment(ClassicalFieldModel.anti_correlated(), cfg, N, seed=9, aggregate=True)
    assert st.max_clicks <= 1
    assert st.g2 < 0.05
    assert not grangier_test(st).classical_compatible


def test_lhv_mixtures_respect_the_bound():
    values = lhv_sweep(100_000, stream(10, 0, "models"), 16)
    assert values.max() <= 1 + 1e-12
