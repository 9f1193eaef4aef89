"""Scenario-level tests on reduced acquisitions."""
import numpy as np
import pytest

from oamsim.core.exceptions import ScenarioError, UnreachableChargeError
from oamsim.core.orchestrator import ScenarioOrchestrator
from oamsim.models.report import Scenario
from oamsim.reporting.report_generator import ReportGenerator
from tests.conftest import SIGMAS, SMALL_BLOCK

PERFECT_DETECTORS = {
    "spad_signal": {"det_efficiency": 1.0},
    "spad_idler": {"det_efficiency": 1.0},
}


def test_sww_only_matches_expectation(orchestrator):
    report = orchestrator.run_scenario(Scenario("sww_only", seed=1, overrides={"pulses": 240_000_000}))
    assert report.pulses_simulated == 240_000_000
    assert 0 < report.emitting_pulses <= report.pulses_simulated
    expected = report.details["expected_cc"]
    assert expected == pytest.approx(779, rel=0.01)
    assert abs(report.coincidence.cc - expected) < SIGMAS * np.sqrt(expected)
    assert len(report.coincidence.acc) == 14
    assert report.histogram.total >= report.coincidence.cc


def test_sww_only_ignores_emitter_parameters(orchestrator):
    overrides = {"pulses": 20_000_000}
    plain = orchestrator.run_scenario(Scenario("sww_only", seed=2, overrides=overrides))
    patched = orchestrator.run_scenario(Scenario("sww_only", seed=2, overrides={
        **overrides, "emitter": {"purity_target": 0.3, "per_waveguide_coupling": 0.5}
    }))
    assert patched.coincidence.cc == plain.coincidence.cc
    assert patched.coincidence.acc == plain.coincidence.acc
    assert patched.config_hash != plain.config_hash


def test_results_do_not_depend_on_worker_count(config):
    scenario = Scenario("sww_only", seed=5, overrides={"pulses": 20_000_000})
    generator = ReportGenerator()
    serial = ScenarioOrchestrator(config, workers=1, block_pulses=SMALL_BLOCK).run_scenario(scenario)
    pooled = ScenarioOrchestrator(config, workers=2, block_pulses=SMALL_BLOCK).run_scenario(scenario)
    assert generator.render_json(serial) == generator.render_json(pooled)
    assert np.array_equal(serial.histogram.counts, pooled.histogram.counts)


def test_different_seeds_differ(orchestrator):
    a = orchestrator.run_scenario(Scenario("sww_only", seed=1, overrides={"pulses": 20_000_000}))
    b = orchestrator.run_scenario(Scenario("sww_only", seed=2, overrides={"pulses": 20_000_000}))
    assert not np.array_equal(a.histogram.counts, b.histogram.counts)


def test_oam_run(orchestrator):
    report = orchestrator.run_scenario(Scenario("oam_run", charge=4, seed=3, overrides={
        "pulses": 400_000_000, **PERFECT_DETECTORS
    }))
    details = report.details
    assert details["drive"]["order"] == 284
    assert details["drive"]["power_mw"] == pytest.approx(59.48, abs=0.01)
    assert details["signal_wavelength_nm"] > details["herald_wavelength_nm"]
    expected = details["expected_cc"]
    assert abs(report.coincidence.cc - expected) < SIGMAS * np.sqrt(expected) + 1
    assert details["pre_detection_cc"] == pytest.approx(report.coincidence.cc / 10 ** (-1.54))
    assert "projections" not in details


def test_negative_charge_uses_short_photon(config):
    orchestrator = ScenarioOrchestrator(config, block_pulses=SMALL_BLOCK, debug=True)
    report = orchestrator.run_scenario(Scenario("oam_run", charge=-4, seed=3, overrides={
        "pulses": 200_000_000, **PERFECT_DETECTORS
    }))
    assert report.details["signal_wavelength_nm"] == 1547.72
    assert report.details["drive"]["order"] == 308
    assert report.details["drive"]["power_mw"] == pytest.approx(180.0)
    projections = report.details["projections"]
    assert projections["left"]["charge"] == -3
    assert projections["right"]["charge"] == -5


def test_unreachable_charge_is_reported(orchestrator):
    scenario = Scenario("oam_run", charge=6, overrides={"pulses": 1000, "resonator": {"max_power_mw": 50.0}})
    with pytest.raises(UnreachableChargeError):
        orchestrator.run_scenario(scenario)


def test_spectrum_sweep(orchestrator):
    report = orchestrator.run_scenario(Scenario("spectrum_sweep", overrides={"grid": [1550.0, 1560.0, 0.001]}))
    fit = report.spectrum["fit"]
    assert fit["fsr_nm"] == pytest.approx(0.5, abs=0.005)
    assert fit["fwhm_nm"] == pytest.approx(0.045, abs=0.005)
    assert len(report.sweep_table) == 10_001
    assert list(report.sweep_table.columns) == ["wavelength_nm", "transmission"]
    tuning = {point["charge"]: point for point in report.spectrum["tuning"]}
    assert sorted(tuning) == sorted([2, 3, 4, 5, 6, -6, -5, -4, -3, -2, -1])
    assert tuning[-4]["power_mw"] == pytest.approx(180.0)


def test_sweep_at_anchor_voltage(orchestrator):
    report = orchestrator.run_scenario(Scenario("spectrum_sweep", overrides={
        "voltage_v": 13.97, "grid": [1557.0, 1559.0, 0.001]
    }))
    assert report.spectrum["drive"]["power_mw"] == pytest.approx(60.0, rel=1e-5)
    dips = report.spectrum["fit"]["dip_wavelengths_nm"]
    assert min(abs(np.array(dips) - 1557.32)) < 1e-3


def test_bad_sweep_grid(orchestrator):
    with pytest.raises(ScenarioError):
        orchestrator.run_scenario(Scenario("spectrum_sweep", overrides={"grid": [1560.0, 1550.0, 0.001]}))


def test_tomography_scenario(orchestrator):
    report = orchestrator.run_scenario(Scenario("tomography", charge=3, seed=4))
    assert report.purity.purity == pytest.approx(0.85, abs=SIGMAS * 9e-4)
    assert report.details["drive"]["power_mw"] > 0
    noiseless = orchestrator.run_scenario(Scenario("tomography", charge=3, overrides={"shots": None}))
    assert noiseless.purity.purity == pytest.approx(0.85)


def test_calibration_scenario(orchestrator):
    report = orchestrator.run_scenario(Scenario("calibrate"))
    calibration = report.calibration
    assert calibration["patch"]["pairs"]["mu"] == pytest.approx(0.02327, rel=0.05)
    assert calibration["calibrated_config_hash"] != report.config_hash
    values = calibration["oam_pre_detection_cc"]
    assert len(values) == 11
    assert all(1200 <= v <= 3200 for v in values.values())
    assert report.details["expected_cc"] == pytest.approx(77_900)


@pytest.mark.parametrize("kwargs", [
    {"kind": "oam_run", "charge": 1},
    {"kind": "oam_run"},
    {"kind": "tomography", "charge": 0},
    {"kind": "warp_drive"},
    {"kind": "sww_only", "seed": -1},
    {"kind": "sww_only", "overrides": {"flux": 1}},
    {"kind": "sww_only", "overrides": {"pulses": 0}},
    {"kind": "sww_only", "overrides": {"pulses": 2.5}},
])
def test_invalid_scenarios(kwargs):
    with pytest.raises(ScenarioError):
        Scenario(**kwargs)


def test_scenario_splits_overrides():
    scenario = Scenario("sww_only", overrides={"pulses": 10, "pairs": {"mu": 0.01}})
    assert scenario.config_patch == {"pairs": {"mu": 0.01}}
    assert scenario.to_dict()["kind"] == "sww_only"
