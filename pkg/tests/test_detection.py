"""Tests for the loss budget and SPAD click generation."""
import numpy as np
import pandas as pd
import pytest

from oamsim.analysis.coincidence import window_sum
from oamsim.analysis.histogram import build_histogram
from oamsim.core.exceptions import DetectionError
from oamsim.core.parameters import LossBudget, SpadParams
from oamsim.device.emitter import default_spectrum
from oamsim.models.clicks import Arm, Origin
from oamsim.models.pairs import PairBlock
from oamsim.models.photon import OamPhoton
from oamsim.simulation.detection import (
    Route,
    arm_survival,
    block_clicks,
    db_to_fraction,
    export_clicks_csv,
    generate_clicks,
    scenario_survivals,
    slm_pass_probability,
)
from oamsim.simulation.source import iter_pair_blocks
from tests.conftest import SIGMAS

PERIOD = 25_000.0
SHARP = SpadParams(jitter_sigma_ps=1e-3)


def _block(pulses, pairs, n_pulses=10):
    return PairBlock(
        index=0,
        start=0,
        n_pulses=n_pulses,
        pulse_index=np.asarray(pulses, dtype=np.int64),
        n_pairs=np.asarray(pairs, dtype=np.int64)
    )


def test_db_to_fraction():
    assert db_to_fraction(0.0) == 1.0
    assert db_to_fraction(8.0) == pytest.approx(0.15849, rel=1e-4)
    assert db_to_fraction(3.0) * db_to_fraction(5.0) == pytest.approx(db_to_fraction(8.0))


def test_slm_projection(config):
    photon = OamPhoton.with_charge(4, default_spectrum(4, config.emitter))
    assert slm_pass_probability(photon, 4) == pytest.approx(0.85)
    assert slm_pass_probability(photon, 7) == 0.0
    assert sum(slm_pass_probability(photon, m) for m in range(-7, 8)) == pytest.approx(1.0)
    with pytest.raises(DetectionError):
        slm_pass_probability(photon, 8)


def test_lossless_bus_survival(config):
    budget = LossBudget(coupling_in_db=0.0, sww_db=0.0, idler_arm_db=0.0)
    spad = SpadParams(det_efficiency=1.0)
    assert arm_survival(None, Route.IDLER_BUS, budget, config.emitter, spad) == 1.0


def test_bus_survivals(config):
    signal, idler = scenario_survivals(config)
    expected = db_to_fraction(11.5) * 0.17
    assert signal == pytest.approx(expected)
    assert idler == pytest.approx(0.012035, rel=1e-4)


def test_sww_survival_ignores_emitter(config):
    other = config.model_copy(update={"emitter": config.emitter.model_copy(update={"purity_target": 0.5})})
    assert scenario_survivals(other) == scenario_survivals(config)


def test_emitter_survival(config):
    expected = db_to_fraction(8.0) * (0.0197 - 0.00208) * 0.85 * db_to_fraction(16.2) * 0.17
    survival, _ = scenario_survivals(config, charge=2)
    assert survival == pytest.approx(expected)


def test_objective_coupling_is_part_of_path_loss(config):
    narrow = LossBudget(objective_coupling=0.1)
    reference = arm_survival(5, Route.SIGNAL_EMITTER, config.loss, config.emitter, config.spad_signal)
    assert arm_survival(5, Route.SIGNAL_EMITTER, narrow, config.emitter, config.spad_signal) == pytest.approx(reference)
    with pytest.raises(ValueError):
        LossBudget(objective_coupling=0.01)


def test_emitter_survival_with_wrong_mask(config):
    right = arm_survival(3, Route.SIGNAL_EMITTER, config.loss, config.emitter, config.spad_signal)
    wrong = arm_survival(3, Route.SIGNAL_EMITTER, config.loss, config.emitter, config.spad_signal, mask_charge=5)
    assert wrong == pytest.approx(right * 0.0125 / 0.85)


def test_emitter_path_needs_configured_loss(config):
    with pytest.raises(DetectionError):
        arm_survival(None, Route.SIGNAL_EMITTER, config.loss, config.emitter, config.spad_signal)
    with pytest.raises(DetectionError):
        arm_survival(1, Route.SIGNAL_EMITTER, config.loss, config.emitter, config.spad_signal)


def test_perfect_detection_clicks_every_photon():
    signal, idler = block_clicks(_block([0, 5, 9], [1, 1, 2]), 1.0, 1.0, PERIOD, SHARP, SHARP, seed=0)
    expected = [0, 125_000, 225_000, 225_000]
    assert signal.time_ps.tolist() == expected
    assert idler.time_ps.tolist() == expected
    assert signal.count(Origin.PAIR) == 4
    assert signal.count(Origin.DARK) == 0


def test_no_survival_no_darks_is_silent():
    signal, idler = block_clicks(_block([0, 5], [1, 3]), 0.0, 0.0, PERIOD, SpadParams(), SpadParams(), seed=0)
    assert len(signal) == 0 and len(idler) == 0


def test_invalid_survival_rejected():
    with pytest.raises(DetectionError):
        block_clicks(_block([0], [1]), 1.5, 0.5, PERIOD, SpadParams(), SpadParams(), seed=0)


def test_dark_clicks_stay_in_their_period():
    dark = SpadParams(dark_prob_per_gate=0.5)
    signal, _ = block_clicks(_block([], [], n_pulses=1000), 0.0, 0.0, PERIOD, dark, SpadParams(), seed=2)
    assert len(signal) == signal.count(Origin.DARK)
    assert abs(len(signal) - 500) < SIGMAS * np.sqrt(250)
    assert signal.time_ps.min() >= 0
    assert signal.time_ps.max() < 1000 * PERIOD


def test_click_rate():
    n, mu, survival, dark = 10**7, 1e-3, 0.5, 1e-4
    blocks = iter_pair_blocks(n, mu, seed=4, block_pulses=2**20)
    spad = SpadParams(dark_prob_per_gate=dark)
    signal, idler = generate_clicks(blocks, survival, survival, PERIOD, spad, spad, seed=4)
    expected = n * (mu * survival + dark)
    assert abs(len(signal) - expected) < SIGMAS * np.sqrt(expected)
    assert np.all(np.diff(signal.time_ps) >= 0)
    assert signal.time_ps.dtype == np.int64
    assert signal.arm == Arm.SIGNAL and idler.arm == Arm.IDLER


def test_blocks_are_reproducible():
    block = next(iter_pair_blocks(2**20, 0.05, seed=1, block_pulses=2**20))
    spad = SpadParams(dark_prob_per_gate=1e-3)
    first = block_clicks(block, 0.3, 0.3, PERIOD, spad, spad, seed=1)
    second = block_clicks(block, 0.3, 0.3, PERIOD, spad, spad, seed=1)
    assert np.array_equal(first[0].time_ps, second[0].time_ps)
    assert np.array_equal(first[1].origin, second[1].origin)


def test_dark_only_streams_are_uncorrelated():
    n = 10**6
    spad = SpadParams(dark_prob_per_gate=0.05)
    blocks = iter_pair_blocks(n, 0.0, seed=6, block_pulses=2**20)
    signal, idler = generate_clicks(blocks, 0.0, 0.0, PERIOD, spad, spad, seed=6)
    hist = build_histogram(signal, idler)
    centre = hist.n_bins // 2
    flat = n * 0.05 * 0.05 * 320 / PERIOD
    for offset in (0, 391, -391, 1172):
        assert abs(window_sum(hist, centre + offset, 320) - flat) < SIGMAS * np.sqrt(flat) + 1


def test_export_clicks_csv(tmp_path):
    signal, idler = block_clicks(
        _block([0, 3], [1, 1]), 1.0, 1.0, PERIOD, SHARP, SpadParams(dark_prob_per_gate=0.5), seed=0
    )
    plain = tmp_path / "clicks.csv"
    export_clicks_csv(signal, idler, plain)
    frame = pd.read_csv(plain)
    assert list(frame.columns) == ["arm", "time_ps"]
    assert len(frame) == len(signal) + len(idler)
    assert frame["time_ps"].is_monotonic_increasing

    debug = tmp_path / "clicks_debug.csv"
    export_clicks_csv(signal, idler, debug, debug=True)
    frame = pd.read_csv(debug)
    assert set(frame["origin"]) <= {"pair", "dark"}
    assert (frame["origin"] == "pair").sum() == 4
