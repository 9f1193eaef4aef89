"""Tests for the OAM emitter model."""
import numpy as np
import pytest

from oamsim.core.exceptions import UnknownChargeError, ZeroBasisMassError
from oamsim.core.parameters import EmitterParams
from oamsim.device.emitter import default_spectrum, emission_efficiency, purity_of, try_emit
from oamsim.device.resonator import drive_for_power, required_power, transmission
from oamsim.models.photon import Handedness, OamPhoton
from oamsim.models.resonance import DriveSetting


def _delta(charge):
    return tuple(1.0 if m == charge else 0.0 for m in range(-7, 8))


def test_efficiency_falls_with_charge(config):
    values = [emission_efficiency(l, config.emitter) for l in range(1, 7)]
    assert values[0] == pytest.approx(0.0197)
    assert values[-1] == pytest.approx(0.0093)
    assert all(a > b for a, b in zip(values, values[1:]))
    assert emission_efficiency(-4, config.emitter) == emission_efficiency(4, config.emitter)


def test_efficiency_outside_table(config):
    with pytest.raises(UnknownChargeError):
        emission_efficiency(7, config.emitter)


def test_default_spectrum(config):
    spectrum = default_spectrum(3, config.emitter)
    weights = dict(zip(range(-7, 8), spectrum))
    assert weights[3] == pytest.approx(0.85)
    assert weights[-7] == weights[7] == 0.0
    assert weights[0] == pytest.approx(0.0125)
    assert sum(spectrum) == pytest.approx(1.0)


def test_spectrum_override_wins():
    params = EmitterParams(spectrum_overrides={2: list(_delta(2))})
    assert default_spectrum(2, params) == _delta(2)
    assert default_spectrum(3, params)[10] == pytest.approx(0.85)


def test_default_spectrum_outside_basis(config):
    with pytest.raises(UnknownChargeError):
        default_spectrum(7, config.emitter)


def test_purity_of():
    assert purity_of(_delta(4), 4) == 1.0
    uniform = tuple(0.0 if abs(m) == 7 else 1 / 13 for m in range(-7, 8))
    assert purity_of(uniform, 0) == pytest.approx(1 / 13)
    # mass at +-7 is outside the basis and does not dilute the purity
    leaky = tuple(0.5 if m in (7, 2) else 0.0 for m in range(-7, 8))
    assert purity_of(leaky, 2) == 1.0
    with pytest.raises(ZeroBasisMassError):
        purity_of(_delta(7), 7)


def test_default_purity_is_target(config):
    assert purity_of(default_spectrum(-5, config.emitter), -5) == pytest.approx(0.85)


def test_try_emit_off_resonance(config, off):
    assert try_emit(1557.313, off, config.resonator, config.emitter) is None


def test_try_emit_aligned(config):
    power = required_power(4, 1557.313, config.resonator)
    photon = try_emit(1557.313, drive_for_power(power, config.resonator), config.resonator, config.emitter)
    assert photon.charge == 4
    assert (photon.l_left, photon.l_right) == (5, 3)
    assert photon.projection(Handedness.LEFT) == 5
    assert photon.projection(Handedness.RIGHT) == 3


def test_try_emit_charge_outside_basis(config, off):
    # order 290 carries l=10
    with pytest.raises(UnknownChargeError):
        try_emit(1553.12, off, config.resonator, config.emitter)


def test_transmitted_photons_are_not_emitted(config):
    lambda_s = 1557.313
    threshold = 1 - config.resonator.dip_depth / 2
    for power in np.linspace(0.0, 120.0, 241):
        drive = DriveSetting(voltage_v=0.0, power_mw=float(power))
        if transmission(lambda_s, drive, config.resonator) > threshold:
            assert try_emit(lambda_s, drive, config.resonator, config.emitter) is None


def test_photon_validation():
    with pytest.raises(ValueError):
        OamPhoton.with_charge(2, (0.5,) * 15)
    with pytest.raises(ValueError):
        OamPhoton.with_charge(2, (1.0,))
    with pytest.raises(ValueError):
        OamPhoton(charge=2, spectrum=_delta(2), l_left=2, l_right=1)


def test_photon_weight_outside_support():
    photon = OamPhoton.with_charge(2, _delta(2))
    assert photon.weight(2) == 1.0
    assert photon.weight(9) == 0.0
    assert photon.to_dict()["spectrum"]["2"] == 1.0
