"""Orchestrator for running experiment scenarios."""
from time import perf_counter
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from oamsim.analysis.coincidence import coincidence_report
from oamsim.analysis.histogram import build_histogram
from oamsim.analysis.oracle import expected_run, pre_detection_cc
from oamsim.analysis.tomography import measure_purity_tomography
from oamsim.core.calibration import calibrate
from oamsim.core.exceptions import ScenarioError
from oamsim.core.parameters import OAM_RUN_CHARGES, ExperimentConfig, apply_patch
from oamsim.device.emitter import try_emit
from oamsim.device.resonator import (
    aligned_order,
    drive_for_power,
    drive_for_voltage,
    fit_comb,
    required_power,
    transmission_spectrum,
    tuning_table,
)
from oamsim.models.photon import Handedness, OamPhoton
from oamsim.models.report import RunReport, Scenario, ScenarioKind
from oamsim.models.resonance import DriveSetting
from oamsim.simulation.detection import Route, arm_survival
from oamsim.simulation.runner import ArmSetup, MonteCarloRunner
from oamsim.simulation.source import DEFAULT_BLOCK_PULSES, pair_statistics
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_GRID = (1540.0, 1560.0, 0.001)
DEFAULT_SHOTS = 1_000_000


def signal_wavelength(charge: int, config: ExperimentConfig) -> float:
    """
    Wavelength routed into the emitter for a charge.

    Positive charges are reached with the long-wavelength photon, negative
    ones with the short one; the other photon heralds.
    """
    stats = pair_statistics(config.pump, config.pairs)
    return stats.lambda_i_nm if charge > 0 else stats.lambda_s_nm


class ScenarioOrchestrator:
    """Runs scenarios against a base experiment config."""

    def __init__(
        self,
        config: ExperimentConfig,
        workers: int = 1,
        block_pulses: int = DEFAULT_BLOCK_PULSES,
        debug: bool = False
    ):
        """
        Initialize orchestrator.

        Args:
            config: Base experiment config; scenario overrides patch a copy
            workers: Monte Carlo worker processes
            block_pulses: Pulses per random-stream block
            debug: Expose per-projection values in reports
        """
        self.config = config
        self.runner = MonteCarloRunner(workers=workers, block_pulses=block_pulses)
        self.debug = debug

        logger.info("Orchestrator initialized", extra={
            "config_hash": config.config_hash(),
            "workers": workers,
            "block_pulses": block_pulses
        })

    def run_scenario(self, scenario: Scenario) -> RunReport:
        """
        Run one scenario.

        Args:
            scenario: Scenario to run

        Returns:
            RunReport; equal (config, scenario) give equal reports

        Raises:
            OamSimError: Any model error, logged with context and re-raised
        """
        config = apply_patch(self.config, scenario.config_patch)
        config_hash = config.config_hash()
        logger.info("Scenario started", extra={
            "kind": scenario.kind.value,
            "charge": scenario.charge,
            "seed": scenario.seed,
            "config_hash": config_hash
        })
        started = perf_counter()

        handlers = {
            ScenarioKind.SWW_ONLY: self._run_sww_only,
            ScenarioKind.OAM_RUN: self._run_oam,
            ScenarioKind.SPECTRUM_SWEEP: self._run_sweep,
            ScenarioKind.TOMOGRAPHY: self._run_tomography,
            ScenarioKind.CALIBRATE: self._run_calibration,
        }

        try:
            report = handlers[scenario.kind](scenario, config, config_hash)
        except Exception as e:
            logger.error("Scenario failed", extra={
                "kind": scenario.kind.value,
                "charge": scenario.charge,
                "seed": scenario.seed,
                "error": str(e)
            })
            raise

        logger.info("Scenario completed", extra={
            "kind": scenario.kind.value,
            "seed": scenario.seed,
            "pulses_simulated": report.pulses_simulated,
            "emitting_pulses": report.emitting_pulses,
            "wall_clock_s": round(perf_counter() - started, 3)
        })
        return report

    def _pulses(self, scenario: Scenario, config: ExperimentConfig) -> int:
        return int(scenario.overrides.get("pulses", config.pump.n_pulses))

    def _check_bus_wavelength(self, name: str, wavelength: float, drive: DriveSetting, config: ExperimentConfig):
        order = aligned_order(wavelength, drive, config.resonator)
        if order is not None:
            logger.warning("Bus wavelength aligned with a resonance", extra={
                "photon": name, "wavelength_nm": wavelength, "order": order
            })

    def _coincidences(
        self,
        scenario: Scenario,
        config: ExperimentConfig,
        config_hash: str,
        survival_s: float,
        survival_i: float
    ) -> RunReport:
        n_pulses = self._pulses(scenario, config)
        result = self.runner.run(
            n_pulses,
            config.pairs.mu,
            config.pairs.statistics,
            config.pump.period_ps,
            ArmSetup(survival_s, config.spad_signal),
            ArmSetup(survival_i, config.spad_idler),
            scenario.seed
        )

        analysis = config.analysis
        hist = build_histogram(
            result.signal,
            result.idler,
            analysis.bin_width_ps,
            analysis.span_periods * config.pump.period_ps
        )
        coincidence = coincidence_report(
            hist,
            analysis.window_ps,
            config.pump.period_ps / 1e3,
            analysis.side_peaks,
            seed=scenario.seed,
            config_hash=config_hash
        )

        expected = expected_run(config, scenario.charge, n_pulses)
        details: Dict[str, Any] = {
            "survival_s": survival_s,
            "survival_i": survival_i,
            "expected_cc": expected.cc,
            "expected_acc": expected.acc
        }
        return RunReport(
            scenario=scenario,
            config_hash=config_hash,
            pulses_simulated=result.pulses_simulated,
            emitting_pulses=result.emitting_pulses,
            coincidence=coincidence,
            details=details,
            histogram=hist,
            clicks=(result.signal, result.idler)
        )

    def _run_sww_only(self, scenario: Scenario, config: ExperimentConfig, config_hash: str) -> RunReport:
        # no heater drive: both photons and the pump stay in the bus
        drive = DriveSetting.off()
        stats = pair_statistics(config.pump, config.pairs)
        for name, wavelength in (("signal", stats.lambda_s_nm), ("idler", stats.lambda_i_nm),
                                 ("pump", config.pump.lambda_p_nm)):
            self._check_bus_wavelength(name, wavelength, drive, config)

        survival_s = arm_survival(None, Route.SIGNAL_BUS, config.loss, config.emitter, config.spad_signal)
        survival_i = arm_survival(None, Route.IDLER_BUS, config.loss, config.emitter, config.spad_idler)
        return self._coincidences(scenario, config, config_hash, survival_s, survival_i)

    def _tune(self, charge: int, config: ExperimentConfig) -> Tuple[DriveSetting, OamPhoton, float]:
        target = signal_wavelength(charge, config)
        drive = drive_for_power(required_power(charge, target, config.resonator), config.resonator)
        photon = try_emit(target, drive, config.resonator, config.emitter)
        if photon is None or photon.charge != charge:
            raise ScenarioError(f"drive for charge {charge} did not align the signal photon")
        return drive, photon, target

    def _run_oam(self, scenario: Scenario, config: ExperimentConfig, config_hash: str) -> RunReport:
        charge = scenario.charge
        drive, photon, target = self._tune(charge, config)

        stats = pair_statistics(config.pump, config.pairs)
        herald = stats.lambda_s_nm if target == stats.lambda_i_nm else stats.lambda_i_nm
        self._check_bus_wavelength("herald", herald, drive, config)
        self._check_bus_wavelength("pump", config.pump.lambda_p_nm, drive, config)

        survival_s = arm_survival(charge, Route.SIGNAL_EMITTER, config.loss, config.emitter,
                                  config.spad_signal, photon=photon, mask_charge=charge)
        survival_i = arm_survival(None, Route.IDLER_BUS, config.loss, config.emitter, config.spad_idler)
        report = self._coincidences(scenario, config, config_hash, survival_s, survival_i)

        order = aligned_order(target, drive, config.resonator)
        report.details.update({
            "signal_wavelength_nm": target,
            "herald_wavelength_nm": herald,
            "drive": {"order": order, **drive.to_dict()},
            "pre_detection_cc": pre_detection_cc(report.coincidence.cc, config.loss.path_db[charge]),
            "expected_pre_detection_cc": pre_detection_cc(report.details["expected_cc"], config.loss.path_db[charge])
        })
        if self.debug:
            # both circular components pass the same mask statistics; the reported CC is their average
            report.details["projections"] = {
                hand.value: {"charge": photon.projection(hand), "cc": report.coincidence.cc}
                for hand in (Handedness.LEFT, Handedness.RIGHT)
            }
        return report

    def _run_sweep(self, scenario: Scenario, config: ExperimentConfig, config_hash: str) -> RunReport:
        start, stop, step = scenario.overrides.get("grid", DEFAULT_GRID)
        if not (stop > start and step > 0):
            raise ScenarioError(f"grid needs start < stop and step > 0, got {start}, {stop}, {step}")
        grid = start + step * np.arange(int(round((stop - start) / step)) + 1)

        drive = drive_for_voltage(float(scenario.overrides.get("voltage_v", 0.0)), config.resonator)
        values = transmission_spectrum(grid, drive, config.resonator)
        fit = fit_comb(grid, values)

        tuning = [
            point.to_dict()
            for point in tuning_table(signal_wavelength(2, config), [c for c in OAM_RUN_CHARGES if c > 0], config.resonator)
            + tuning_table(signal_wavelength(-1, config), [c for c in OAM_RUN_CHARGES if c < 0], config.resonator)
        ]
        logger.info("Spectrum swept", extra={
            "voltage_v": drive.voltage_v, "fsr_nm": fit.fsr_nm, "fwhm_nm": fit.fwhm_nm, "points": int(grid.size)
        })
        return RunReport(
            scenario=scenario,
            config_hash=config_hash,
            spectrum={"drive": drive.to_dict(), "fit": fit.to_dict(), "tuning": tuning},
            sweep_table=pd.DataFrame({"wavelength_nm": grid, "transmission": values})
        )

    def _run_tomography(self, scenario: Scenario, config: ExperimentConfig, config_hash: str) -> RunReport:
        shots: Optional[int] = scenario.overrides.get("shots", DEFAULT_SHOTS)
        drive, photon, _ = self._tune(scenario.charge, config)
        estimate = measure_purity_tomography(
            config.emitter,
            config.spad_signal,
            scenario.charge,
            shots=shots,
            seed=scenario.seed,
            spectrum=photon.spectrum
        )
        return RunReport(
            scenario=scenario,
            config_hash=config_hash,
            purity=estimate,
            details={"drive": drive.to_dict()}
        )

    def _run_calibration(self, scenario: Scenario, config: ExperimentConfig, config_hash: str) -> RunReport:
        result = calibrate(config)
        calibrated = apply_patch(config, result.patch)
        expected = expected_run(calibrated, None)
        return RunReport(
            scenario=scenario,
            config_hash=config_hash,
            calibration={
                **result.to_dict(),
                "calibrated_config_hash": calibrated.config_hash(),
                "oam_pre_detection_cc": {
                    str(charge): pre_detection_cc(expected_run(calibrated, charge).cc, calibrated.loss.path_db[charge])
                    for charge in OAM_RUN_CHARGES
                }
            },
            details={"expected_cc": expected.cc, "expected_acc": expected.acc}
        )
