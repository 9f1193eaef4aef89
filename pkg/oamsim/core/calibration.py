"""Fit pair rate, dark counts and heater resistance to published aggregates."""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from scipy.optimize import brentq

from oamsim.analysis.oracle import expected_run
from oamsim.core.exceptions import InfeasibleCalibrationError
from oamsim.core.parameters import CalibrationParams, ExperimentConfig
from oamsim.device.resonator import required_power
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)

_MU_CEILING = 10.0
_DARK_CEILING = 0.5


@dataclass
class CalibrationResult:
    """Fitted parameters as a config patch plus the remaining residuals."""
    mu: float
    dark_prob_s: float
    dark_prob_i: float
    heater_ohms: float
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def patch(self) -> Dict[str, Dict[str, Any]]:
        return {
            "pairs": {"mu": self.mu},
            "spad_signal": {"dark_prob_per_gate": self.dark_prob_s},
            "spad_idler": {"dark_prob_per_gate": self.dark_prob_i},
            "resonator": {"heater_ohms": self.heater_ohms}
        }

    def to_dict(self) -> Dict[str, Any]:
        return {"patch": self.patch, "residuals": self.residuals}


class Calibrator:
    """Inverts the bus-only oracle for (mu, darks) and the heater anchor for R."""

    def __init__(self, config: ExperimentConfig, targets: Optional[CalibrationParams] = None):
        self.config = config
        self.targets = targets or config.calibration

    def _run(self, mu: float, dark_i: float):
        return expected_run(
            self.config, None, mu=mu, dark_s=self.targets.dark_ratio * dark_i, dark_i=dark_i
        )

    def mu_for_cc(self, dark_i: float) -> float:
        """Pair rate giving the target CC at this idler dark probability."""
        target = self.targets.target_cc

        def excess(mu: float) -> float:
            return self._run(mu, dark_i).cc - target

        if excess(0.0) >= 0:
            raise InfeasibleCalibrationError(
                f"dark counts alone exceed target CC at dark_prob_i={dark_i:.3e}"
            )
        high = 1e-3
        while excess(high) < 0:
            high *= 2
            if high > _MU_CEILING:
                raise InfeasibleCalibrationError("target CC unreachable with mu <= 10")
        return brentq(excess, 0.0, high, xtol=1e-16, rtol=1e-13)

    def car_at(self, dark_i: float) -> float:
        mu = self.mu_for_cc(dark_i)
        return self._run(mu, dark_i).car

    def fit_heater(self) -> float:
        """Heater resistance that puts the anchor charge on the anchor wavelength at the anchor voltage."""
        power = required_power(self.targets.anchor_charge, self.targets.anchor_lambda_nm, self.config.resonator)
        if power <= 0:
            raise InfeasibleCalibrationError("anchor charge is aligned at zero drive, heater is unconstrained")
        return 1e3 * self.targets.anchor_voltage_v ** 2 / power

    def calibrate(self) -> CalibrationResult:
        """
        Solve the CC and mean-CAR targets.

        For each idler dark probability the pair rate is fixed by the CC
        target; the dark probability is then chosen so the CAR hits the
        midpoint of the published range. Darks only lower CAR, so the
        problem is infeasible when even a dark-free source falls short.

        Returns:
            CalibrationResult

        Raises:
            InfeasibleCalibrationError: If no nonnegative solution exists
        """
        car_target = self.targets.car_target
        logger.info("Calibration started", extra={
            "target_cc": self.targets.target_cc, "car_target": car_target, "dark_ratio": self.targets.dark_ratio
        })

        best_car = self.car_at(0.0)
        if best_car < car_target:
            raise InfeasibleCalibrationError(
                f"CAR without dark counts is {best_car:.2f}, below target {car_target:.2f}; "
                "losses too high for the CC target"
            )

        if best_car == car_target:
            dark_i = 0.0
        else:
            high = 1e-6
            while self.car_at(high) > car_target:
                high *= 10
                if high > _DARK_CEILING:
                    raise InfeasibleCalibrationError("CAR target unreachable with dark_prob_i <= 0.5")
            dark_i = brentq(lambda d: self.car_at(d) - car_target, 0.0, high, xtol=1e-18, rtol=1e-12)

        mu = self.mu_for_cc(dark_i)
        fitted = self._run(mu, dark_i)
        heater = self.fit_heater()
        result = CalibrationResult(
            mu=mu,
            dark_prob_s=self.targets.dark_ratio * dark_i,
            dark_prob_i=dark_i,
            heater_ohms=heater,
            residuals={
                "cc": fitted.cc - self.targets.target_cc,
                "car": fitted.car - car_target
            }
        )

        logger.info("Calibration converged", extra={
            "mu": mu, "dark_prob_i": dark_i, "heater_ohms": heater, "residuals": result.residuals
        })
        return result


def calibrate(config: ExperimentConfig, targets: Optional[CalibrationParams] = None) -> CalibrationResult:
    return Calibrator(config, targets).calibrate()
