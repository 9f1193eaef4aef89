"""Data models for scenarios and their reports."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Any, List, Optional, Tuple

import pandas as pd

from oamsim.core.exceptions import ScenarioError
from oamsim.core.parameters import OAM_RUN_CHARGES, ExperimentConfig
from oamsim.models.clicks import ClickStream
from oamsim.models.histogram import TcspcHistogram

RUN_OVERRIDE_KEYS = ("pulses", "voltage_v", "shots", "grid")


class ScenarioKind(str, Enum):
    """Scenario kinds."""
    SWW_ONLY = "sww_only"
    OAM_RUN = "oam_run"
    SPECTRUM_SWEEP = "spectrum_sweep"
    TOMOGRAPHY = "tomography"
    CALIBRATE = "calibrate"


@dataclass
class Scenario:
    """
    One experiment to run.

    overrides holds run knobs (pulses, voltage_v, shots, grid) and config
    section patches, e.g. {"pulses": 10**7, "pairs": {"mu": 0.01}}.
    """
    kind: ScenarioKind
    charge: Optional[int] = None
    seed: int = 0
    overrides: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        try:
            self.kind = ScenarioKind(self.kind)
        except ValueError:
            raise ScenarioError(f"unknown scenario kind '{self.kind}'")

        if self.kind in (ScenarioKind.OAM_RUN, ScenarioKind.TOMOGRAPHY):
            if self.charge not in OAM_RUN_CHARGES:
                raise ScenarioError(
                    f"{self.kind.value} requires charge in {sorted(OAM_RUN_CHARGES)}, got {self.charge}"
                )

        if self.seed < 0:
            raise ScenarioError("seed must be nonnegative")

        for key in self.overrides:
            if key not in RUN_OVERRIDE_KEYS and key not in ExperimentConfig.model_fields:
                raise ScenarioError(f"unknown override '{key}'")

        pulses = self.overrides.get("pulses")
        if pulses is not None and (int(pulses) != pulses or pulses <= 0):
            raise ScenarioError("pulses override must be a positive integer")

    @property
    def config_patch(self) -> Dict[str, Dict[str, Any]]:
        return {k: v for k, v in self.overrides.items() if k not in RUN_OVERRIDE_KEYS}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "charge": self.charge,
            "seed": self.seed,
            "overrides": self.overrides
        }


@dataclass(frozen=True)
class CarStats:
    """Per-side-peak CAR summary."""
    car_min: float
    car_max: float
    car_mean: float
    car_pooled: Optional[float]
    car_lower_bound: bool = False


@dataclass
class CoincidenceReport:
    """CC, the 14 side-peak ACC values and the CAR summary of one histogram."""
    cc: int
    acc: List[int]
    car_min: float
    car_max: float
    car_mean: float
    car_pooled: Optional[float]
    car_lower_bound: bool
    window_ps: int
    period_ns: float
    seed: Optional[int] = None
    config_hash: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cc": self.cc,
            "acc": list(self.acc),
            "car_min": self.car_min,
            "car_max": self.car_max,
            "car_mean": self.car_mean,
            "car_pooled": self.car_pooled,
            "car_lower_bound": self.car_lower_bound,
            "window_ps": self.window_ps,
            "period_ns": self.period_ns,
            "seed": self.seed,
            "config_hash": self.config_hash
        }


@dataclass
class PurityEstimate:
    """Tomographic mode purity with its standard error."""
    charge: int
    purity: float
    std_error: float
    shots: Optional[int]
    intensities: Dict[int, float]
    purity_left: float
    purity_right: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "charge": self.charge,
            "purity": self.purity,
            "std_error": self.std_error,
            "shots": self.shots,
            "intensities": {str(m): v for m, v in sorted(self.intensities.items())},
            "purity_left": self.purity_left,
            "purity_right": self.purity_right
        }


@dataclass
class RunReport:
    """Result of one scenario; only the part matching the scenario kind is set."""
    scenario: Scenario
    config_hash: str
    pulses_simulated: int = 0
    emitting_pulses: int = 0
    coincidence: Optional[CoincidenceReport] = None
    purity: Optional[PurityEstimate] = None
    spectrum: Optional[Dict[str, Any]] = None
    calibration: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = field(default_factory=dict)
    histogram: Optional[TcspcHistogram] = None
    sweep_table: Optional[pd.DataFrame] = None
    clicks: Optional[Tuple[ClickStream, ClickStream]] = None

    def __post_init__(self):
        if self.emitting_pulses > self.pulses_simulated:
            raise ValueError("emitting_pulses exceeds pulses_simulated")

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready dict; histogram, sweep table and clicks are exported as CSV."""
        return {
            "scenario": self.scenario.to_dict(),
            "config_hash": self.config_hash,
            "pulses_simulated": self.pulses_simulated,
            "emitting_pulses": self.emitting_pulses,
            "coincidence": self.coincidence.to_dict() if self.coincidence else None,
            "purity": self.purity.to_dict() if self.purity else None,
            "spectrum": self.spectrum,
            "calibration": self.calibration,
            "details": self.details
        }
