"""Experiment parameter records and the TOML config loader.

Each device/measurement module owns one section of the config file:

    [resonator] [pump] [pairs] [emitter] [loss] [spad_signal] [spad_idler]
    [analysis] [calibration]

Omitted sections and fields fall back to the published device values.
"""
import hashlib
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import tomli_w
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_serializer, field_validator, model_validator

from oamsim.core.exceptions import ConfigParseError, ConfigValidationError
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)

BASIS_CHARGES = tuple(range(-6, 7))
SUPPORT_CHARGES = tuple(range(-7, 8))
OAM_RUN_CHARGES = (2, 3, 4, 5, 6, -6, -5, -4, -3, -2, -1)


def _affine_efficiency_table() -> Dict[int, float]:
    # 1.97% at |l|=1 falling to 0.93% at |l|=6
    return {k: round(0.0197 - 0.00208 * (k - 1), 8) for k in range(1, 7)}


def _default_path_db() -> Dict[int, float]:
    return {
        2: 16.20, 3: 16.75, 4: 15.40, 5: 14.53, 6: 15.10,
        -6: 14.90, -5: 15.80, -4: 16.90, -3: 17.60, -2: 18.30, -1: 18.96,
    }


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class ResonatorParams(_Section):
    """Micro-ring comb, thermo-optic tuning, heater and charge mapping."""
    fsr_nm: float = 0.5
    fwhm_nm: float = 0.045
    lambda_ref_nm: float = 1557.12
    order_ref: int = 282
    dip_depth: float = 0.45
    thermo_slope_nm_per_mw: float = 0.02
    heater_ohms: float = 3252.6817
    n_waveguides: int = 32
    charge_offset: int = 24
    order_min: int = 262
    order_max: int = 330
    max_power_mw: float = 500.0

    @model_validator(mode="after")
    def check_invariants(self):
        if not (self.fsr_nm > self.fwhm_nm > 0):
            raise ValueError("fsr_nm > fwhm_nm > 0 violated")
        if not 0 < self.dip_depth <= 1:
            raise ValueError("dip_depth in (0, 1] violated")
        if self.thermo_slope_nm_per_mw <= 0:
            raise ValueError("thermo_slope_nm_per_mw > 0 violated")
        if self.heater_ohms <= 0:
            raise ValueError("heater_ohms > 0 violated")
        if self.n_waveguides != 32:
            raise ValueError("n_waveguides = 32 violated")
        if not 0 <= self.charge_offset < self.n_waveguides:
            raise ValueError("charge_offset in [0, n_waveguides) violated")
        if self.order_min > self.order_max:
            raise ValueError("order_min <= order_max violated")
        if self.max_power_mw <= 0:
            raise ValueError("max_power_mw > 0 violated")
        return self


class PumpConfig(_Section):
    """Pulsed pump and acquisition time."""
    lambda_p_nm: float = 1552.5
    rep_rate_hz: float = 4.0e7
    duration_s: float = 600.0

    @field_validator("rep_rate_hz", "duration_s", "lambda_p_nm")
    @classmethod
    def positive(cls, value: float, info) -> float:
        if value <= 0:
            raise ValueError(f"{info.field_name} > 0 violated")
        return value

    @property
    def n_pulses(self) -> int:
        return int(round(self.rep_rate_hz * self.duration_s))

    @property
    def period_ps(self) -> float:
        return 1e12 / self.rep_rate_hz


class PairConfig(_Section):
    """SFWM pair statistics; lambda_s_nm is the short-wavelength photon."""
    mu: float = 0.023269996
    lambda_s_nm: float = 1547.72
    statistics: Literal["poisson", "thermal"] = "poisson"
    raman_guard: float = 3.0

    @field_validator("mu")
    @classmethod
    def mu_nonnegative(cls, value: float) -> float:
        if value < 0:
            raise ValueError("mu >= 0 violated")
        return value


class EmitterParams(_Section):
    """OAM emitter efficiency and mode-purity model."""
    per_waveguide_coupling: float = 0.01
    efficiency_table: Dict[int, float] = Field(default_factory=_affine_efficiency_table)
    purity_target: float = 0.85
    spectrum_overrides: Dict[int, List[float]] = Field(default_factory=dict)

    @property
    def purity_basis(self) -> tuple:
        return BASIS_CHARGES

    @property
    def spectrum_support(self) -> tuple:
        return SUPPORT_CHARGES

    @field_validator("efficiency_table")
    @classmethod
    def efficiencies_in_range(cls, table: Dict[int, float]) -> Dict[int, float]:
        for charge, value in table.items():
            if charge < 0:
                raise ValueError("efficiency_table keys are |l| >= 0")
            if not 0 < value < 1:
                raise ValueError(f"efficiency values in (0, 1) violated for |l|={charge}")
        return table

    @field_validator("spectrum_overrides")
    @classmethod
    def normalise_spectra(cls, spectra: Dict[int, List[float]]) -> Dict[int, List[float]]:
        normalised = {}
        for charge, weights in spectra.items():
            if len(weights) != len(SUPPORT_CHARGES):
                raise ValueError(f"spectrum for l={charge} needs {len(SUPPORT_CHARGES)} weights over -7..7")
            if any(w < 0 for w in weights) or sum(weights) <= 0:
                raise ValueError(f"spectrum for l={charge} must be nonnegative with positive mass")
            total = sum(weights)
            normalised[charge] = [w / total for w in weights]
        return normalised

    @model_validator(mode="after")
    def check_purity(self):
        if not 0 < self.purity_target <= 1:
            raise ValueError("purity_target in (0, 1] violated")
        if not 0 < self.per_waveguide_coupling <= 1:
            raise ValueError("per_waveguide_coupling in (0, 1] violated")
        return self

    @field_serializer("efficiency_table", "spectrum_overrides")
    def string_keys(self, table: Dict[int, Any]) -> Dict[str, Any]:
        return {str(k): v for k, v in sorted(table.items())}


class LossBudget(_Section):
    """Optical losses between the chip and the detectors."""
    coupling_in_db: float = 7.0
    sww_db: float = 1.0
    path_db: Dict[int, float] = Field(default_factory=_default_path_db)
    idler_arm_db: float = 3.5
    objective_coupling: float = 0.40

    @model_validator(mode="after")
    def check_losses(self):
        if min(self.coupling_in_db, self.sww_db, self.idler_arm_db) < 0:
            raise ValueError("all dB values >= 0 violated")
        if not 0 < self.objective_coupling <= 1:
            raise ValueError("objective_coupling in (0, 1] violated")
        for charge, db in self.path_db.items():
            if db < 0:
                raise ValueError(f"path_db >= 0 violated for l={charge}")
            # path_db already includes the objective, so it cannot be smaller
            if 10 ** (-db / 10) > self.objective_coupling:
                raise ValueError(f"path_db for l={charge} smaller than the objective coupling loss")
        return self

    @field_serializer("path_db")
    def string_keys(self, table: Dict[int, float]) -> Dict[str, float]:
        return {str(k): v for k, v in sorted(table.items())}


class SpadParams(_Section):
    """Single-photon avalanche diode model."""
    det_efficiency: float = 0.17
    dark_prob_per_gate: float = 0.0
    jitter_sigma_ps: float = 60.0

    @model_validator(mode="after")
    def check_spad(self):
        if not 0 < self.det_efficiency <= 1:
            raise ValueError("det_efficiency in (0, 1] violated")
        if not 0 <= self.dark_prob_per_gate < 1:
            raise ValueError("dark_prob_per_gate in [0, 1) violated")
        if self.jitter_sigma_ps <= 0:
            raise ValueError("jitter_sigma_ps > 0 violated")
        return self


class AnalysisParams(_Section):
    """TCSPC histogram and CAR extraction settings."""
    bin_width_ps: int = 64
    window_ps: int = 320
    side_peaks: int = 14
    span_periods: float = 7.5

    @model_validator(mode="after")
    def check_analysis(self):
        if self.bin_width_ps <= 0 or self.window_ps < self.bin_width_ps:
            raise ValueError("window_ps >= bin_width_ps > 0 violated")
        if self.side_peaks <= 0 or self.side_peaks % 2:
            raise ValueError("side_peaks must be a positive even number")
        if self.span_periods * 2 < self.side_peaks:
            raise ValueError("span_periods must cover side_peaks/2 periods")
        return self


class CalibrationParams(_Section):
    """Published aggregates the calibration reproduces."""
    target_cc: float = 77900.0
    car_min: float = 34.09
    car_max: float = 52.05
    dark_ratio: float = 1e-4
    anchor_voltage_v: float = 13.97
    anchor_charge: int = 4
    anchor_lambda_nm: float = 1557.32

    @model_validator(mode="after")
    def check_targets(self):
        if self.target_cc <= 0:
            raise ValueError("target_cc > 0 violated")
        if not 1 < self.car_min <= self.car_max:
            raise ValueError("1 < car_min <= car_max violated")
        if self.dark_ratio < 0:
            raise ValueError("dark_ratio >= 0 violated")
        return self

    @property
    def car_target(self) -> float:
        return (self.car_min + self.car_max) / 2


def _default_idler_spad() -> SpadParams:
    return SpadParams(dark_prob_per_gate=5.98002385e-4)


def _default_signal_spad() -> SpadParams:
    return SpadParams(dark_prob_per_gate=5.98002385e-8)


class ExperimentConfig(BaseModel):
    """Full parameter set of one simulated experiment."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    resonator: ResonatorParams = Field(default_factory=ResonatorParams)
    pump: PumpConfig = Field(default_factory=PumpConfig)
    pairs: PairConfig = Field(default_factory=PairConfig)
    emitter: EmitterParams = Field(default_factory=EmitterParams)
    loss: LossBudget = Field(default_factory=LossBudget)
    spad_signal: SpadParams = Field(default_factory=_default_signal_spad)
    spad_idler: SpadParams = Field(default_factory=_default_idler_spad)
    analysis: AnalysisParams = Field(default_factory=AnalysisParams)
    calibration: CalibrationParams = Field(default_factory=CalibrationParams)

    def config_hash(self) -> str:
        """Stable short hash of the validated parameter set."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """
    Parse and validate TOML config text.

    Args:
        text: TOML document
        source: Name used in error messages

    Returns:
        Validated experiment config

    Raises:
        ConfigParseError: If the text is not valid TOML
        ConfigValidationError: If a parameter invariant is violated
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        # tomllib reports "(at line N, column M)"
        raise ConfigParseError(f"{source}: {e}") from e

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigValidationError(f"{source}: {problems}") from e


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Load an experiment config file, applying defaults for omitted fields.

    Args:
        path: Path to a TOML file

    Returns:
        Validated experiment config
    """
    config_path = Path(path)
    try:
        text = config_path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigParseError(f"{config_path}: {e}") from e

    config = parse_config(text, source=str(config_path))
    logger.info("Config loaded", extra={"path": str(config_path), "config_hash": config.config_hash()})
    return config


def serialize_config(config: ExperimentConfig) -> str:
    """Render a config as TOML text that parses back to an equal config."""
    return tomli_w.dumps(config.model_dump(mode="json", exclude_none=True))


def apply_patch(config: ExperimentConfig, patch: Optional[Dict[str, Dict[str, Any]]]) -> ExperimentConfig:
    """
    Return a new config with section-level overrides applied and re-validated.

    Args:
        config: Base config
        patch: Mapping of section name to field overrides

    Returns:
        Patched config
    """
    if not patch:
        return config

    data = config.model_dump(mode="json")
    for section, fields in patch.items():
        if section not in data:
            raise ConfigValidationError(f"unknown config section '{section}'")
        data[section].update(fields)

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigValidationError(str(e)) from e
