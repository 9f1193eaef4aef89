"""Data models for the micro-ring resonator."""
from dataclasses import dataclass, field
from typing import Dict, Any, List


@dataclass(frozen=True)
class DriveSetting:
    """Heater drive; power_mw is derived from voltage and heater resistance."""
    voltage_v: float
    power_mw: float

    @classmethod
    def from_voltage(cls, voltage_v: float, heater_ohms: float) -> 'DriveSetting':
        """Build a drive from a heater voltage (V^2/R in W, stored in mW)."""
        if voltage_v < 0:
            raise ValueError("voltage_v >= 0 required")
        return cls(voltage_v=voltage_v, power_mw=1e3 * voltage_v ** 2 / heater_ohms)

    @classmethod
    def off(cls) -> 'DriveSetting':
        return cls(voltage_v=0.0, power_mw=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"voltage_v": self.voltage_v, "power_mw": self.power_mw}


@dataclass(frozen=True)
class Resonance:
    """One whispering-gallery resonance of the comb."""
    order: int
    wavelength_nm: float


@dataclass(frozen=True)
class TuningPoint:
    """Heater setting that aligns a charge with a target wavelength."""
    charge: int
    order: int
    power_mw: float
    voltage_v: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "charge": self.charge,
            "order": self.order,
            "power_mw": self.power_mw,
            "voltage_v": self.voltage_v
        }


@dataclass
class CombFit:
    """Spacing and linewidth measured from a sampled transmission spectrum."""
    fsr_nm: float
    fwhm_nm: float
    dip_wavelengths_nm: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fsr_nm": self.fsr_nm,
            "fwhm_nm": self.fwhm_nm,
            "dip_wavelengths_nm": self.dip_wavelengths_nm
        }
