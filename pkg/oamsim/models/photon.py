"""Data model for a signal photon converted to an OAM state."""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Any, Tuple

SPECTRUM_MIN_CHARGE = -7
SPECTRUM_SIZE = 15


class Handedness(str, Enum):
    """Circular polarization component of the azimuthally polarized emission."""
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class OamPhoton:
    """
    OAM photon with its charge spectrum over -7..7.

    The azimuthally polarized field splits into circular components with
    l_left = l + 1 and l_right = l - 1.
    """
    charge: int
    spectrum: Tuple[float, ...]
    l_left: int
    l_right: int

    def __post_init__(self):
        if len(self.spectrum) != SPECTRUM_SIZE:
            raise ValueError(f"spectrum must have {SPECTRUM_SIZE} weights over -7..7")
        if any(w < 0 for w in self.spectrum):
            raise ValueError("spectrum weights must be nonnegative")
        if abs(sum(self.spectrum) - 1.0) > 1e-12:
            raise ValueError("spectrum must sum to 1")
        if self.l_left != self.charge + 1 or self.l_right != self.charge - 1:
            raise ValueError("l_left = l + 1 and l_right = l - 1 required")

    @classmethod
    def with_charge(cls, charge: int, spectrum: Tuple[float, ...]) -> 'OamPhoton':
        return cls(charge=charge, spectrum=tuple(spectrum), l_left=charge + 1, l_right=charge - 1)

    def weight(self, m: int) -> float:
        """Spectral weight at charge m (0 outside the support)."""
        index = m - SPECTRUM_MIN_CHARGE
        if 0 <= index < SPECTRUM_SIZE:
            return self.spectrum[index]
        return 0.0

    def projection(self, handedness: Handedness) -> int:
        """Charge carried by one circular component."""
        return self.l_left if handedness == Handedness.LEFT else self.l_right

    def to_dict(self) -> Dict[str, Any]:
        return {
            "charge": self.charge,
            "spectrum": {str(m): w for m, w in zip(range(SPECTRUM_MIN_CHARGE, 8), self.spectrum)},
            "l_left": self.l_left,
            "l_right": self.l_right
        }
