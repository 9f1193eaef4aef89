"""Data models for generated photon pairs."""
from dataclasses import dataclass
from typing import Iterator

import numpy as np


@dataclass(frozen=True)
class PairStatistics:
    """Mean pairs per pulse and the energy-conserving wavelength pair."""
    mu: float
    lambda_s_nm: float
    lambda_i_nm: float


@dataclass(frozen=True)
class PairEvent:
    """One emitting pulse."""
    pulse_index: int
    n_pairs: int


@dataclass
class PairBlock:
    """Emitting pulses of one pulse-index block, stored column-wise."""
    index: int
    start: int
    n_pulses: int
    pulse_index: np.ndarray
    n_pairs: np.ndarray

    @property
    def emitting_pulses(self) -> int:
        return int(self.pulse_index.size)

    def events(self) -> Iterator[PairEvent]:
        """Iterate the block as PairEvent records."""
        for pulse, n in zip(self.pulse_index.tolist(), self.n_pairs.tolist()):
            yield PairEvent(pulse_index=pulse, n_pairs=n)
