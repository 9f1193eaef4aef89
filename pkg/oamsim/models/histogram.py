"""Data model for the TCSPC delay histogram."""
from dataclasses import dataclass

import numpy as np


@dataclass
class TcspcHistogram:
    """
    Binned signal-minus-idler delays.

    Bin i covers [origin_ps + i*bin_width_ps, origin_ps + (i+1)*bin_width_ps).
    """
    bin_width_ps: int
    origin_ps: int
    counts: np.ndarray

    @classmethod
    def zeros(cls, bin_width_ps: int, half_bins: int) -> 'TcspcHistogram':
        """Empty histogram with bins centred on k*bin_width for |k| <= half_bins."""
        origin = -half_bins * bin_width_ps - bin_width_ps // 2
        return cls(bin_width_ps=bin_width_ps, origin_ps=origin,
                   counts=np.zeros(2 * half_bins + 1, dtype=np.int64))

    @property
    def n_bins(self) -> int:
        return int(self.counts.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def bin_starts(self) -> np.ndarray:
        return self.origin_ps + self.bin_width_ps * np.arange(self.n_bins, dtype=np.int64)

    @property
    def bin_centres(self) -> np.ndarray:
        return self.bin_starts + self.bin_width_ps / 2

    def merge(self, other: 'TcspcHistogram') -> 'TcspcHistogram':
        """Sum two histograms on the same binning."""
        if (other.bin_width_ps, other.origin_ps, other.n_bins) != (self.bin_width_ps, self.origin_ps, self.n_bins):
            raise ValueError("histograms use different binnings")
        return TcspcHistogram(self.bin_width_ps, self.origin_ps, self.counts + other.counts)
