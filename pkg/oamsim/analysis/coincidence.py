"""CC, ACC and CAR extraction from a TCSPC histogram."""
from typing import List, Optional, Sequence

import numpy as np

from oamsim.core.exceptions import AnalysisError, DegenerateHistogramError, SpanTooSmallError
from oamsim.models.histogram import TcspcHistogram
from oamsim.models.report import CarStats, CoincidenceReport
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)


def window_bins(window_ps: int, bin_width_ps: int) -> int:
    """Number of bins in a coincidence window (5 for 320 ps at 64 ps)."""
    n = int(round(window_ps / bin_width_ps))
    if n < 1:
        raise AnalysisError(f"window_ps={window_ps} is narrower than one bin")
    return n


def main_peak_bin(hist: TcspcHistogram) -> int:
    """Index of the maximum bin; ties go to the bin whose centre is closest to zero delay."""
    if hist.total == 0:
        raise DegenerateHistogramError("histogram is empty, no main peak")
    candidates = np.flatnonzero(hist.counts == hist.counts.max())
    distance = np.abs(hist.bin_centres[candidates])
    return int(candidates[np.argmin(distance)])


def window_sum(hist: TcspcHistogram, centre_bin: int, window_ps: int) -> int:
    """Counts in the window of window_ps centred on centre_bin."""
    n = window_bins(window_ps, hist.bin_width_ps)
    first = centre_bin - n // 2
    if first < 0 or first + n > hist.n_bins:
        raise SpanTooSmallError(
            f"window at bin {centre_bin} leaves the histogram (0..{hist.n_bins - 1})"
        )
    return int(hist.counts[first:first + n].sum())


def side_peak_offsets(bin_width_ps: int, period_ns: float, k: int = 14) -> List[int]:
    """Bin offsets of the k side peaks, ordered j = -k/2..-1, 1..k/2 periods."""
    period_bins = period_ns * 1e3 / bin_width_ps
    half = k // 2
    return [int(np.rint(j * period_bins)) for j in list(range(-half, 0)) + list(range(1, half + 1))]


def extract_cc(hist: TcspcHistogram, window_ps: int = 320) -> int:
    """
    Coincidence counts: the window centred on the main peak.

    Raises:
        DegenerateHistogramError: If the histogram is empty
    """
    return window_sum(hist, main_peak_bin(hist), window_ps)


def extract_acc(hist: TcspcHistogram, window_ps: int = 320, period_ns: float = 25.0, k: int = 14) -> List[int]:
    """
    Accidental counts: the same window at each side peak, one and more periods away.

    Raises:
        SpanTooSmallError: If a side window falls outside the histogram
    """
    main = main_peak_bin(hist)
    return [window_sum(hist, main + offset, window_ps) for offset in side_peak_offsets(hist.bin_width_ps, period_ns, k)]


def car_stats(cc: int, acc_list: Sequence[int]) -> CarStats:
    """
    Per-side-peak CAR = cc / acc_j summarised as min, max and mean.

    A side peak with no counts does not divide; it contributes cc as a
    lower bound on its CAR and marks the result as a lower bound.
    """
    if not acc_list:
        raise AnalysisError("no accidental windows")
    lower_bound = any(a == 0 for a in acc_list)
    ratios = [cc / a if a > 0 else float(cc) for a in acc_list]
    mean_acc = sum(acc_list) / len(acc_list)
    pooled: Optional[float] = cc / mean_acc if mean_acc > 0 else None
    if lower_bound:
        logger.warning("Empty side peak, CAR is a lower bound", extra={"cc": cc})
    return CarStats(
        car_min=min(ratios),
        car_max=max(ratios),
        car_mean=sum(ratios) / len(ratios),
        car_pooled=pooled,
        car_lower_bound=lower_bound
    )


def coincidence_report(
    hist: TcspcHistogram,
    window_ps: int = 320,
    period_ns: float = 25.0,
    k: int = 14,
    seed: Optional[int] = None,
    config_hash: Optional[str] = None
) -> CoincidenceReport:
    """CC, ACC and CAR summary of a histogram."""
    cc = extract_cc(hist, window_ps)
    acc = extract_acc(hist, window_ps, period_ns, k)
    stats = car_stats(cc, acc)
    return CoincidenceReport(
        cc=cc,
        acc=acc,
        car_min=stats.car_min,
        car_max=stats.car_max,
        car_mean=stats.car_mean,
        car_pooled=stats.car_pooled,
        car_lower_bound=stats.car_lower_bound,
        window_ps=window_ps,
        period_ns=period_ns,
        seed=seed,
        config_hash=config_hash
    )
