"""TCSPC delay histogram between the idler (herald) and signal click streams."""
import math
from functools import reduce
from pathlib import Path
from typing import Iterable, Union

import numpy as np
import pandas as pd

from oamsim.core.exceptions import ReportError, UnsortedStreamError
from oamsim.models.clicks import ClickStream
from oamsim.models.histogram import TcspcHistogram
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)

TimeTags = Union[ClickStream, np.ndarray]

# idler clicks per vectorised pass
_CHUNK = 1 << 20


def _sorted_times(clicks: TimeTags, name: str) -> np.ndarray:
    times = clicks.time_ps if isinstance(clicks, ClickStream) else np.asarray(clicks, dtype=np.int64)
    if times.size > 1 and np.any(np.diff(times) < 0):
        raise UnsortedStreamError(f"{name} clicks are not time-sorted")
    return times


def half_bins_for_span(span_ps: float, bin_width_ps: int) -> int:
    return int(math.ceil(span_ps / bin_width_ps))


def build_histogram(
    signal_clicks: TimeTags,
    idler_clicks: TimeTags,
    bin_width_ps: int = 64,
    span_ps: float = 187_500.0
) -> TcspcHistogram:
    """
    Histogram of delay = t_signal - t_idler over every click pair within the span.

    Bins are centred on multiples of bin_width_ps, from -K to +K bin widths
    with K = ceil(span_ps / bin_width_ps). Each idler click is matched
    against all signal clicks whose delay lands in a bin.

    Args:
        signal_clicks: Time-sorted signal timestamps (ps)
        idler_clicks: Time-sorted idler timestamps (ps)
        bin_width_ps: Bin width
        span_ps: Largest |delay| the histogram must cover

    Returns:
        TcspcHistogram

    Raises:
        UnsortedStreamError: If either stream is out of time order
    """
    signal = _sorted_times(signal_clicks, "signal")
    idler = _sorted_times(idler_clicks, "idler")
    half_bins = half_bins_for_span(span_ps, bin_width_ps)
    histogram = TcspcHistogram.zeros(bin_width_ps, half_bins)

    lowest = histogram.origin_ps
    highest = histogram.origin_ps + histogram.n_bins * bin_width_ps - 1

    for start in range(0, idler.size, _CHUNK):
        heralds = idler[start:start + _CHUNK]
        lo = np.searchsorted(signal, heralds + lowest, side="left")
        hi = np.searchsorted(signal, heralds + highest, side="right")
        matches = hi - lo
        total = int(matches.sum())
        if total == 0:
            continue

        herald_index = np.repeat(np.arange(heralds.size), matches)
        # position within each herald's run of matching signal clicks
        run_offset = np.arange(total) - np.repeat(np.cumsum(matches) - matches, matches)
        signal_index = np.repeat(lo, matches) + run_offset

        delays = signal[signal_index] - heralds[herald_index]
        bins = (delays - histogram.origin_ps) // bin_width_ps
        histogram.counts += np.bincount(bins, minlength=histogram.n_bins)

    logger.debug("Histogram built", extra={
        "signal_clicks": int(signal.size),
        "idler_clicks": int(idler.size),
        "pairs_binned": histogram.total
    })
    return histogram


def merge_histograms(histograms: Iterable[TcspcHistogram]) -> TcspcHistogram:
    """Sum per-block histograms; order does not matter."""
    return reduce(lambda a, b: a.merge(b), histograms)


def export_histogram_csv(histogram: TcspcHistogram, path: Union[str, Path]):
    """Write the histogram as CSV with columns bin_start_ps, count."""
    frame = pd.DataFrame({"bin_start_ps": histogram.bin_starts, "count": histogram.counts})
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
    except OSError as e:
        raise ReportError(f"cannot write {path}: {e}") from e
