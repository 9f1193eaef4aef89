"""Closed-form coincidence expectations used as the Monte Carlo oracle.

Counts are first order in the per-pulse click probabilities: a pulse
contributes a true coincidence with probability mu*ss*si, and two
independent clicks meet in a window with the product of their rates.
For Poisson pair numbers and one click per surviving photon the
photon-photon terms are exact.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import norm

from oamsim.analysis.coincidence import side_peak_offsets, window_bins
from oamsim.core.parameters import ExperimentConfig
from oamsim.simulation.detection import db_to_fraction, scenario_survivals
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)

VALIDITY_LIMIT = 0.01


def expected_counts(
    mu: float,
    survival_s: float,
    survival_i: float,
    dark_s: float,
    dark_i: float,
    n_pulses: float,
    *,
    capture: float = 1.0,
    duty: float = 1.0,
    side_capture: Optional[float] = None
) -> Tuple[float, float]:
    """
    Expected (CC, ACC) for one coincidence window.

    acc = n * (mu*ss + ds) * (mu*si + di) when capture = duty = 1.

    Args:
        mu: Mean pairs per pulse
        survival_s: Signal click probability per photon
        survival_i: Idler click probability per photon
        dark_s: Signal dark probability per pulse
        dark_i: Idler dark probability per pulse
        n_pulses: Number of pulses
        capture: Fraction of true-pair delays inside the main window
        duty: Fraction of a period covered by the window (dark clicks are uniform)
        side_capture: Capture for photon-photon accidentals (default: capture)

    Returns:
        (expected CC, expected ACC per side window)
    """
    if mu * max(survival_s, survival_i) >= VALIDITY_LIMIT:
        logger.warning("Oracle outside first-order regime", extra={
            "mu": mu, "survival_s": survival_s, "survival_i": survival_i
        })
    side = capture if side_capture is None else side_capture
    acc = n_pulses * (
        mu * mu * survival_s * survival_i * side
        + duty * (mu * survival_s * dark_i + dark_s * mu * survival_i + dark_s * dark_i)
    )
    cc = n_pulses * mu * survival_s * survival_i * capture + acc
    return cc, acc


def window_capture(sigma_s_ps: float, sigma_i_ps: float, window_ps: float, offset_ps: float = 0.0) -> float:
    """
    Probability that a jittered pair delay falls in a window.

    The delay spread is normal with sigma = hypot(sigma_s, sigma_i); the
    window is centred offset_ps away from the true delay.
    """
    sigma = float(np.hypot(sigma_s_ps, sigma_i_ps))
    half = window_ps / 2
    return float(norm.cdf((offset_ps + half) / sigma) - norm.cdf((offset_ps - half) / sigma))


def side_window_captures(config: ExperimentConfig) -> List[float]:
    """Capture of each side window, whose centre is rounded to the bin grid."""
    analysis = config.analysis
    period_ps = config.pump.period_ps
    half = analysis.side_peaks // 2
    js = list(range(-half, 0)) + list(range(1, half + 1))
    offsets = side_peak_offsets(analysis.bin_width_ps, period_ps / 1e3, analysis.side_peaks)
    width = window_bins(analysis.window_ps, analysis.bin_width_ps) * analysis.bin_width_ps
    return [
        window_capture(
            config.spad_signal.jitter_sigma_ps,
            config.spad_idler.jitter_sigma_ps,
            width,
            offset * analysis.bin_width_ps - j * period_ps
        )
        for j, offset in zip(js, offsets)
    ]


@dataclass(frozen=True)
class ExpectedRun:
    """Oracle expectation for one scenario run."""
    cc: float
    acc: float
    survival_s: float
    survival_i: float
    capture: float
    duty: float
    n_pulses: int

    @property
    def car(self) -> float:
        return self.cc / self.acc if self.acc > 0 else float("inf")


def expected_run(
    config: ExperimentConfig,
    charge: Optional[int] = None,
    n_pulses: Optional[int] = None,
    mu: Optional[float] = None,
    dark_s: Optional[float] = None,
    dark_i: Optional[float] = None
) -> ExpectedRun:
    """
    Oracle expectation of a bus-only (charge None) or OAM run with the
    window, jitter and period of the config.
    """
    n = config.pump.n_pulses if n_pulses is None else n_pulses
    survival_s, survival_i = scenario_survivals(config, charge)
    analysis = config.analysis
    width = window_bins(analysis.window_ps, analysis.bin_width_ps) * analysis.bin_width_ps
    capture = window_capture(config.spad_signal.jitter_sigma_ps, config.spad_idler.jitter_sigma_ps, width)
    duty = width / config.pump.period_ps
    cc, acc = expected_counts(
        config.pairs.mu if mu is None else mu,
        survival_s,
        survival_i,
        config.spad_signal.dark_prob_per_gate if dark_s is None else dark_s,
        config.spad_idler.dark_prob_per_gate if dark_i is None else dark_i,
        n,
        capture=capture,
        duty=duty,
        side_capture=float(np.mean(side_window_captures(config)))
    )
    return ExpectedRun(cc, acc, survival_s, survival_i, capture, duty, n)


def pre_detection_cc(expected_cc: float, path_db: float) -> float:
    """CC before the detection setup: measured CC with the path loss undone."""
    return expected_cc / db_to_fraction(path_db)
