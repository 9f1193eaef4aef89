"""Pulsed-pump SFWM pair source in the silicon wire waveguide."""
from typing import Iterator, List, Tuple

import numpy as np
from scipy import constants
from scipy.stats import poisson

from oamsim.core.exceptions import EnergyConservationError
from oamsim.core.parameters import PairConfig, PumpConfig
from oamsim.models.pairs import PairBlock, PairEvent, PairStatistics
from oamsim.simulation.streams import Stream, block_rng, thinned_indices
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)

# c in nm*THz
C_NM_THZ = constants.c * 1e-3

RAMAN_SHIFT_THZ = 15.6
RAMAN_WIDTH_THZ = 0.103

DEFAULT_BLOCK_PULSES = 2 ** 23


def idler_wavelength(lambda_p_nm: float, lambda_s_nm: float) -> float:
    """
    Idler wavelength from 2/lambda_p = 1/lambda_s + 1/lambda_i.

    Raises:
        EnergyConservationError: If lambda_s leaves no positive idler wavelength
    """
    inverse = 2.0 / lambda_p_nm - 1.0 / lambda_s_nm
    if lambda_s_nm <= 0 or inverse <= 0:
        raise EnergyConservationError(
            f"lambda_s={lambda_s_nm} nm admits no idler for lambda_p={lambda_p_nm} nm"
        )
    return 1.0 / inverse


def frequency_offset_thz(lambda_p_nm: float, lambda_x_nm: float) -> float:
    """Optical frequency of lambda_x minus that of the pump, in THz."""
    return C_NM_THZ / lambda_x_nm - C_NM_THZ / lambda_p_nm


def raman_band_clear(lambda_p_nm: float, lambda_x_nm: float, guard: float = 3.0) -> bool:
    """True when lambda_x is outside the silicon Raman band widened by guard half-widths."""
    offset = abs(frequency_offset_thz(lambda_p_nm, lambda_x_nm))
    half = RAMAN_WIDTH_THZ / 2 * guard
    return not (RAMAN_SHIFT_THZ - half <= offset <= RAMAN_SHIFT_THZ + half)


def pair_statistics(pump: PumpConfig, pairs: PairConfig) -> PairStatistics:
    """Signal/idler pair for the configured pump, with the Raman check logged."""
    lambda_i = idler_wavelength(pump.lambda_p_nm, pairs.lambda_s_nm)
    for name, wavelength in (("signal", pairs.lambda_s_nm), ("idler", lambda_i)):
        if not raman_band_clear(pump.lambda_p_nm, wavelength, pairs.raman_guard):
            logger.warning("Photon inside the Raman band", extra={"photon": name, "wavelength_nm": wavelength})
    return PairStatistics(mu=pairs.mu, lambda_s_nm=pairs.lambda_s_nm, lambda_i_nm=lambda_i)


def emission_probability(mu: float, statistics: str = "poisson") -> float:
    """Probability that a pulse emits at least one pair."""
    if statistics == "thermal":
        return mu / (1.0 + mu)
    return float(-np.expm1(-mu))


def draw_pair_numbers(rng: np.random.Generator, size: int, mu: float, statistics: str = "poisson") -> np.ndarray:
    """Pair numbers of emitting pulses (the pair-number law conditioned on n >= 1)."""
    if size == 0:
        return np.empty(0, dtype=np.int64)
    if statistics == "thermal":
        return rng.geometric(1.0 / (1.0 + mu), size=size).astype(np.int64)

    p0 = np.exp(-mu)
    u = rng.uniform(p0, 1.0, size=size)
    counts = np.ones(size, dtype=np.int64)
    # u below P(n <= 1) is a single pair; only the rest need the inverse CDF
    multi = u > p0 * (1.0 + mu)
    if np.any(multi):
        counts[multi] = np.maximum(poisson.ppf(u[multi], mu), 1).astype(np.int64)
    return counts


def pulse_blocks(n_pulses: int, block_pulses: int = DEFAULT_BLOCK_PULSES) -> List[Tuple[int, int, int]]:
    """Fixed partition of [0, n_pulses) into (block index, start, size)."""
    return [
        (index, start, min(block_pulses, n_pulses - start))
        for index, start in enumerate(range(0, n_pulses, block_pulses))
    ]


def sample_pair_block(
    seed: int,
    block: int,
    start: int,
    n_pulses: int,
    mu: float,
    statistics: str = "poisson"
) -> PairBlock:
    """Emitting pulses of one block; depends only on (seed, block) and the block bounds."""
    rng = block_rng(seed, Stream.PAIRS, block)
    local = thinned_indices(rng, n_pulses, emission_probability(mu, statistics))
    return PairBlock(
        index=block,
        start=start,
        n_pulses=n_pulses,
        pulse_index=start + local,
        n_pairs=draw_pair_numbers(rng, local.size, mu, statistics)
    )


def iter_pair_blocks(
    n_pulses: int,
    mu: float,
    seed: int,
    statistics: str = "poisson",
    block_pulses: int = DEFAULT_BLOCK_PULSES
) -> Iterator[PairBlock]:
    if mu >= 0.1:
        logger.warning("Multi-pair regime, first-order oracle inaccurate", extra={"mu": mu})
    for index, start, size in pulse_blocks(n_pulses, block_pulses):
        yield sample_pair_block(seed, index, start, size, mu, statistics)


def sample_pair_events(
    pump: PumpConfig,
    stats: PairStatistics,
    seed: int,
    statistics: str = "poisson",
    block_pulses: int = DEFAULT_BLOCK_PULSES
) -> Iterator[PairEvent]:
    """
    Stream of emitting pulses over the whole acquisition.

    Pulses without pairs are skipped by geometric gaps; the result is
    distributed exactly like per-pulse sampling.

    Args:
        pump: Pump config (sets the pulse count)
        stats: Pair statistics (mu)
        seed: Run seed
        statistics: "poisson" or "thermal"
        block_pulses: Pulse-block size of the random-stream partition

    Yields:
        PairEvent for each pulse with at least one pair, in pulse order
    """
    for block in iter_pair_blocks(pump.n_pulses, stats.mu, seed, statistics, block_pulses):
        yield from block.events()
