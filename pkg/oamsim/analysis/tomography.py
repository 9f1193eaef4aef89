"""Mode-purity tomography with the 15 SLM phase masks."""
import math
from typing import Optional, Sequence

import numpy as np

from oamsim.core.exceptions import UnknownChargeError, ZeroBasisMassError
from oamsim.core.parameters import BASIS_CHARGES, SUPPORT_CHARGES, EmitterParams, SpadParams
from oamsim.device.emitter import default_spectrum, purity_of
from oamsim.models.photon import OamPhoton
from oamsim.models.report import PurityEstimate
from oamsim.simulation.detection import slm_pass_probability
from oamsim.simulation.streams import Stream, block_rng
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)


def measure_purity_tomography(
    emitter_params: EmitterParams,
    spad: SpadParams,
    charge: int,
    shots: Optional[int] = 1_000_000,
    seed: int = 0,
    spectrum: Optional[Sequence[float]] = None
) -> PurityEstimate:
    """
    Estimate mode purity from one intensity measurement per mask -7..7.

    Each mask records Binomial(shots, spectrum[m] * det_efficiency) clicks;
    purity is I_l over the summed intensities of the -6..6 basis. The
    standard error propagates the binomial variances to first order.

    Args:
        emitter_params: Emitter parameters (default spectrum)
        spad: Detector behind the SLM
        charge: Target charge l, within -6..6
        shots: Photons sent per mask; None gives the noiseless expectation
        seed: Run seed
        spectrum: Explicit spectrum over -7..7 instead of the emitter default

    Returns:
        PurityEstimate with equal left and right circular projections

    Raises:
        UnknownChargeError: If charge is outside -6..6
        ZeroBasisMassError: If no basis mask records any intensity
    """
    if charge not in BASIS_CHARGES:
        raise UnknownChargeError(f"tomography target {charge} outside -6..6")
    weights = tuple(spectrum) if spectrum is not None else default_spectrum(charge, emitter_params)
    photon = OamPhoton.with_charge(charge, weights)
    rates = np.array([slm_pass_probability(photon, m) * spad.det_efficiency for m in SUPPORT_CHARGES])

    if shots is None:
        purity = purity_of(tuple(rates), charge)
        intensities = dict(zip(SUPPORT_CHARGES, rates.tolist()))
        return PurityEstimate(charge, purity, 0.0, None, intensities, purity, purity)

    rng = block_rng(seed, Stream.TOMOGRAPHY, 0)
    counts = rng.binomial(shots, rates)
    intensities = {m: float(c) for m, c in zip(SUPPORT_CHARGES, counts)}

    target = intensities[charge]
    others = sum(intensities[m] for m in BASIS_CHARGES if m != charge)
    basis = target + others
    if basis <= 0:
        raise ZeroBasisMassError(f"no basis intensity recorded for l={charge}")
    purity = target / basis

    def variance(m: int) -> float:
        p = intensities[m] / shots
        return shots * p * (1 - p)

    var_target = variance(charge)
    var_others = sum(variance(m) for m in BASIS_CHARGES if m != charge)
    std_error = math.sqrt(others ** 2 * var_target + target ** 2 * var_others) / basis ** 2

    logger.info("Tomography measured", extra={
        "charge": charge, "shots": shots, "purity": purity, "std_error": std_error
    })
    return PurityEstimate(charge, purity, std_error, shots, intensities, purity, purity)
