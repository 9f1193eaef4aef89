"""OAM emitter: routes resonance-aligned signal photons into OAM states."""
from typing import Optional, Sequence, Tuple

from oamsim.core.exceptions import UnknownChargeError, ZeroBasisMassError
from oamsim.core.parameters import BASIS_CHARGES, SUPPORT_CHARGES, EmitterParams, ResonatorParams
from oamsim.device.resonator import aligned_order, charge_of_order
from oamsim.models.photon import OamPhoton
from oamsim.models.resonance import DriveSetting
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)


def emission_efficiency(charge: int, emitter_params: EmitterParams) -> float:
    """
    Fraction of the in-ring signal emitted as charge l.

    Raises:
        UnknownChargeError: If |l| is not in the efficiency table
    """
    try:
        return emitter_params.efficiency_table[abs(charge)]
    except KeyError:
        raise UnknownChargeError(
            f"no emission efficiency for |l|={abs(charge)}; table covers {sorted(emitter_params.efficiency_table)}"
        )


def default_spectrum(charge: int, emitter_params: EmitterParams) -> Tuple[float, ...]:
    """
    Charge spectrum over -7..7 for an emitter tuned to l.

    A configured override wins; otherwise purity_target sits at l and the
    rest is spread evenly over the other basis charges, with nothing at +-7.
    """
    if charge not in BASIS_CHARGES:
        raise UnknownChargeError(f"charge {charge} outside the purity basis -6..6")

    override = emitter_params.spectrum_overrides.get(charge)
    if override is not None:
        return tuple(override)

    leak = (1.0 - emitter_params.purity_target) / (len(BASIS_CHARGES) - 1)
    return tuple(
        emitter_params.purity_target if m == charge else (leak if m in BASIS_CHARGES else 0.0)
        for m in SUPPORT_CHARGES
    )


def purity_of(spectrum: Sequence[float], charge: int) -> float:
    """
    Mode purity I_l / sum of I_m over the -6..6 basis.

    Raises:
        ZeroBasisMassError: If the spectrum has no weight on the basis
    """
    weights = dict(zip(SUPPORT_CHARGES, spectrum))
    basis_mass = sum(weights[m] for m in BASIS_CHARGES)
    if basis_mass <= 0:
        raise ZeroBasisMassError("spectrum has no weight on charges -6..6")
    return weights.get(charge, 0.0) / basis_mass


def try_emit(
    lambda_s_nm: float,
    drive: DriveSetting,
    resonator_params: ResonatorParams,
    emitter_params: EmitterParams
) -> Optional[OamPhoton]:
    """
    Convert a signal photon into an OAM photon if it is resonance-aligned.

    Returns:
        OamPhoton for the aligned order's charge, or None when the photon
        stays in the bus waveguide
    """
    p = aligned_order(lambda_s_nm, drive, resonator_params)
    if p is None:
        return None

    charge = charge_of_order(p, resonator_params)
    photon = OamPhoton.with_charge(charge, default_spectrum(charge, emitter_params))
    logger.debug("Signal photon emitted", extra={"order": p, "charge": charge})
    return photon
