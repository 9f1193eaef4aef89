"""Micro-ring resonator: transmission comb, thermo-optic tuning and order-to-charge mapping."""
import math
from typing import Iterable, List, Optional

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import find_peaks

from oamsim.core.exceptions import AmbiguousResonanceError, ResonatorError, UnreachableChargeError
from oamsim.core.parameters import ResonatorParams
from oamsim.models.resonance import CombFit, DriveSetting, Resonance, TuningPoint
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)

# Slack for wavelengths that sit on a resonance up to float rounding
_EPS_NM = 1e-9


def resonance_wavelength(p: int, drive: DriveSetting, params: ResonatorParams) -> float:
    """
    Wavelength of order p at the given heater drive.

    Args:
        p: WGM order index
        drive: Heater drive
        params: Resonator parameters

    Returns:
        Resonance wavelength in nm
    """
    return (
        params.lambda_ref_nm
        - (p - params.order_ref) * params.fsr_nm
        + params.thermo_slope_nm_per_mw * drive.power_mw
    )


def comb(drive: DriveSetting, params: ResonatorParams) -> List[Resonance]:
    """All modeled resonances at a drive, by ascending order."""
    return [
        Resonance(order=p, wavelength_nm=resonance_wavelength(p, drive, params))
        for p in range(params.order_min, params.order_max + 1)
    ]


def transmission_spectrum(grid_nm, drive: DriveSetting, params: ResonatorParams) -> np.ndarray:
    """
    Bus-waveguide transmission over a wavelength grid.

    Each resonance is a Lorentzian dip of depth dip_depth and width fwhm_nm;
    overlapping tails add and the result is clamped to [0, 1].
    """
    grid = np.atleast_1d(np.asarray(grid_nm, dtype=float))
    orders = np.arange(params.order_min, params.order_max + 1)
    centres = (
        params.lambda_ref_nm
        - (orders - params.order_ref) * params.fsr_nm
        + params.thermo_slope_nm_per_mw * drive.power_mw
    )
    half = params.fwhm_nm / 2
    out = np.empty(grid.size)
    # chunked so long sweeps do not build a huge detuning matrix
    for start in range(0, grid.size, 4096):
        detuning = grid[start:start + 4096, None] - centres[None, :]
        dips = (half ** 2 / (detuning ** 2 + half ** 2)).sum(axis=1)
        out[start:start + 4096] = 1.0 - params.dip_depth * dips
    return np.clip(out, 0.0, 1.0)


def transmission(lambda_nm: float, drive: DriveSetting, params: ResonatorParams) -> float:
    """Bus-waveguide transmission at one wavelength, in [0, 1]."""
    return float(transmission_spectrum([lambda_nm], drive, params)[0])


def aligned_order(
    lambda_nm: float,
    drive: DriveSetting,
    params: ResonatorParams,
    tol_nm: Optional[float] = None
) -> Optional[int]:
    """
    Order whose resonance lies within tol_nm of lambda_nm, if any.

    Args:
        lambda_nm: Wavelength to test
        drive: Heater drive
        params: Resonator parameters
        tol_nm: Alignment tolerance (default fwhm_nm/2)

    Returns:
        The aligned order, or None when lambda_nm is off-resonance or out of band

    Raises:
        AmbiguousResonanceError: If tol_nm >= fsr_nm/2, so two orders could match
    """
    tol = params.fwhm_nm / 2 if tol_nm is None else tol_nm
    if tol >= params.fsr_nm / 2:
        raise AmbiguousResonanceError(
            f"tol_nm={tol} admits two resonances (fsr_nm/2={params.fsr_nm / 2})"
        )
    if tol > params.fwhm_nm / 2:
        logger.warning("Alignment tolerance wider than half linewidth", extra={"tol_nm": tol})

    shift = params.thermo_slope_nm_per_mw * drive.power_mw
    p = params.order_ref + round((params.lambda_ref_nm + shift - lambda_nm) / params.fsr_nm)
    if not params.order_min <= p <= params.order_max:
        return None
    if abs(resonance_wavelength(p, drive, params) - lambda_nm) <= tol + _EPS_NM:
        return p
    return None


def charge_of_order(p: int, params: ResonatorParams) -> int:
    """Topological charge emitted by order p, folded into (-N/2, N/2]."""
    n = params.n_waveguides
    m = (p - params.charge_offset) % n
    return m - n if m > n // 2 else m


def _eligible_order(charge: int, lambda_target_nm: float, params: ResonatorParams) -> int:
    """Smallest in-band order with this charge that a red shift can bring onto the target."""
    off = DriveSetting.off()
    for p in range(params.order_min, params.order_max + 1):
        if charge_of_order(p, params) != charge:
            continue
        if resonance_wavelength(p, off, params) <= lambda_target_nm + _EPS_NM:
            return p
    raise UnreachableChargeError(
        f"no order with charge {charge} lies at or below {lambda_target_nm} nm "
        f"in orders {params.order_min}..{params.order_max}"
    )


def required_power(charge: int, lambda_target_nm: float, params: ResonatorParams) -> float:
    """
    Heater power that aligns the given charge with the target wavelength.

    Args:
        charge: Topological charge l
        lambda_target_nm: Wavelength to align (the signal photon)
        params: Resonator parameters

    Returns:
        Minimal nonnegative power in mW

    Raises:
        UnreachableChargeError: If no eligible order exists or the power exceeds max_power_mw
    """
    p = _eligible_order(charge, lambda_target_nm, params)
    gap = lambda_target_nm - resonance_wavelength(p, DriveSetting.off(), params)
    power = max(0.0, gap / params.thermo_slope_nm_per_mw)
    if power > params.max_power_mw:
        raise UnreachableChargeError(
            f"charge {charge} needs {power:.1f} mW, above max_power_mw={params.max_power_mw}"
        )
    return power


def drive_for_power(power_mw: float, params: ResonatorParams) -> DriveSetting:
    """Heater drive delivering power_mw; voltage = sqrt(P * R) with P in W."""
    if power_mw < 0:
        raise ResonatorError(f"power_mw >= 0 required, got {power_mw}")
    return DriveSetting(voltage_v=math.sqrt(power_mw * params.heater_ohms / 1e3), power_mw=power_mw)


def drive_for_voltage(voltage_v: float, params: ResonatorParams) -> DriveSetting:
    if voltage_v < 0:
        raise ResonatorError(f"voltage_v >= 0 required, got {voltage_v}")
    return DriveSetting.from_voltage(voltage_v, params.heater_ohms)


def tuning_table(lambda_target_nm: float, charges: Iterable[int], params: ResonatorParams) -> List[TuningPoint]:
    """Order, heater power and voltage that switch the emitter to each charge."""
    points = []
    for charge in charges:
        power = required_power(charge, lambda_target_nm, params)
        drive = drive_for_power(power, params)
        points.append(TuningPoint(
            charge=charge,
            order=_eligible_order(charge, lambda_target_nm, params),
            power_mw=power,
            voltage_v=drive.voltage_v
        ))
    return points


def _lorentzian_dip(x, base, depth, centre, half):
    return base - depth * half ** 2 / ((x - centre) ** 2 + half ** 2)


def fit_comb(grid_nm, transmission_values, min_depth: float = 0.05) -> CombFit:
    """
    Measure FSR and FWHM from a sampled transmission spectrum.

    Dips are located with find_peaks on the inverted spectrum, then each is
    fitted with a Lorentzian over +-1/4 of the mean dip spacing.

    Args:
        grid_nm: Ascending wavelength grid
        transmission_values: Transmission sampled on the grid
        min_depth: Minimum dip prominence

    Returns:
        CombFit with the spacing (slope of centre vs dip index) and median FWHM

    Raises:
        ResonatorError: If fewer than two dips can be fitted
    """
    grid = np.asarray(grid_nm, dtype=float)
    values = np.asarray(transmission_values, dtype=float)
    peaks, _ = find_peaks(1.0 - values, prominence=min_depth)
    if peaks.size < 2:
        raise ResonatorError(f"found {peaks.size} dips, need at least 2 to fit a comb")

    spacing = float(np.mean(np.diff(grid[peaks])))
    centres, widths = [], []
    for index in peaks:
        mask = np.abs(grid - grid[index]) <= spacing / 4
        x, y = grid[mask], values[mask]
        p0 = [float(y.max()), float(y.max() - values[index]), float(grid[index]), spacing / 20]
        try:
            popt, _ = curve_fit(_lorentzian_dip, x, y, p0=p0, maxfev=5000)
        except RuntimeError:
            logger.debug("Dip fit did not converge", extra={"wavelength_nm": float(grid[index])})
            continue
        centres.append(float(popt[2]))
        widths.append(2 * abs(float(popt[3])))

    if len(centres) < 2:
        raise ResonatorError("fewer than two dips could be fitted")

    # dips are ascending in wavelength, one FSR apart
    index = np.arange(len(centres))
    fsr = float(np.polyfit(index, centres, 1)[0])
    if np.any(np.diff(centres) > 1.5 * fsr):
        # a skipped dip breaks the index; fall back to the median gap
        fsr = float(np.median(np.diff(centres)))
    return CombFit(fsr_nm=fsr, fwhm_nm=float(np.median(widths)), dip_wavelengths_nm=centres)
