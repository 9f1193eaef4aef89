"""Lossy detection chain: loss budget, SLM projection and SPAD click generation."""
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Tuple, Union

import numpy as np
import pandas as pd

from oamsim.core.exceptions import DetectionError, ReportError
from oamsim.core.parameters import SUPPORT_CHARGES, EmitterParams, ExperimentConfig, LossBudget, SpadParams
from oamsim.device.emitter import default_spectrum, emission_efficiency
from oamsim.models.clicks import ORIGIN_CODES, Arm, ClickStream
from oamsim.models.pairs import PairBlock
from oamsim.models.photon import OamPhoton
from oamsim.simulation.streams import Stream, block_rng, thinned_indices
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)

PAIR, DARK = 0, 1


class Route(str, Enum):
    """Optical route from the chip to a detector."""
    SIGNAL_BUS = "signal_bus"
    SIGNAL_EMITTER = "signal_emitter"
    IDLER_BUS = "idler_bus"


def db_to_fraction(db: float) -> float:
    """Power fraction surviving a loss of db decibels."""
    return 10 ** (-db / 10)


def slm_pass_probability(photon: OamPhoton, mask_charge: int) -> float:
    """Probability that the photon is converted to the fundamental mode by the mask."""
    if mask_charge not in SUPPORT_CHARGES:
        raise DetectionError(f"mask charge {mask_charge} outside -7..7")
    return photon.weight(mask_charge)


def arm_survival(
    charge: Optional[int],
    path: Route,
    budget: LossBudget,
    emitter_params: EmitterParams,
    spad: SpadParams,
    photon: Optional[OamPhoton] = None,
    mask_charge: Optional[int] = None
) -> float:
    """
    Probability that one photon on the given path produces a click.

    Bus paths: chip coupling and SWW loss, the fiber arm, detector efficiency.
    Emitter path: chip coupling and SWW loss, emission efficiency, SLM
    projection, residual path fraction, objective coupling, detector
    efficiency. The residual path and objective factors multiply to
    db_to_fraction(path_db[charge]).

    Args:
        charge: OAM charge (emitter path only)
        path: Optical route
        budget: Loss budget
        emitter_params: Emitter parameters
        spad: Detector on this arm
        photon: Emitted photon; defaults to the default spectrum for the charge
        mask_charge: SLM mask; defaults to the charge

    Returns:
        Click probability per photon
    """
    chip = db_to_fraction(budget.coupling_in_db + budget.sww_db)
    if path != Route.SIGNAL_EMITTER:
        return chip * db_to_fraction(budget.idler_arm_db) * spad.det_efficiency

    if charge is None:
        raise DetectionError("emitter path needs a charge")
    if charge not in budget.path_db:
        raise DetectionError(f"no detection path loss configured for l={charge}")
    if photon is None:
        photon = OamPhoton.with_charge(charge, default_spectrum(charge, emitter_params))
    mask = charge if mask_charge is None else mask_charge

    objective = budget.objective_coupling
    # path_db already includes the objective, so it cancels here and only bounds path_db in validation
    residual = db_to_fraction(budget.path_db[charge]) / objective
    return (
        chip
        * emission_efficiency(charge, emitter_params)
        * slm_pass_probability(photon, mask)
        * residual
        * objective
        * spad.det_efficiency
    )


def scenario_survivals(config: ExperimentConfig, charge: Optional[int] = None) -> Tuple[float, float]:
    """
    (signal, idler) click probabilities per photon.

    Without a charge both photons leave through the bus; with one the signal
    goes through the emitter and the SLM set to that charge.
    """
    idler = arm_survival(None, Route.IDLER_BUS, config.loss, config.emitter, config.spad_idler)
    if charge is None:
        signal = arm_survival(None, Route.SIGNAL_BUS, config.loss, config.emitter, config.spad_signal)
    else:
        signal = arm_survival(charge, Route.SIGNAL_EMITTER, config.loss, config.emitter, config.spad_signal)
    return signal, idler


def _arm_clicks(
    rng: np.random.Generator,
    arm: Arm,
    block: PairBlock,
    survival: float,
    period_ps: float,
    spad: SpadParams
) -> ClickStream:
    # one click per surviving photon, each with its own jitter
    detected = rng.binomial(block.n_pairs, survival) if block.n_pairs.size else np.empty(0, dtype=np.int64)
    pulses = np.repeat(block.pulse_index, detected)
    pair_times = np.rint(pulses * period_ps + rng.normal(0.0, spad.jitter_sigma_ps, size=pulses.size))

    dark_pulses = block.start + thinned_indices(rng, block.n_pulses, spad.dark_prob_per_gate)
    dark_times = np.floor((dark_pulses + rng.uniform(0.0, 1.0, size=dark_pulses.size)) * period_ps)

    times = np.maximum(np.concatenate([pair_times, dark_times]), 0).astype(np.int64)
    origin = np.concatenate([
        np.full(pulses.size, PAIR, dtype=np.int8),
        np.full(dark_pulses.size, DARK, dtype=np.int8)
    ])
    order = np.argsort(times, kind="stable")
    return ClickStream(arm=arm, time_ps=times[order], origin=origin[order])


def block_clicks(
    block: PairBlock,
    survival_s: float,
    survival_i: float,
    period_ps: float,
    spad_s: SpadParams,
    spad_i: SpadParams,
    seed: int
) -> Tuple[ClickStream, ClickStream]:
    """Signal and idler clicks of one pulse block, each arm on its own random stream."""
    if not (0 <= survival_s <= 1 and 0 <= survival_i <= 1):
        raise DetectionError(f"survivals must be in [0, 1], got {survival_s}, {survival_i}")
    signal = _arm_clicks(block_rng(seed, Stream.SIGNAL, block.index), Arm.SIGNAL, block, survival_s, period_ps, spad_s)
    idler = _arm_clicks(block_rng(seed, Stream.IDLER, block.index), Arm.IDLER, block, survival_i, period_ps, spad_i)
    return signal, idler


def generate_clicks(
    pair_blocks: Iterable[PairBlock],
    survival_s: float,
    survival_i: float,
    period_ps: float,
    spad_s: SpadParams,
    spad_i: SpadParams,
    seed: int
) -> Tuple[ClickStream, ClickStream]:
    """
    Time-sorted click streams of both arms.

    Args:
        pair_blocks: Emitting pulses, block by block
        survival_s: Signal click probability per photon
        survival_i: Idler click probability per photon
        period_ps: Pump period
        spad_s: Signal detector
        spad_i: Idler detector
        seed: Run seed

    Returns:
        (signal stream, idler stream)
    """
    signals, idlers = [], []
    for block in pair_blocks:
        signal, idler = block_clicks(block, survival_s, survival_i, period_ps, spad_s, spad_i, seed)
        signals.append(signal)
        idlers.append(idler)
    return ClickStream.concatenate(Arm.SIGNAL, signals), ClickStream.concatenate(Arm.IDLER, idlers)


def export_clicks_csv(signal: ClickStream, idler: ClickStream, path: Union[str, Path], debug: bool = False):
    """Write both arms as a time-tag CSV (arm, time_ps[, origin])."""
    frame = pd.DataFrame({
        "arm": np.concatenate([np.full(len(signal), Arm.SIGNAL.value), np.full(len(idler), Arm.IDLER.value)]),
        "time_ps": np.concatenate([signal.time_ps, idler.time_ps]),
        "origin": np.concatenate([signal.origin, idler.origin])
    })
    frame = frame.sort_values("time_ps", kind="stable")
    frame["origin"] = frame["origin"].map({code: origin.value for code, origin in ORIGIN_CODES.items()})
    if not debug:
        frame = frame.drop(columns="origin")

    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
    except OSError as e:
        raise ReportError(f"cannot write {path}: {e}") from e
    logger.info("Clicks exported", extra={"path": str(path), "rows": len(frame)})
