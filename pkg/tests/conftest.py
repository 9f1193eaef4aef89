"""Shared fixtures for the oamsim test suite."""
import pytest

from oamsim.analysis.coincidence import coincidence_report
from oamsim.analysis.histogram import build_histogram
from oamsim.core.orchestrator import ScenarioOrchestrator
from oamsim.core.parameters import ExperimentConfig, SpadParams
from oamsim.models.resonance import DriveSetting
from oamsim.simulation.runner import ArmSetup, MonteCarloRunner

# Statistical assertions use fixed seeds and 4 sigma bounds
SIGMAS = 4.0

SMALL_BLOCK = 2 ** 20


@pytest.fixture
def config() -> ExperimentConfig:
    return ExperimentConfig()


@pytest.fixture
def resonator(config):
    return config.resonator


@pytest.fixture
def off() -> DriveSetting:
    return DriveSetting.off()


@pytest.fixture
def orchestrator(config) -> ScenarioOrchestrator:
    return ScenarioOrchestrator(config, workers=1, block_pulses=SMALL_BLOCK)


def simulate_coincidences(
    mu: float,
    survival_s: float,
    survival_i: float,
    dark_s: float,
    dark_i: float,
    n_pulses: int,
    seed: int = 0,
    jitter_ps: float = 60.0,
    workers: int = 1
):
    """Monte Carlo CC/ACC report for raw survivals, on the default timing."""
    runner = MonteCarloRunner(workers=workers, block_pulses=SMALL_BLOCK)
    result = runner.run(
        n_pulses,
        mu,
        "poisson",
        25_000.0,
        ArmSetup(survival_s, SpadParams(dark_prob_per_gate=dark_s, jitter_sigma_ps=jitter_ps)),
        ArmSetup(survival_i, SpadParams(dark_prob_per_gate=dark_i, jitter_sigma_ps=jitter_ps)),
        seed
    )
    hist = build_histogram(result.signal, result.idler, 64, 187_500.0)
    return result, hist, coincidence_report(hist, 320, 25.0, 14)
