"""Custom exceptions for the oamsim toolkit."""


class OamSimError(Exception):
    """Base exception for oamsim."""
    category = "internal"
    exit_code = 1


class ConfigError(OamSimError):
    """Configuration-related exceptions."""
    category = "config"
    exit_code = 2


class ConfigParseError(ConfigError):
    """Config file is not valid TOML."""
    pass


class ConfigValidationError(ConfigError):
    """Config parsed but violates a parameter invariant."""
    pass


class ResonatorError(OamSimError):
    """Resonator model exceptions."""
    category = "resonator"
    exit_code = 3


class AmbiguousResonanceError(ResonatorError):
    """More than one resonance lies within the alignment tolerance."""
    pass


class UnreachableChargeError(ResonatorError):
    """No order carrying the charge can be red-shifted onto the target."""
    pass


class SourceError(OamSimError):
    """Pair source exceptions."""
    category = "source"
    exit_code = 4


class EnergyConservationError(SourceError):
    """Signal wavelength admits no positive idler wavelength."""
    pass


class EmitterError(OamSimError):
    """OAM emitter exceptions."""
    category = "emitter"
    exit_code = 5


class UnknownChargeError(EmitterError):
    """Charge outside the efficiency table or purity basis."""
    pass


class ZeroBasisMassError(EmitterError):
    """Spectrum carries no weight on the purity basis."""
    pass


class DetectionError(OamSimError):
    """Detection chain exceptions."""
    category = "detection"
    exit_code = 6


class AnalysisError(OamSimError):
    """Coincidence analysis exceptions."""
    category = "analysis"
    exit_code = 7


class UnsortedStreamError(AnalysisError):
    """Click stream is not time-ordered."""
    pass


class DegenerateHistogramError(AnalysisError):
    """Histogram has no counts to locate a main peak."""
    pass


class SpanTooSmallError(AnalysisError):
    """Histogram does not cover all side-peak windows."""
    pass


class CalibrationError(OamSimError):
    """Calibration exceptions."""
    category = "calibration"
    exit_code = 8


class InfeasibleCalibrationError(CalibrationError):
    """No nonnegative parameter set reproduces the targets."""
    pass


class ScenarioError(OamSimError):
    """Scenario definition exceptions."""
    category = "scenario"
    exit_code = 9


class ReportError(OamSimError):
    """Report writing exceptions."""
    category = "io"
    exit_code = 10
