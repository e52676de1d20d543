"""Closed-form multi-scan acquisition time for beaconless LEO-to-ground laser links."""
from acqtime.link_budget import (
    TURBULENCE_PRESETS,
    DomainError,
    LinkParams,
    TurbulenceParams,
    VibrationParams,
    coverage_radius,
    link_constant_B,
    max_divergence,
)
from acqtime.montecarlo import McConfig, McReport, Mode, run_mc, validate_moments
from acqtime.multiscan import expected_acquisition_time, multiscan_cdf
from acqtime.optimizer import optimal_divergence, optimal_fou, optimal_pitch, vibration_analysis
from acqtime.scan_model import ScanParams, probability_chain
from acqtime.scenario import DEFAULT_SCENARIO, Scenario, evaluate, load_scenario, parse_scenario

__all__ = [
    "TURBULENCE_PRESETS", "DomainError", "LinkParams", "TurbulenceParams", "VibrationParams",
    "coverage_radius", "link_constant_B", "max_divergence",
    "McConfig", "McReport", "Mode", "run_mc", "validate_moments",
    "expected_acquisition_time", "multiscan_cdf",
    "optimal_divergence", "optimal_fou", "optimal_pitch", "vibration_analysis",
    "ScanParams", "probability_chain",
    "DEFAULT_SCENARIO", "Scenario", "evaluate", "load_scenario", "parse_scenario",
]
