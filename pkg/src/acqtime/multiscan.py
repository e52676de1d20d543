"""Multi-scan acquisition time: repeated independent scans of the FOU with a reset between them."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from acqtime.link_budget import DomainError
from acqtime.scan_model import ProbabilityChain, ScanParams, fou_scan_time, single_scan_expected_time


class DegenerateError(DomainError):
    """The per-scan success probability is zero, so the expected time diverges."""


@dataclass(frozen=True)
class MultiScanResult:
    expected_time: float
    per_scan_success: float
    fou_time: float
    eta: float


def multiscan_time(n: int, t_s: float, scan: ScanParams) -> float:
    """Total time when acquisition happens ``t_s`` into scan number ``n + 1``."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    return n * (fou_scan_time(scan) + scan.reset_T_a) + t_s


def multiscan_cdf(t, scan: ScanParams, chain: ProbabilityChain):
    """P(t_M <= t). Flat while the terminal is resetting between scans."""
    t = np.asarray(t, dtype=float)
    t_u = fou_scan_time(scan)
    period = t_u + scan.reset_T_a
    n = np.floor(t / period)
    t_s = np.minimum(t - n * period, t_u)
    rate = 1.0 / scan.mean_exhaustive_time
    # (1 - P_S)^n underflows gracefully to 0 for huge n
    survive = np.power(1.0 - chain.P_S, n)
    out = 1.0 - survive * (1.0 - chain.P_R * -np.expm1(-rate * t_s))
    return np.where(t < 0, 0.0, out)[()]


def expected_acquisition_time(scan: ScanParams, chain: ProbabilityChain) -> MultiScanResult:
    if not chain.P_S > 0:
        raise DegenerateError("P_S = 0: every scan fails and the mean acquisition time is infinite")
    eta = scan.eta
    p_r = chain.P_R
    # e^η/(e^η - 1) = 1/(1 - q) and 1/(e^η - 1) = q/(1 - q) with q = e^-η, safe for large η
    q = math.exp(-eta)
    inv = 1.0 / -math.expm1(-eta)
    t_m = (scan.mean_exhaustive_time * (eta * (1.0 - p_r) * inv / p_r + 1.0)
           + scan.reset_T_a * ((1.0 - p_r) + p_r * q) * inv / p_r)
    return MultiScanResult(t_m, chain.P_S, fou_scan_time(scan), eta)


def expected_acquisition_time_renewal(scan: ScanParams, chain: ProbabilityChain) -> float:
    """Same expectation written as failed-scan cost plus conditional success time."""
    if not chain.P_S > 0:
        raise DegenerateError("P_S = 0: every scan fails and the mean acquisition time is infinite")
    return (single_scan_expected_time(scan) / chain.P_U
            + (1.0 / chain.P_S - 1.0) * (fou_scan_time(scan) + scan.reset_T_a))
