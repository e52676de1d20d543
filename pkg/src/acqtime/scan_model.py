"""Archimedean spiral scan: geometry, coverage-factor statistics and single-scan timing."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from acqtime.link_budget import DomainError


@dataclass(frozen=True)
class ScanParams:
    """Scan configuration. Angles in rad, speed in rad/s, reset time in s."""

    omega: float
    pitch_d: float
    fou_U: float
    speed_v: float
    reset_T_a: float
    field_prob: float
    pointing_std: float

    def __post_init__(self):
        for name in ("pitch_d", "fou_U", "speed_v", "pointing_std", "omega"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if self.reset_T_a < 0:
            raise DomainError(f"reset_T_a must be non-negative, got {self.reset_T_a}")
        if not 0 <= self.field_prob <= 1:
            raise DomainError(f"field_prob must lie in [0, 1], got {self.field_prob}")

    def with_(self, **changes) -> "ScanParams":
        return replace(self, **changes)

    @property
    def eta(self) -> float:
        """U^2 / (2 kappa^2)."""
        return self.fou_U**2 / (2.0 * self.pointing_std**2)

    @property
    def mean_exhaustive_time(self) -> float:
        """2 pi kappa^2 / (v d), the mean of t_S over an unbounded FOU."""
        return 2.0 * math.pi * self.pointing_std**2 / (self.speed_v * self.pitch_d)


class ProbabilityChain(NamedTuple):
    tau: float
    P_SNR: float
    P_R: float
    P_U: float
    P_S: float


def spiral_radius(theta, pitch_d: float):
    return pitch_d / (2.0 * math.pi) * np.asarray(theta, dtype=float)[()]


def rayleigh_within(radius, kappa: float):
    """P(rho <= radius) for rho ~ Rayleigh(kappa)."""
    radius = np.asarray(radius, dtype=float)
    return (-np.expm1(-radius * radius / (2.0 * kappa * kappa)))[()]


def field_prob_from_half_angle(V: float, kappa: float) -> float:
    """Field detection probability for a receiver half field angle ``V``."""
    return float(rayleigh_within(V, kappa))


def coverage_factor_pdf(tau, pitch_d: float, kappa: float):
    tau = np.asarray(tau, dtype=float)
    r = (pitch_d / kappa) ** 2
    return (((1.0 - 2.0 * tau) * tau * r + 2.0) * np.exp(-tau * tau * r / 2.0))[()]


def coverage_factor_pdf_series(tau: float, pitch_d: float, kappa: float, k_max: int | None = None,
                               nodes: int = 64) -> float:
    """Coverage-factor density built ring by ring, integrating over the polar angle.

    Every ring contributes the Rayleigh density at the receiver radii lying
    ``tau * d`` inside its inner and outer arm. The central ring counts only
    polar angles in [4 pi tau, 2 pi], where the origin is not the farther
    boundary. Integrals over the angle use Gauss-Legendre quadrature; nothing
    from the telescoped closed form is reused.
    """
    if k_max is None:
        k_max = max(1, math.ceil(10.0 * kappa / pitch_d))
    x, w = np.polynomial.legendre.leggauss(nodes)

    def rayleigh(rho):
        return rho / kappa**2 * np.exp(-rho * rho / (2.0 * kappa**2))

    def angle_mean(fn, lo, hi):
        # (1 / 2 pi) * integral over [lo, hi]
        theta = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        return 0.5 * (hi - lo) * np.dot(w, fn(theta)) / (2.0 * math.pi)

    # |d rho / d tau| = d for every branch
    total = angle_mean(lambda th: pitch_d * (rayleigh(np.full_like(th, tau * pitch_d))
                                             + rayleigh((th / (2 * math.pi) - tau) * pitch_d)),
                       4.0 * math.pi * tau, 2.0 * math.pi)
    for k in range(1, k_max + 1):
        total += angle_mean(lambda th: pitch_d * (rayleigh((th / (2 * math.pi) + k - 1 + tau) * pitch_d)
                                                  + rayleigh((th / (2 * math.pi) + k - tau) * pitch_d)),
                            0.0, 2.0 * math.pi)
    return float(total)


def snr_exceed_prob(tau, pitch_d: float, kappa: float, mode: str = "approx"):
    """Probability that the receiver sits within ``tau * d`` of an arm."""
    tau = np.asarray(tau, dtype=float)
    if mode == "approx":
        return (2.0 * tau)[()]
    if mode == "exact":
        r = (pitch_d / kappa) ** 2
        return (1.0 + (2.0 * tau - 1.0) * np.exp(-tau * tau * r / 2.0))[()]
    raise ValueError(f"unknown mode {mode!r}")


def coverage_factor(g: float, pitch_d: float) -> float:
    return min(g / pitch_d, 0.5)


def probability_chain(scan: ScanParams, g: float, mode: str = "approx") -> ProbabilityChain:
    if g < 0:
        raise DomainError(f"coverage radius must be non-negative, got {g}")
    tau = coverage_factor(g, scan.pitch_d)
    p_snr = float(snr_exceed_prob(tau, scan.pitch_d, scan.pointing_std, mode))
    p_r = scan.field_prob * p_snr
    p_u = float(rayleigh_within(scan.fou_U, scan.pointing_std))
    return ProbabilityChain(tau, p_snr, p_r, p_u, p_u * p_r)


def spiral_length(rho_r, pitch_d: float, mode: str = "approx"):
    """Arc length of the spiral from the origin out to radius ``rho_r``."""
    rho_r = np.asarray(rho_r, dtype=float)
    a = pitch_d / (2.0 * math.pi)
    if mode == "approx":
        return (rho_r * rho_r / (2.0 * a))[()]
    if mode == "exact":
        x = rho_r / a
        root = np.sqrt(1.0 + x * x)
        return (0.5 * (rho_r * root + a * np.arcsinh(x)))[()]
    raise ValueError(f"unknown mode {mode!r}")


def single_scan_time(rho_r, scan: ScanParams):
    rho_r = np.asarray(rho_r, dtype=float)
    return (math.pi * rho_r * rho_r / (scan.speed_v * scan.pitch_d))[()]


def fou_scan_time(scan: ScanParams) -> float:
    return float(single_scan_time(scan.fou_U, scan))


def single_scan_time_pdf(t, scan: ScanParams):
    """Density of t_S when the receiver is not confined to the FOU (exponential)."""
    rate = 1.0 / scan.mean_exhaustive_time
    t = np.asarray(t, dtype=float)
    return np.where(t >= 0, rate * np.exp(-rate * t), 0.0)[()]


def single_scan_expected_time(scan: ScanParams) -> float:
    """E[t_S; rho_r <= U], the partial mean over the FOU."""
    eta = scan.eta
    return scan.mean_exhaustive_time * (-math.expm1(-eta) - eta * math.exp(-eta))
