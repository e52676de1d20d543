"""Transmit power, received SNR and the coverage radius of a jittered Gaussian beam.

All quantities are SI: radians, meters, watts, amperes. Conversions from
µrad / km / mW happen only in :mod:`acqtime.scenario`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import i0, i0e


class DomainError(ValueError):
    """Raised when an input falls outside the region where a formula is defined."""


@dataclass(frozen=True)
class LinkParams:
    distance_R: float
    loss_tx: float
    loss_rx: float
    split_ratio: float
    aperture_D_r: float
    responsivity: float
    noise_std: float
    snr_threshold_db: float
    power_P_t: float

    def __post_init__(self):
        for name in ("distance_R", "aperture_D_r", "responsivity", "noise_std", "power_P_t"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("loss_tx", "loss_rx", "split_ratio"):
            val = getattr(self, name)
            if not 0 < val <= 1:
                raise DomainError(f"{name} must lie in (0, 1], got {val}")

    @property
    def noise_power(self) -> float:
        """N_0, the noise current variance (A^2)."""
        return self.noise_std**2

    @property
    def snr_threshold(self) -> float:
        return 10.0 ** (self.snr_threshold_db / 10.0)

    @property
    def optical_gain(self) -> float:
        """s_t s_r s_s D_r^2 / (2 R^2): the on-axis gain times omega^2."""
        return (
            self.loss_tx * self.loss_rx * self.split_ratio * self.aperture_D_r**2
            / (2.0 * self.distance_R**2)
        )


@dataclass(frozen=True)
class TurbulenceParams:
    gamma: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.gamma > 0 and self.alpha > 0 and self.beta > 0):
            raise DomainError(f"turbulence parameters must be positive: {self}")


@dataclass(frozen=True)
class VibrationParams:
    sigma: float
    vib_freq: float = 100.0

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma}")
        if not self.vib_freq > 0:
            raise DomainError(f"vib_freq must be positive, got {self.vib_freq}")


@dataclass(frozen=True)
class DerivedBudget:
    B: float
    g: float
    omega_max: float


# Reference turbulence levels, very weak (turb1) to very strong (turb5).
TURBULENCE_PRESETS = {
    "turb1": TurbulenceParams(0.90, 21.6, 19.8),
    "turb2": TurbulenceParams(0.58, 8.43, 6.92),
    "turb3": TurbulenceParams(0.36, 4.03, 1.54),
    "turb4": TurbulenceParams(0.27, 4.58, 1.24),
    "turb5": TurbulenceParams(0.21, 6.07, 1.08),
}


def turbulence_second_moment(turb: TurbulenceParams) -> float:
    """E[h_c^2] of a Gamma-Gamma fade with scale gamma."""
    a, b = turb.alpha, turb.beta
    return (a + 1.0) * (b + 1.0) * turb.gamma**2 / (a * b)


def rice_pdf(phi, mean_offset: float, sigma: float):
    """Rice density of the radial pointing error about ``mean_offset``."""
    if not sigma > 0:
        raise DomainError("rice_pdf needs sigma > 0")
    phi = np.asarray(phi, dtype=float)
    s2 = sigma * sigma
    arg = phi * mean_offset / s2
    # i0 overflows near arg ~ 700; fold the scaling into the exponent
    big = arg > 50.0
    out = np.where(
        big,
        phi / s2 * np.exp(-((phi - mean_offset) ** 2) / (2 * s2)) * i0e(np.where(big, arg, 0.0)),
        phi / s2 * np.exp(-(phi * phi + mean_offset**2) / (2 * s2)) * i0(np.where(big, 0.0, arg)),
    )
    return out[()] if out.ndim == 0 else out


def pointing_gain(phi, omega: float, link: LinkParams):
    """Gain h_t(phi) of a Gaussian beam with 1/e^2 half-angle ``omega``."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    phi = np.asarray(phi, dtype=float)
    out = link.optical_gain / omega**2 * np.exp(-2.0 * phi * phi / omega**2)
    return out[()] if out.ndim == 0 else out


def pointing_gain_second_moment(omega: float, mean_offset: float, sigma: float, link: LinkParams) -> float:
    """E[h_t^2] when the pointing error is Rice(mean_offset, sigma)."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    if sigma < 0:
        raise DomainError(f"sigma must be non-negative, got {sigma}")
    w2 = omega * omega
    spread = w2 + 8.0 * sigma * sigma
    return link.optical_gain**2 * math.exp(-4.0 * mean_offset**2 / spread) / (w2 * spread)


def _noise_factor(link: LinkParams, turb: TurbulenceParams) -> float:
    a, b = turb.alpha, turb.beta
    return math.sqrt((a + 1.0) * (b + 1.0) / (link.snr_threshold * link.noise_power * a * b))


def link_constant_B(link: LinkParams, turb: TurbulenceParams) -> float:
    """Link constant B (rad^2) coupling power budget to scan geometry."""
    if not link.noise_power > 0:
        raise DomainError("noise power must be positive")
    return link.power_P_t * turb.gamma * link.optical_gain * link.responsivity * _noise_factor(link, turb)


def required_power(omega: float, pitch_d: float, tau: float, link: LinkParams,
                   turb: TurbulenceParams, sigma: float) -> float:
    """Transmit power giving average SNR exactly at threshold at offset tau*d.

    ``link.power_P_t`` is ignored.
    """
    if not 0 <= tau <= 0.5:
        raise DomainError(f"tau must lie in [0, 1/2], got {tau}")
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    spread = omega * omega + 8.0 * sigma * sigma
    unit = turb.gamma * link.optical_gain * link.responsivity * _noise_factor(link, turb)
    exponent = 2.0 * (tau * pitch_d) ** 2 / spread
    if exponent > 700.0:
        raise DomainError(f"required power overflows: exp({exponent:.4g}) for tau*d={tau * pitch_d:.6g} rad")
    return omega * math.sqrt(spread) * math.exp(exponent) / unit


def max_divergence(B: float, sigma: float) -> float:
    """Largest divergence angle for which any coverage radius exists."""
    if not B > 0:
        raise DomainError(f"B must be positive, got {B}")
    s2 = sigma * sigma
    # B^2/(sqrt(B^2+16s^4)+4s^2) avoids cancellation when s^2 >> B
    return math.sqrt(B * B / (math.sqrt(B * B + 16.0 * s2 * s2) + 4.0 * s2))


def coverage_radius(omega: float, B: float, sigma: float) -> float:
    """g_{B,sigma}(omega): deflection at which the average SNR hits threshold."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    spread = omega * omega + 8.0 * sigma * sigma
    log_arg = B / (omega * math.sqrt(spread))
    if log_arg < 1.0:
        raise DomainError(
            f"omega={omega:.6g} rad exceeds the divergence bound {max_divergence(B, sigma):.6g} rad"
        )
    return math.sqrt(0.5 * spread * math.log(log_arg))


def derive_budget(omega: float, link: LinkParams, turb: TurbulenceParams, sigma: float) -> DerivedBudget:
    B = link_constant_B(link, turb)
    return DerivedBudget(B=B, g=coverage_radius(omega, B, sigma), omega_max=max_divergence(B, sigma))
