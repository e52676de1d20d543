"""Optimal spiral pitch, divergence angle and FOU, plus the platform-vibration analysis.

Closed forms live next to the root finders and the golden-section argmin used
to check them. The fit polynomials are fast paths only; root solvers are the
reference.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from acqtime.link_budget import DomainError, coverage_radius
from acqtime.multiscan import expected_acquisition_time
from acqtime.scan_model import ProbabilityChain, ScanParams

# ω at which B_sigma is smallest, in units of sigma
BTM_KNEE = 2.0**1.25
_RTOL = 1e-12
_MAXITER = 200

# ω_btm cubic in x = B / B_sigma_min, valid on [1, 2); result in units of sigma
OMEGA_BTM_FIT = (1.5087, -7.9617, 15.913, -6.8278)

# η_opt quadratics in x = ln(T̂_a): (lower edge of the T̂_a piece, coefficients high->low)
ETA_FIT = (
    (0.01, (0.02824, 0.3137, 0.9873)),
    (0.1, (0.06114, 0.4549, 1.1445)),
    (1.0, (0.07171, 0.4725, 1.1441)),
)


class Branch(enum.Enum):
    AT_LIMIT = "AtLimit"
    AT_BTM = "AtBtm"


class FouMethod(enum.Enum):
    ROOT = "Root"
    FIT = "Fit"


@dataclass(frozen=True)
class OmegaDecision:
    omega_opt: float
    branch: Branch
    omega_btm: float | None
    B_sigma_min: float


@dataclass(frozen=True)
class FouDecision:
    eta_opt: float
    U_opt: float
    T_hat_a: float
    method: FouMethod


@dataclass(frozen=True)
class VibrationDecision:
    sigma_opt: float | None
    omega_sigma_limit: float | None


def optimal_pitch(omega: float, B: float, sigma: float) -> float:
    """Pitch that puts the coverage factor exactly at 1/2."""
    return 2.0 * coverage_radius(omega, B, sigma)


def b_sigma(omega, sigma: float):
    """Link constant at which ``omega`` is a stationary point of the coverage radius."""
    omega = np.asarray(omega, dtype=float)
    s2 = sigma * sigma
    return (omega * np.sqrt(omega * omega + 8.0 * s2) * np.exp(1.0 + 4.0 * s2 / (omega * omega)))[()]


def b_sigma_min(sigma: float) -> float:
    if sigma == 0:
        return 0.0
    return float(b_sigma(BTM_KNEE * sigma, sigma))


def omega_btm(B: float, sigma: float, method: str = "root") -> float:
    """Local maximiser of the coverage radius on (2^(5/4) sigma, inf).

    ``method`` is ``"root"`` (bracketed solve of B_sigma(ω) = B), ``"approx"``
    (large-ω quadratic) or ``"fit"`` (cubic below 2 B_sigma_min, quadratic above).
    """
    b_min = b_sigma_min(sigma)
    if not B > b_min:
        raise DomainError(f"B={B:.6g} must exceed B_sigma_min={b_min:.6g}")
    if method == "root":
        if sigma == 0:
            return math.sqrt(B / math.e)
        lo = BTM_KNEE * sigma
        # B_sigma(ω) > e ω^2, so the root lies below sqrt(B/e)
        hi = max(math.sqrt(B / math.e), 2.0 * lo)
        return brentq(lambda w: b_sigma(w, sigma) - B, lo, hi, xtol=1e-300, rtol=_RTOL, maxiter=_MAXITER)
    if method == "approx":
        return _omega_btm_approx(B, sigma)
    if method == "fit":
        x = B / b_min
        if x < 2.0:
            return float(np.polyval(OMEGA_BTM_FIT, x)) * sigma
        return _omega_btm_approx(B, sigma)
    raise ValueError(f"unknown method {method!r}")


def _omega_btm_approx(B: float, sigma: float) -> float:
    q = B / math.e
    disc = q - 16.0 * sigma * sigma
    if disc < 0:
        raise DomainError("approximate ω_btm needs B >= 16 e sigma^2")
    return 0.5 * (math.sqrt(q) + math.sqrt(disc))


def w_of_a(A: float, sigma: float) -> float:
    """Divergence on the ω_btm branch whose coverage radius equals ``A``."""
    a2, s2 = A * A, sigma * sigma
    disc = a2 * a2 - 12.0 * a2 * s2 + 4.0 * s2 * s2
    if A < (2.0 + math.sqrt(2.0)) * sigma:
        raise DomainError(f"A={A:.6g} is below (2+sqrt 2) sigma")
    # rounding at the boundary can leave disc a hair negative
    return math.sqrt(a2 - 6.0 * s2 + math.sqrt(max(disc, 0.0)))


def optimal_divergence(B: float, sigma: float, omega_limit: float) -> OmegaDecision:
    """Divergence in [omega_limit, omega_max) that maximises the coverage radius."""
    b_min = b_sigma_min(sigma)
    coverage_radius(omega_limit, B, sigma)  # raises beyond the divergence bound
    if B <= b_min:
        return OmegaDecision(omega_limit, Branch.AT_LIMIT, None, b_min)
    if omega_limit < BTM_KNEE * sigma:
        a_limit = max(coverage_radius(omega_limit, B, sigma), (2.0 + math.sqrt(2.0)) * sigma)
        limit_wins = B < b_sigma(w_of_a(a_limit, sigma), sigma)
    else:
        limit_wins = B < b_sigma(omega_limit, sigma)
    w_btm = omega_btm(B, sigma)
    if limit_wins:
        return OmegaDecision(omega_limit, Branch.AT_LIMIT, w_btm, b_min)
    return OmegaDecision(w_btm, Branch.AT_BTM, w_btm, b_min)


def normalized_reset_time(scan: ScanParams, chain: ProbabilityChain) -> float:
    if not 0 < chain.P_R < 1:
        raise DomainError(f"FOU optimisation needs 0 < P_R < 1, got {chain.P_R}")
    return scan.reset_T_a / (scan.mean_exhaustive_time * (1.0 - chain.P_R))


def eta_root(t_hat: float) -> float:
    """Solve e^η - η - 1 = t_hat for η > 0."""
    if not 0 < t_hat < math.inf:
        raise DomainError(f"T_hat_a must be positive and finite, got {t_hat}")
    # e^η - η - 1 >= η^2 / 2 bounds the root by sqrt(2 t_hat)
    hi = math.sqrt(2.0 * t_hat)
    return brentq(lambda e: math.expm1(e) - e - t_hat, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=_MAXITER)


def eta_fit(t_hat: float) -> float:
    if not 0.01 <= t_hat <= 10.0:
        raise DomainError(f"fit is defined for T_hat_a in [0.01, 10], got {t_hat}")
    x = math.log(t_hat)
    # [0.01, 0.1), [0.1, 1], (1, 10]
    if t_hat < 0.1:
        coeffs = ETA_FIT[0][1]
    elif t_hat <= 1.0:
        coeffs = ETA_FIT[1][1]
    else:
        coeffs = ETA_FIT[2][1]
    return float(np.polyval(coeffs, x))


def optimal_fou(scan: ScanParams, chain: ProbabilityChain, method: str = "root") -> FouDecision:
    t_hat = normalized_reset_time(scan, chain)
    if method == "root":
        eta, tag = eta_root(t_hat), FouMethod.ROOT
    elif method == "fit":
        eta, tag = eta_fit(t_hat), FouMethod.FIT
    else:
        raise ValueError(f"unknown method {method!r}")
    return FouDecision(eta, scan.pointing_std * math.sqrt(2.0 * eta), t_hat, tag)


def min_time_at_fou(scan: ScanParams, chain: ProbabilityChain, fou: FouDecision) -> float:
    p_r = chain.P_R
    t_u = math.pi * fou.U_opt**2 / (scan.speed_v * scan.pitch_d)
    return scan.mean_exhaustive_time / p_r + (1.0 / p_r - 1.0) * (t_u + scan.reset_T_a)


def omega_sigma_limit(B: float, sigma: float) -> float:
    """Divergence below which a jitter of ``sigma`` still lowers the acquisition time."""
    s2 = sigma * sigma
    q = B * B / math.e
    return math.sqrt(q / (math.sqrt(q + 16.0 * s2 * s2) + 4.0 * s2))


def vibration_analysis(B: float, omega_limit: float, sigma: float | None = None) -> VibrationDecision:
    """Jitter level minimising T_M at fixed divergence ``omega_limit``.

    ``sigma_opt`` is None when T_M only grows with jitter. ``omega_sigma_limit``
    is filled in when a design ``sigma`` is given.
    """
    if not B > 0:
        raise DomainError(f"B must be positive, got {B}")
    w = omega_limit
    sigma_opt = None
    if w <= math.sqrt(B) * math.exp(-0.25):
        disc = B * B - math.e * w**4
        if disc < 0:
            raise DomainError("B^2 < e ω^4")
        sigma_opt = math.sqrt(disc) / (2.0 * math.sqrt(2.0 * math.e) * w)
    limit = None if sigma is None else omega_sigma_limit(B, sigma)
    return VibrationDecision(sigma_opt, limit)


def golden_section(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-12,
                   maxiter: int = _MAXITER) -> float:
    """Minimiser of a unimodal ``f`` on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if abs(b - a) <= xtol * max(1.0, abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def grid_golden_argmin(f: Callable[[float], float], lo: float, hi: float, n_grid: int = 200,
                       xtol: float = 1e-12) -> float:
    """Grid pre-bracketing then golden section around the best grid point.

    Grid points where ``f`` raises DomainError count as +inf.
    """
    xs = np.linspace(lo, hi, n_grid)
    vals = np.array([_safe(f, x) for x in xs])
    i = int(np.argmin(vals))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, n_grid - 1)]
    return golden_section(lambda x: _safe(f, x), a, b, xtol=xtol)


def _safe(f, x):
    try:
        return f(x)
    except DomainError:
        return math.inf


def time_vs_fou(scan: ScanParams, chain: ProbabilityChain, U: float) -> float:
    """T_M with only the FOU changed; the coverage factor does not depend on U."""
    s = scan.with_(fou_U=U)
    p_u = -math.expm1(-s.eta)
    moved = ProbabilityChain(chain.tau, chain.P_SNR, chain.P_R, p_u, p_u * chain.P_R)
    return expected_acquisition_time(s, moved).expected_time
