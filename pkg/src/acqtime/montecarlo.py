"""Monte Carlo acquisition simulator, independent of the closed-form model.

Trials are grouped into fixed-size blocks and every block draws from its own
substream ``SeedSequence(seed, spawn_key=(block,))``, so results do not depend
on how many workers run the blocks.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from acqtime.link_budget import (
    DomainError,
    LinkParams,
    TurbulenceParams,
    VibrationParams,
    coverage_radius,
    pointing_gain,
    pointing_gain_second_moment,
    turbulence_second_moment,
)
from acqtime.scan_model import ScanParams, fou_scan_time

BLOCK_SIZE = 8192
TWO_PI = 2.0 * math.pi


class CapExceededError(RuntimeError):
    """A trial ran ``max_scans`` scans without acquiring."""


class Mode(enum.Enum):
    GEOMETRIC = "geometric"
    PHYSICAL = "physical"


@dataclass(frozen=True)
class McConfig:
    trials: int = 100_000
    seed: int = 0
    mode: Mode = Mode.GEOMETRIC
    max_scans: int = 10_000
    metric: str = "radial"  # or "curve": Euclidean distance to the spiral, diagnostic only
    dwell_samples: int | None = None  # physical mode; default F_V * 2ω / v
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_scans < 1:
            raise ValueError("max_scans must be >= 1")
        if self.metric not in ("radial", "curve"):
            raise ValueError(f"unknown metric {self.metric!r}")


@dataclass(frozen=True)
class McReport:
    success_rate: float
    mean_time: float
    ci95_halfwidth: float
    per_scan_success_rate: float
    per_scan_se: float
    trials: int
    scans: int
    seed: int
    mode: Mode


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def sample_receivers(n: int, kappa: float, rng: np.random.Generator, stratified: bool = False):
    """Polar receiver positions (rho_r, theta_r) for an isotropic Gaussian pointing error.

    ``stratified`` places one uniform in each of n equal strata for both
    coordinates (randomly paired), which keeps the marginals exact while
    cutting histogram noise.
    """
    if stratified:
        u = (np.arange(n) + rng.random(n)) / n
        v = rng.permutation((np.arange(n) + rng.random(n)) / n)
    else:
        u = rng.random(n)
        v = rng.random(n)
    rho = kappa * np.sqrt(-2.0 * np.log1p(-u))
    return rho, TWO_PI * v


def nearest_arm_distance(rho, theta, pitch_d: float, metric: str = "radial"):
    """Distance from (rho, theta) to the spiral rho = d theta / 2 pi.

    ``radial`` measures along the ray at theta to the nearest arm or to the
    origin; ``curve`` is the true Euclidean distance.
    """
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    first_arm = pitch_d * theta / TWO_PI
    if metric == "radial":
        s = (rho - first_arm) / pitch_d
        frac = s - np.floor(s)
        ring = pitch_d * np.minimum(frac, 1.0 - frac)
        central = np.minimum(rho, first_arm - rho)
        return np.where(s < 0, central, ring)
    if metric == "curve":
        return _curve_distance(rho, theta, pitch_d)
    raise ValueError(f"unknown metric {metric!r}")


def _curve_distance(rho, theta, pitch_d, iters: int = 30):
    a = pitch_d / TWO_PI
    x, y = rho * np.cos(theta), rho * np.sin(theta)
    k0 = np.floor((rho / a - theta) / TWO_PI)
    best = rho.copy()  # the origin is on the curve
    for dk in (-1.0, 0.0, 1.0, 2.0):
        t = np.maximum(theta + TWO_PI * (k0 + dk), 0.0)
        for _ in range(iters):
            # Newton on the squared distance D(t) = |a t e(t) - p|^2 / 2
            c, s = np.cos(t), np.sin(t)
            px, py = a * t * c - x, a * t * s - y
            dx, dy = a * (c - t * s), a * (s + t * c)
            ddx, ddy = a * (-2 * s - t * c), a * (2 * c - t * s)
            g1 = px * dx + py * dy
            g2 = dx * dx + dy * dy + px * ddx + py * ddy
            step = np.where(g2 > 0, g1 / np.where(g2 > 0, g2, 1.0), 0.0)
            t = np.maximum(t - np.clip(step, -math.pi / 2, math.pi / 2), 0.0)
        dist = np.hypot(a * t * np.cos(t) - x, a * t * np.sin(t) - y)
        best = np.minimum(best, dist)
    return best


def sample_gamma_gamma(n: int, turb: TurbulenceParams, rng: np.random.Generator):
    """Fade h_c = gamma * X * Y with unit-mean Gamma factors of shapes alpha and beta."""
    x = rng.gamma(turb.alpha, 1.0 / turb.alpha, n)
    y = rng.gamma(turb.beta, 1.0 / turb.beta, n)
    return turb.gamma * x * y


def sample_pointing_error(n: int, mean_offset: float, sigma: float, rng: np.random.Generator):
    """Radial error of a 2-D Gaussian jitter (std sigma per axis) about an offset."""
    ex = mean_offset + sigma * rng.standard_normal(n)
    ey = sigma * rng.standard_normal(n)
    return np.hypot(ex, ey)


@dataclass(frozen=True)
class _Physics:
    link: LinkParams
    turb: TurbulenceParams
    sigma: float
    samples: int


def _block(scan: ScanParams, g: float, cfg: McConfig, physics: _Physics | None, block: int, n: int):
    rng = block_rng(cfg.seed, block)
    d, kappa = scan.pitch_d, scan.pointing_std
    fail_cost = fou_scan_time(scan) + scan.reset_T_a
    elapsed = np.zeros(n)
    scans = np.zeros(n, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    active = np.arange(n)
    for _ in range(cfg.max_scans):
        if active.size == 0:
            break
        m = active.size
        rho, theta = sample_receivers(m, kappa, rng)
        dist = nearest_arm_distance(rho, theta, d, cfg.metric)
        in_fou = rho <= scan.fou_U
        if physics is None:
            covered = dist <= g
        else:
            covered = _snr_covered(dist, scan.omega, physics, rng)
        hit = in_fou & covered & (rng.random(m) < scan.field_prob)
        scans[active] += 1
        elapsed[active] += np.where(hit, math.pi * rho * rho / (scan.speed_v * d), fail_cost)
        done[active[hit]] = True
        active = active[~hit]
    times = elapsed[done]
    return int(done.sum()), int(scans.sum()), float(times.sum()), float((times * times).sum()), int(active.size)


def _snr_covered(offset, omega, physics: _Physics, rng):
    """Average instantaneous SNR over the dwell against the threshold."""
    m, k = offset.size, physics.samples
    link = physics.link
    phi = sample_pointing_error(m * k, np.repeat(offset, k), physics.sigma, rng)
    h_t = pointing_gain(phi, omega, link)
    h_c = sample_gamma_gamma(m * k, physics.turb, rng)
    snr = (link.power_P_t * h_t * h_c * link.responsivity) ** 2 / link.noise_power
    return snr.reshape(m, k).mean(axis=1) >= link.snr_threshold


def run_mc(scenario, mc: McConfig) -> McReport:
    """Simulate ``mc.trials`` multi-scan acquisitions of a :class:`~acqtime.scenario.Scenario`.

    Geometric mode: each scan draws a fresh receiver position; it succeeds when
    the receiver is inside the FOU, within the coverage radius of an arm and
    the field-of-view Bernoulli fires. Physical mode replaces the coverage
    test with dwell-averaged SNR from sampled jitter and Gamma-Gamma fades.
    """
    scan = scenario.scan()
    sigma = scenario.sigma
    g = coverage_radius(scan.omega, scenario.B, sigma)
    physics = None
    if mc.mode is Mode.PHYSICAL:
        samples = mc.dwell_samples
        if samples is None:
            samples = max(1, round(scenario.vib_freq_hz * 2.0 * scan.omega / scan.speed_v))
        physics = _Physics(scenario.link(), scenario.turbulence(), sigma, samples)
    sizes = [min(BLOCK_SIZE, mc.trials - start) for start in range(0, mc.trials, BLOCK_SIZE)]

    def work(item):
        block, n = item
        return _block(scan, g, mc, physics, block, n)

    if mc.workers > 1:
        with ThreadPoolExecutor(mc.workers) as pool:
            parts = list(pool.map(work, enumerate(sizes)))
    else:
        parts = [work(item) for item in enumerate(sizes)]

    successes = sum(p[0] for p in parts)
    scans = sum(p[1] for p in parts)
    capped = sum(p[4] for p in parts)
    if capped:
        raise CapExceededError(f"{capped} trial(s) hit max_scans={mc.max_scans}; P_S is effectively 0")
    total = math.fsum(p[2] for p in parts)
    total_sq = math.fsum(p[3] for p in parts)
    mean = total / successes
    var = max(total_sq / successes - mean * mean, 0.0) * successes / max(successes - 1, 1)
    p_hat = successes / scans
    return McReport(
        success_rate=successes / mc.trials,
        mean_time=mean,
        ci95_halfwidth=1.96 * math.sqrt(var / successes),
        per_scan_success_rate=p_hat,
        per_scan_se=math.sqrt(p_hat * (1.0 - p_hat) / scans),
        trials=mc.trials,
        scans=scans,
        seed=mc.seed,
        mode=mc.mode,
    )


@dataclass(frozen=True)
class MomentReport:
    ht2_sample: float
    ht2_model: float
    hc2_sample: float
    hc2_model: float
    samples: int

    @property
    def ht2_rel_error(self) -> float:
        return abs(self.ht2_sample / self.ht2_model - 1.0)

    @property
    def hc2_rel_error(self) -> float:
        return abs(self.hc2_sample / self.hc2_model - 1.0)


def validate_moments(link: LinkParams, turb: TurbulenceParams, vib: VibrationParams, omega: float,
                     mean_offset: float, samples: int = 10_000_000, seed: int = 0,
                     chunk: int = 1_000_000) -> MomentReport:
    """Sampled E[h_t^2] and E[h_c^2] next to their closed forms."""
    if samples < 1:
        raise DomainError("samples must be positive")
    ht_sum, hc_sum = [], []
    for block, start in enumerate(range(0, samples, chunk)):
        n = min(chunk, samples - start)
        rng = block_rng(seed, block)
        phi = sample_pointing_error(n, mean_offset, vib.sigma, rng)
        ht_sum.append(float(np.sum(pointing_gain(phi, omega, link) ** 2)))
        hc_sum.append(float(np.sum(sample_gamma_gamma(n, turb, rng) ** 2)))
    return MomentReport(
        ht2_sample=math.fsum(ht_sum) / samples,
        ht2_model=pointing_gain_second_moment(omega, mean_offset, vib.sigma, link),
        hc2_sample=math.fsum(hc_sum) / samples,
        hc2_model=turbulence_second_moment(turb),
        samples=samples,
    )
