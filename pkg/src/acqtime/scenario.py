"""Scenario files: flat ``key = value`` lines with the unit spelled in the key.

Values are kept in file units so a dumped scenario re-parses identically;
``Scenario.link()`` and friends convert to SI.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

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
from acqtime.multiscan import expected_acquisition_time
from acqtime.scan_model import (
    ProbabilityChain,
    ScanParams,
    fou_scan_time,
    probability_chain,
    single_scan_expected_time,
)

URAD = 1e-6
MRAD = 1e-3


class ScenarioError(ValueError):
    """Malformed scenario file or inconsistent keys."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Scenario:
    distance_km: float
    loss_tx: float
    loss_rx: float
    split_ratio: float
    aperture_cm: float
    responsivity_a_w: float
    noise_na: float
    snr_db: float
    power_pt_mw: float
    sigma_urad: float
    vib_freq_hz: float
    omega_urad: float
    pitch_d_urad: float
    fou_u_mrad: float
    kappa_mrad: float
    speed_v_mrad_s: float
    reset_s: float
    p_v: float
    turb: str | None = None
    gamma: float | None = None
    alpha: float | None = None
    beta: float | None = None
    omega_limit_urad: float | None = field(default=None)

    def __post_init__(self):
        explicit = (self.gamma, self.alpha, self.beta)
        if self.turb is not None:
            if self.turb not in TURBULENCE_PRESETS:
                raise ScenarioError(f"unknown turbulence preset {self.turb!r}", key="turb")
            if any(v is not None for v in explicit):
                raise ScenarioError("give either turb or gamma/alpha/beta, not both", key="turb")
        elif any(v is None for v in explicit):
            missing = [n for n, v in zip(("gamma", "alpha", "beta"), explicit) if v is None]
            raise ScenarioError(f"missing turbulence keys: {', '.join(missing)} (or set turb)",
                                key=missing[0])

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def link(self) -> LinkParams:
        return LinkParams(
            distance_R=self.distance_km * 1e3,
            loss_tx=self.loss_tx,
            loss_rx=self.loss_rx,
            split_ratio=self.split_ratio,
            aperture_D_r=self.aperture_cm * 1e-2,
            responsivity=self.responsivity_a_w,
            noise_std=self.noise_na * 1e-9,
            snr_threshold_db=self.snr_db,
            power_P_t=self.power_pt_mw * 1e-3,
        )

    def turbulence(self) -> TurbulenceParams:
        if self.turb is not None:
            return TURBULENCE_PRESETS[self.turb]
        return TurbulenceParams(self.gamma, self.alpha, self.beta)

    def vibration(self) -> VibrationParams:
        return VibrationParams(self.sigma_urad * URAD, self.vib_freq_hz)

    def scan(self) -> ScanParams:
        return ScanParams(
            omega=self.omega_urad * URAD,
            pitch_d=self.pitch_d_urad * URAD,
            fou_U=self.fou_u_mrad * MRAD,
            speed_v=self.speed_v_mrad_s * MRAD,
            reset_T_a=self.reset_s,
            field_prob=self.p_v,
            pointing_std=self.kappa_mrad * MRAD,
        )

    @property
    def omega_limit(self) -> float:
        """Smallest divergence the laser can produce (rad); defaults to omega."""
        lim = self.omega_limit_urad if self.omega_limit_urad is not None else self.omega_urad
        return lim * URAD

    @property
    def B(self) -> float:
        return link_constant_B(self.link(), self.turbulence())

    @property
    def sigma(self) -> float:
        return self.sigma_urad * URAD


_FIELDS = {f.name: f for f in dataclasses.fields(Scenario)}
_OPTIONAL = {"turb", "gamma", "alpha", "beta", "omega_limit_urad"}
REQUIRED_KEYS = tuple(name for name in _FIELDS if name not in _OPTIONAL)

# reference link budget, 20 urad beam on a 40 urad spiral, medium turbulence
DEFAULT_SCENARIO = Scenario(
    distance_km=1200.0, loss_tx=0.92, loss_rx=0.92, split_ratio=0.1, aperture_cm=30.0,
    responsivity_a_w=0.88, noise_na=9.0, snr_db=20.0, power_pt_mw=90.0,
    sigma_urad=4.0, vib_freq_hz=100.0, omega_urad=20.0, pitch_d_urad=40.0,
    fou_u_mrad=1.3, kappa_mrad=1.0, speed_v_mrad_s=0.4, reset_s=10.0, p_v=0.95,
    turb="turb3",
)


def parse_scenario(text: str) -> Scenario:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELDS:
            raise ScenarioError(f"unknown key {key!r}", line=lineno, key=key)
        if key in values:
            raise ScenarioError(f"duplicate key {key!r}", line=lineno, key=key)
        if key == "turb":
            values[key] = value
            continue
        try:
            number = float(value)
        except ValueError:
            raise ScenarioError(f"key {key!r}: {value!r} is not a number", line=lineno, key=key) from None
        if not math.isfinite(number):
            raise ScenarioError(f"key {key!r}: value must be finite", line=lineno, key=key)
        values[key] = number
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ScenarioError(f"missing required key {missing[0]!r}"
                            + (f" (and {len(missing) - 1} more)" if len(missing) > 1 else ""),
                            key=missing[0])
    return Scenario(**values)


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(text)


def dump_scenario(scenario: Scenario) -> str:
    lines = []
    for name in _FIELDS:
        value = getattr(scenario, name)
        if value is None:
            continue
        lines.append(f"{name} = {value if isinstance(value, str) else repr(float(value))}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Evaluation:
    B: float
    omega_max: float
    g: float
    chain: ProbabilityChain
    T_U: float
    T_S: float
    T_M: float


def evaluate(scenario: Scenario, mode: str = "approx") -> Evaluation:
    """Full analytic chain from link budget to expected multi-scan time.

    Raises DomainError when omega is past the divergence bound or P_S = 0.
    """
    B = scenario.B
    scan = scenario.scan()
    g = coverage_radius(scan.omega, B, scenario.sigma)
    chain = probability_chain(scan, g, mode)
    t_m = expected_acquisition_time(scan, chain).expected_time
    return Evaluation(B, max_divergence(B, scenario.sigma), g, chain,
                      fou_scan_time(scan), single_scan_expected_time(scan), t_m)


def expected_time(scenario: Scenario) -> float:
    """T_M, or +inf where the model is undefined (no coverage or P_S = 0)."""
    try:
        return evaluate(scenario).T_M
    except DomainError:
        return math.inf
