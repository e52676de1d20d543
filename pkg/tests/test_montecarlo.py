import math

import numpy as np
import pytest
from scipy import stats

from acqtime import montecarlo as mc
from acqtime.link_budget import TURBULENCE_PRESETS, VibrationParams, pointing_gain
from acqtime.montecarlo import McConfig, Mode, run_mc
from acqtime.scenario import URAD, evaluate



def brute_curve_distance(rho, theta, d, n=400_001):
    a = d / (2 * math.pi)
    t = np.linspace(0, rho / a + 4 * math.pi, n)
    x, y = a * t * np.cos(t), a * t * np.sin(t)
    return np.min(np.hypot(x - rho * math.cos(theta), y - rho * math.sin(theta)))


class TestConfig:
    @pytest.mark.parametrize("kw", [{"trials": 0}, {"max_scans": 0}, {"metric": "taxicab"}])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            McConfig(**kw)


class TestSampling:
    @pytest.mark.parametrize("stratified", [False, True])
    def test_receiver_marginals(self, stratified):
        kappa = 1e-3
        rho, theta = mc.sample_receivers(200_000, kappa, mc.block_rng(1, 0), stratified=stratified)
        assert stats.kstest(rho, stats.rayleigh(scale=kappa).cdf).pvalue > 1e-3
        assert stats.kstest(theta, stats.uniform(0, 2 * math.pi).cdf).pvalue > 1e-3

    def test_radial_distance_examples(self):
        d = 40 * URAD
        # on the first arm, half a pitch out, and near the origin
        assert mc.nearest_arm_distance(d / 2, math.pi, d) == pytest.approx(0.0, abs=1e-18)
        assert mc.nearest_arm_distance(d, math.pi, d) == pytest.approx(d / 2, rel=1e-12)
        assert mc.nearest_arm_distance(0.1 * d, math.pi, d) == pytest.approx(0.1 * d, rel=1e-12)

    def test_curve_metric_against_brute_force(self):
        d = 40 * URAD
        rng = np.random.default_rng(4)
        rho = rng.uniform(0, 8 * d, 20)
        theta = rng.uniform(0, 2 * math.pi, 20)
        got = mc.nearest_arm_distance(rho, theta, d, "curve")
        want = [brute_curve_distance(r, t, d) for r, t in zip(rho, theta)]
        assert got == pytest.approx(want, abs=1e-3 * d)
        assert np.all(got <= mc.nearest_arm_distance(rho, theta, d) + 1e-15)

    def test_gamma_gamma_mean(self):
        turb = TURBULENCE_PRESETS["turb3"]
        h = mc.sample_gamma_gamma(1_000_000, turb, mc.block_rng(2, 0))
        assert np.mean(h) == pytest.approx(turb.gamma, rel=5e-3)


class TestRunMc:
    def test_reference_anchor(self, scenario):
        rep = run_mc(scenario, McConfig(trials=100_000, seed=1))
        assert rep.success_rate == 1.0
        assert rep.mean_time == pytest.approx(592.9, rel=0.02)
        assert rep.per_scan_success_rate == pytest.approx(0.4317, abs=0.005)
        assert abs(rep.per_scan_success_rate - evaluate(scenario).chain.P_S) < 3 * rep.per_scan_se
        assert rep.ci95_halfwidth > 0

    def test_certain_single_scan(self, scenario):
        sc = scenario.replace(p_v=1.0, pitch_d_urad=20.0, fou_u_mrad=40.0)
        rep = run_mc(sc, McConfig(trials=50_000, seed=3))
        assert rep.success_rate == 1.0
        assert rep.per_scan_success_rate == 1.0
        expected = sc.scan().mean_exhaustive_time
        assert abs(rep.mean_time - expected) < rep.ci95_halfwidth * 1.5

    def test_deterministic_across_workers(self, scenario):
        cfg = McConfig(trials=40_000, seed=17)
        serial = run_mc(scenario, cfg)
        parallel = run_mc(scenario, McConfig(trials=40_000, seed=17, workers=4))
        assert serial == parallel

    def test_seed_changes_result(self, scenario):
        assert run_mc(scenario, McConfig(trials=5000, seed=1)) != run_mc(scenario, McConfig(trials=5000, seed=2))

    def test_cap_exceeded(self, scenario):
        with pytest.raises(mc.CapExceededError):
            run_mc(scenario.replace(p_v=0.0), McConfig(trials=100, max_scans=20))

    @pytest.mark.parametrize("d,U", [(32, 0.8), (60, 2.0)])
    def test_grid_corners(self, scenario, d, U):
        sc = scenario.replace(pitch_d_urad=d, fou_u_mrad=U)
        rep = run_mc(sc, McConfig(trials=100_000, seed=5))
        ev = evaluate(sc)
        assert rep.mean_time == pytest.approx(ev.T_M, rel=0.02)
        assert abs(rep.per_scan_success_rate - ev.chain.P_S) < 3 * rep.per_scan_se

    def test_physical_mode_converges(self, scenario):
        rep = run_mc(scenario, McConfig(trials=4000, seed=8, mode=Mode.PHYSICAL, dwell_samples=2000))
        p_s = evaluate(scenario).chain.P_S
        # long dwells average the fades out, leaving the geometric test plus a small bias
        assert rep.per_scan_success_rate == pytest.approx(p_s, abs=4 * rep.per_scan_se + 0.01)

    def test_physical_default_dwell(self, scenario):
        rep = run_mc(scenario, McConfig(trials=500, seed=8, mode=Mode.PHYSICAL))
        assert rep.mode is Mode.PHYSICAL and rep.success_rate == 1.0


class TestMoments:
    def test_no_jitter_is_exact(self, scenario):
        link = scenario.link()
        rep = mc.validate_moments(link, TURBULENCE_PRESETS["turb3"], VibrationParams(0.0), 20 * URAD, 0.0,
                                  samples=1000)
        assert rep.ht2_sample == pytest.approx(pointing_gain(0.0, 20 * URAD, link) ** 2, rel=1e-13)
        assert rep.ht2_rel_error < 1e-13

    @pytest.mark.parametrize("turb", ["turb1", "turb3", "turb5"])
    def test_turbulence_levels(self, scenario, turb):
        rep = mc.validate_moments(scenario.link(), TURBULENCE_PRESETS[turb], VibrationParams(4 * URAD),
                                  20 * URAD, 15.93 * URAD, samples=2_000_000, seed=6)
        assert rep.hc2_rel_error < 0.01
        assert rep.ht2_rel_error < 0.01

    def test_rejects_empty(self, scenario):
        with pytest.raises(mc.DomainError):
            mc.validate_moments(scenario.link(), TURBULENCE_PRESETS["turb3"], VibrationParams(0.0), 1e-5, 0.0,
                                samples=0)
