import csv
import io
import json
import math

import numpy as np
import pytest

from acqtime import cli
from acqtime.scenario import (
    DEFAULT_SCENARIO,
    ScenarioError,
    URAD,
    dump_scenario,
    parse_scenario,
)


def write(tmp_path, scenario=DEFAULT_SCENARIO, name="s.txt", **changes):
    path = tmp_path / name
    path.write_text(dump_scenario(scenario.replace(**changes)))
    return str(path)


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def sweep_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestParse:
    def test_round_trip(self):
        assert parse_scenario(dump_scenario(DEFAULT_SCENARIO)) == DEFAULT_SCENARIO

    def test_round_trip_awkward_floats(self):
        sc = DEFAULT_SCENARIO.replace(omega_urad=0.1 + 0.2, p_v=1 / 3, turb=None, gamma=0.36, alpha=4.03, beta=1.54)
        assert parse_scenario(dump_scenario(sc)) == sc

    def test_comments_and_blank_lines(self):
        text = "# header\n\n" + dump_scenario(DEFAULT_SCENARIO).replace("p_v = 0.95", "p_v = 0.95  # field")
        assert parse_scenario(text) == DEFAULT_SCENARIO

    def test_shipped_file(self):
        from pathlib import Path
        path = Path(__file__).resolve().parents[1] / "scenarios" / "reference_turb3.txt"
        assert parse_scenario(path.read_text()) == DEFAULT_SCENARIO

    @pytest.mark.parametrize("mutate,key", [
        (lambda t: t.replace("pitch_d_urad = 40.0\n", ""), "pitch_d_urad"),
        (lambda t: t + "colour = 3\n", "colour"),
        (lambda t: t + "p_v = 0.9\n", "p_v"),
        (lambda t: t.replace("p_v = 0.95", "p_v = lots"), "p_v"),
        (lambda t: t.replace("p_v = 0.95", "p_v = nan"), "p_v"),
        (lambda t: t.replace("turb = turb3", "turb = turb9"), "turb"),
        (lambda t: t + "gamma = 0.3\n", "turb"),
    ])
    def test_errors_name_key(self, mutate, key):
        with pytest.raises(ScenarioError) as info:
            parse_scenario(mutate(dump_scenario(DEFAULT_SCENARIO)))
        assert info.value.key == key
        assert key in str(info.value)

    def test_error_reports_line(self):
        with pytest.raises(ScenarioError) as info:
            parse_scenario("distance_km = 1200\nnonsense line\n")
        assert info.value.line == 2

    def test_explicit_turbulence(self):
        text = dump_scenario(DEFAULT_SCENARIO).replace("turb = turb3", "gamma = 0.36\nalpha = 4.03\nbeta = 1.54")
        sc = parse_scenario(text)
        assert sc.B == pytest.approx(DEFAULT_SCENARIO.B, rel=1e-15)

    def test_units(self):
        link, scan = DEFAULT_SCENARIO.link(), DEFAULT_SCENARIO.scan()
        assert link.distance_R == 1.2e6 and link.aperture_D_r == 0.3 and link.power_P_t == 0.09
        assert link.noise_std == pytest.approx(9e-9) and scan.speed_v == pytest.approx(4e-4)
        assert scan.fou_U == pytest.approx(1.3e-3) and scan.pitch_d == pytest.approx(40e-6)


class TestEval:
    def test_anchor(self, tmp_path):
        code, out = run("eval", "--scenario", write(tmp_path), "--json")
        assert code == 0
        data = json.loads(out)
        assert data["T_M"] == pytest.approx(592.9, rel=5e-4)
        assert data["P_S"] == pytest.approx(0.4317, abs=1e-4)

    def test_optimal_pitch_is_faster(self, tmp_path):
        at_40 = json.loads(run("eval", "--scenario", write(tmp_path), "--json")[1])["T_M"]
        at_opt = json.loads(run("eval", "--scenario", write(tmp_path, pitch_d_urad=31.86), "--json")[1])["T_M"]
        assert at_opt < at_40

    def test_text_lists_every_quantity(self, tmp_path):
        code, out = run("eval", "--scenario", write(tmp_path))
        assert code == 0
        for name in ("B", "omega_max", "g", "tau", "P_SNR", "P_R", "P_U", "P_S", "T_U", "T_S", "T_M"):
            assert any(line.split()[0] == name for line in out.splitlines())

    def test_missing_key_exit_2(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text(dump_scenario(DEFAULT_SCENARIO).replace("pitch_d_urad = 40.0\n", ""))
        code, _ = run("eval", "--scenario", str(path))
        assert code == 2
        assert "pitch_d_urad" in capsys.readouterr().err

    def test_missing_file_exit_2(self, tmp_path):
        assert run("eval", "--scenario", str(tmp_path / "nope.txt"))[0] == 2

    def test_domain_error_exit_3(self, tmp_path, capsys):
        code, _ = run("eval", "--scenario", write(tmp_path, omega_urad=40.0))
        assert code == 3
        assert "divergence bound" in capsys.readouterr().err

    def test_dump_round_trip(self, tmp_path):
        code, out = run("eval", "--scenario", write(tmp_path), "--dump-scenario")
        assert code == 0
        assert parse_scenario(out) == DEFAULT_SCENARIO


class TestOptimize:
    def test_pitch(self, tmp_path):
        code, out = run("optimize", "--scenario", write(tmp_path), "--target", "pitch")
        assert code == 0
        assert float(out.split()[1]) == pytest.approx(31.86, abs=0.01)

    def test_omega_turb5(self, tmp_path):
        code, out = run("optimize", "--scenario", write(tmp_path, turb="turb5"), "--target", "omega")
        assert code == 0
        assert "branch     AtLimit" in out

    def test_omega_turb1(self, tmp_path):
        code, out = run("optimize", "--scenario", write(tmp_path, turb="turb1", omega_limit_urad=22.8),
                        "--target", "omega")
        assert code == 0 and "AtBtm" in out

    def test_fou_wide_pitch(self, tmp_path):
        code, out = run("optimize", "--scenario", write(tmp_path, pitch_d_urad=48.0), "--target", "fou")
        assert code == 0
        fields = {line.split()[0]: line.split()[1:] for line in out.splitlines()}
        root, fit = float(fields["U_opt_root"][0]), float(fields["U_opt_fit"][0])
        assert root == pytest.approx(0.87, abs=0.005)
        assert fit == pytest.approx(root, rel=2e-3)

    def test_vibration(self, tmp_path):
        code, out = run("optimize", "--scenario", write(tmp_path, omega_urad=30.0), "--target", "vibration")
        assert code == 0 and "sigma_opt  none" in out

    def test_fou_domain_error(self, tmp_path):
        # P_R = 1 leaves nothing to optimise
        code, _ = run("optimize", "--scenario", write(tmp_path, p_v=1.0, pitch_d_urad=20.0), "--target", "fou")
        assert code == 3


class TestSweep:
    def test_pitch_minimum(self, tmp_path):
        code, out = run("sweep", "--scenario", write(tmp_path), "--var", "pitch", "--from", "20", "--to", "100",
                        "--steps", "81")
        assert code == 0
        rows = sweep_rows(out)
        values = np.array([float(r["value"]) for r in rows])
        t_m = np.array([float(r["T_M_analytic_s"]) for r in rows])
        assert values[np.argmin(t_m)] == values[np.argmin(np.abs(values - 31.86))]

    def test_omega_plateau(self, tmp_path):
        code, out = run("sweep", "--scenario", write(tmp_path, turb="turb1"), "--var", "omega",
                        "--from", "10", "--to", "33", "--steps", "47")
        assert code == 0
        rows = [r for r in sweep_rows(out) if 18.8 <= float(r["value"]) <= 32.0]
        t_m = np.array([float(r["T_M_analytic_s"]) for r in rows])
        assert len(rows) > 10
        assert np.ptp(t_m) / t_m.min() <= 1e-9

    def test_fou_near_one_point_three(self, tmp_path):
        # the fixed 1.3 kappa rule costs about 1% in T_M at T_a = 30 s, P_V = 0.99
        code, out = run("sweep", "--scenario", write(tmp_path, pitch_d_urad=48.0, reset_s=30.0, p_v=0.99),
                        "--var", "fou", "--from", "0.3", "--to", "2.5", "--steps", "221")
        assert code == 0
        rows = sweep_rows(out)
        values = np.array([float(r["value"]) for r in rows])
        t_m = np.array([float(r["T_M_analytic_s"]) for r in rows])
        at_13 = t_m[np.argmin(np.abs(values - 1.3))]
        assert at_13 / t_m.min() - 1 < 0.01

    def test_header_and_precision(self, tmp_path):
        code, out = run("sweep", "--scenario", write(tmp_path), "--var", "sigma", "--from", "0", "--to", "6",
                        "--steps", "7")
        lines = out.splitlines()
        assert lines[0] == "var,value,T_M_analytic_s,P_S,tau,g_urad"
        assert len(lines) == 8
        for cell in lines[3].split(",")[1:]:
            assert repr(float(cell)) == cell

    def test_mc_columns_and_bytes(self, tmp_path):
        path = write(tmp_path)
        args = ["sweep", "--scenario", path, "--var", "pitch", "--from", "30", "--to", "50", "--steps", "3",
                "--trials", "3000", "--seed", "4"]
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(args + ["--out", str(first)]) == 0
        assert cli.main(args + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        header = first.read_text().splitlines()[0]
        assert header.endswith(",T_M_mc_s,mc_ci95_s")

    def test_bad_rows_nan_exit_3(self, tmp_path, capsys):
        code, out = run("sweep", "--scenario", write(tmp_path), "--var", "omega", "--from", "30", "--to", "36",
                        "--steps", "4")
        assert code == 3
        rows = sweep_rows(out)
        assert math.isnan(float(rows[-1]["T_M_analytic_s"]))
        assert not math.isnan(float(rows[0]["T_M_analytic_s"]))
        assert "warning" in capsys.readouterr().err

    def test_bad_bounds_exit_2(self, tmp_path):
        assert run("sweep", "--scenario", write(tmp_path), "--var", "pitch", "--from", "50", "--to", "30",
                   "--steps", "3")[0] == 2
        assert run("sweep", "--scenario", write(tmp_path), "--var", "pitch", "--from", "30", "--to", "50",
                   "--steps", "1")[0] == 2


class TestMcAndValidate:
    def test_mc(self, tmp_path):
        code, out = run("mc", "--scenario", write(tmp_path), "--trials", "20000", "--seed", "3", "--workers", "2")
        assert code == 0
        assert "success_rate    1" in out

    def test_mc_cap_exit_3(self, tmp_path):
        assert run("mc", "--scenario", write(tmp_path, p_v=0.0), "--trials", "10")[0] == 3

    def test_validate_few_trials_skips(self, tmp_path):
        code, out = run("validate", "--scenario", write(tmp_path), "--trials", "10")
        assert code == 0
        assert out.count("SKIP") >= 3
        assert "FAIL" not in out

    def test_validate_corrupt_exit_2(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("this is not a scenario\n")
        code, out = run("validate", "--scenario", str(path))
        assert code == 2 and out == ""

    @pytest.mark.slow
    def test_validate_full(self, tmp_path):
        code, out = run("validate", "--scenario", write(tmp_path), "--trials", "100000")
        assert code == 0, out
        assert "FAIL" not in out
