import pytest

from bimodal_bathtub import cli
from bimodal_bathtub.oracle import VerificationReport
from bimodal_bathtub.scenario import format_scenario


@pytest.fixture()
def scenario_file(tmp_path, case_ii):
    path = tmp_path / "demo.scn"
    path.write_text(format_scenario(case_ii), encoding="utf-8")
    return path


def test_solve_writes_profile_csv(scenario_file, tmp_path, capsys):
    out = tmp_path / "ue.csv"
    rc = cli.main(["solve", "--scenario", str(scenario_file), "--out", str(out),
                   "--no-figures"])
    assert rc == 0
    captured = capsys.readouterr().out
    assert "no-control regime: both_gap" in captured
    assert "c_star =" in captured
    lines = out.read_text().splitlines()
    assert lines[0] == cli.PROFILE_HEADER
    assert len(lines) > 100
    # every row carries both absolute and peak-relative clocks
    first = lines[1].split(",")
    assert len(first) == 12


def test_solve_pc_reports_gated_summary(scenario_file, capsys):
    rc = cli.main(["solve-pc", "--scenario", str(scenario_file)])
    assert rc == 0
    captured = capsys.readouterr().out
    assert "gated regime: full_frt" in captured
    assert "c_p_star =" in captured
    assert "t_s_p =" in captured


def test_output_is_deterministic(scenario_file, tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert cli.main(["solve", "--scenario", str(scenario_file), "--out", str(out1),
                     "--no-figures"]) == 0
    assert cli.main(["solve", "--scenario", str(scenario_file), "--out", str(out2),
                     "--no-figures"]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_missing_key_names_the_key(tmp_path, capsys, case_ii):
    text = "\n".join(line for line in format_scenario(case_ii).splitlines()
                     if not line.startswith("gamma"))
    bad = tmp_path / "bad.scn"
    bad.write_text(text, encoding="utf-8")
    rc = cli.main(["solve", "--scenario", str(bad)])
    assert rc == 1
    assert "gamma" in capsys.readouterr().err


def test_solver_failure_maps_to_exit_2(scenario_file, monkeypatch, capsys):
    from bimodal_bathtub.equilibrium_ue import SolverError

    def boom(p, d=None):
        raise SolverError("no consistent regime")

    monkeypatch.setattr(cli, "solve_ue", boom)
    rc = cli.main(["solve", "--scenario", str(scenario_file)])
    assert rc == 2
    assert "no consistent regime" in capsys.readouterr().err


def test_verify_passes_on_bundled_case(scenario_file, tmp_path, capsys):
    report_path = tmp_path / "report.txt"
    rc = cli.main(["verify", "--scenario", str(scenario_file), "--step", "1e-3",
                   "--out", str(report_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "[ue]" in out and "[pc]" in out
    assert "passes = 1" in out
    assert report_path.read_text().count("conservation_error") == 2


def test_verify_threshold_failure_exits_3(scenario_file, monkeypatch, capsys):
    failing = VerificationReport(
        max_cost_residual_car=1.0, max_cost_residual_frt=0.0, min_slack=0.0,
        conservation_error=0.0, min_implied_departure_rate=0.0,
        ode_replay_error=0.0, replay_min_boarding_rate=0.0, travel_time_gap=0.0,
        c_ref=10.0, n_ref=100.0, o_f_ref=1.0)
    monkeypatch.setattr(cli, "verify", lambda *a, **k: failing)
    rc = cli.main(["verify", "--scenario", str(scenario_file)])
    assert rc == 3
    assert "threshold failure" in capsys.readouterr().err


def test_sweep_command(scenario_file, tmp_path):
    out = tmp_path / "sweep.csv"
    rc = cli.main(["sweep", "--scenario", str(scenario_file), "--key", "n_f_cbd",
                   "--values", "4,6", "--out", str(out), "--step", "2e-4",
                   "--no-figures"])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ("value,c_star,frt_share_ue,c_pstar,frt_share_pc,ratio,"
                        "ue_regime,pc_regime,max_residual")
    assert len(lines) == 3
    assert lines[1].startswith("4,")


def test_regime_map_command(scenario_file, tmp_path):
    out = tmp_path / "map.csv"
    rc = cli.main(["regime-map", "--scenario", str(scenario_file),
                   "--x-key", "n_f_cbd", "--x-grid", "4,6",
                   "--y-key", "f_f", "--y-grid", "1:2:2",
                   "--out", str(out), "--step", "2e-4", "--no-figures"])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("x,y,c_star")
    assert len(lines) == 5


def test_profiles_command_writes_both_equilibria(tmp_path):
    rc = cli.main(["profiles", "--case", "case-ii", "--out", str(tmp_path),
                   "--step", "2e-3", "--no-figures"])
    assert rc == 0
    assert (tmp_path / "profiles_case_ii_ue.csv").exists()
    assert (tmp_path / "profiles_case_ii_pc.csv").exists()


def test_tables_command_writes_three_csvs_and_figures(tmp_path):
    rc = cli.main(["tables", "--out", str(tmp_path), "--step", "5e-4"])
    assert rc == 0
    for stem in ("table1_ff1", "table1_ff2", "table2"):
        csv_path = tmp_path / f"{stem}.csv"
        assert csv_path.exists()
        assert csv_path.read_text().splitlines()[0].startswith("value,")
        png = tmp_path / f"{stem}.png"
        assert png.exists() and png.stat().st_size > 0


def test_unknown_scenario_path_is_a_validation_error(capsys):
    rc = cli.main(["solve", "--scenario", "/nonexistent/file.scn"])
    assert rc == 1
