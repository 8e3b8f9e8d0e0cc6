import json
import os

import pytest

from rxnsim.cli import main


@pytest.fixture()
def clock_rxn(tmp_path):
    assert main(["models", "--emit", "crazy_clock", "--out", str(tmp_path / "cc.rxn")]) == 0
    return str(tmp_path / "cc.rxn")


def test_models_list(capsys):
    assert main(["models", "--list"]) == 0
    out = capsys.readouterr().out.split()
    assert out == ["epidemic", "abc", "crazy_clock", "crazy_clock_switch", "viral", "transcription"]


def test_models_emit_viral(tmp_path):
    path = tmp_path / "viral.rxn"
    assert main(["models", "--emit", "viral", "--out", str(path)]) == 0
    text = path.read_text()
    assert "species struct : fluid" in text
    assert "param mu5 = 1000" in text


def test_models_emit_unknown(capsys):
    assert main(["models", "--emit", "nosuch"]) == 3


def test_simulate_writes_csv_and_manifest(tmp_path, clock_rxn):
    out = str(tmp_path / "run.csv")
    rc = main(["simulate", clock_rxn, "--method", "ssa", "--step", "1e-5", "--runs", "5",
               "--tmax", "0.001", "--seed", "7", "--out", out, "--record", "0.0005"])
    assert rc == 0
    lines = open(out).read().strip().split("\n")
    assert lines[0] == "run,time,A,B"
    assert len(lines) == 1 + 5 * 3
    manifest = json.load(open(out + ".manifest.json"))
    assert manifest["seed"] == 7 and manifest["method"] == "ssa" and manifest["runs"] == 5


def test_simulate_identical_seed_identical_bytes(tmp_path, clock_rxn):
    args = ["simulate", clock_rxn, "--method", "hsde", "--step", "1e-5", "--runs", "4",
            "--tmax", "0.001", "--seed", "3", "--record", "0.0005"]
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(args + ["--out", a]) == 0
    assert main(args + ["--out", b]) == 0
    assert open(a, "rb").read() == open(b, "rb").read()


def test_simulate_ode_multiple_runs_rejected(tmp_path, clock_rxn):
    rc = main(["simulate", clock_rxn, "--method", "ode", "--step", "1e-5", "--runs", "7",
               "--tmax", "0.001", "--out", str(tmp_path / "x.csv")])
    assert rc == 3


def test_simulate_positional_compat(tmp_path, clock_rxn):
    out = str(tmp_path / "legacy.csv")
    rc = main(["simulate", clock_rxn, out, "SIM", "1e-5", "3", "0.001", "--seed", "1"])
    assert rc == 0
    assert os.path.exists(out) and os.path.exists(out + ".manifest.json")


def test_simulate_bounds_override_recorded(tmp_path, clock_rxn):
    bounds = tmp_path / "b.txt"
    bounds.write_text("B 0 900\n")
    out = str(tmp_path / "b.csv")
    rc = main(["simulate", clock_rxn, "--method", "ode", "--step", "1e-5", "--tmax", "0.0005",
               "--out", out, "-B", str(bounds)])
    assert rc == 0
    manifest = json.load(open(out + ".manifest.json"))
    assert manifest["bounds_override"] == "B 0 900\n"


def test_simulate_bounds_override_conflicting_init_exit_2(tmp_path, clock_rxn):
    bounds = tmp_path / "b.txt"
    bounds.write_text("A 0 900\n")  # initial count 1000 violates the override
    rc = main(["simulate", clock_rxn, "--method", "ode", "--step", "1e-5", "--tmax", "0.0005",
               "--out", str(tmp_path / "b.csv"), "-B", str(bounds)])
    assert rc == 2


def test_simulate_parse_error_exit_2(tmp_path):
    bad = tmp_path / "bad.rxn"
    bad.write_text("species A : fluid\n")
    rc = main(["simulate", str(bad), "--method", "ode", "--step", "1e-5", "--tmax", "1"])
    assert rc == 2


def test_simulate_missing_flags_exit_3(clock_rxn):
    assert main(["simulate", clock_rxn]) == 3
    assert main(["simulate", clock_rxn, "--method", "warp", "--step", "1", "--tmax", "1"]) == 3


def test_simulate_missing_file_exit_3(tmp_path):
    rc = main(["simulate", str(tmp_path / "none.rxn"), "--method", "ode", "--step", "1e-5",
               "--tmax", "1"])
    assert rc == 3


def test_fokker_planck_cli(tmp_path):
    out = str(tmp_path / "fp")
    rc = main(["fokker-planck", "crazy-clock", "--tmax", "0.0002", "--cells", "200",
               "--out", out])
    assert rc == 0
    grid = open(out + "_grid.csv").read().strip().split("\n")
    assert grid[0] == "time,mode,x,density"
    assert len(grid) == 1 + 200
    masses = open(out + "_masses.csv").read().strip().split("\n")
    total = sum(float(v) for v in masses[1].split(",")[2:])
    assert total == pytest.approx(1.0, abs=1e-6)


def test_fokker_planck_coarse_cells_warns_but_runs(tmp_path, capsys):
    out = str(tmp_path / "fp")
    rc = main(["fokker-planck", "crazy-clock", "--tmax", "0.0002", "--cells", "150",
               "--out", out])
    assert rc == 0
    assert "coarser than the re-injection offset" in capsys.readouterr().err


def test_fokker_planck_switched(tmp_path):
    out = str(tmp_path / "fps")
    rc = main(["fokker-planck", "crazy-clock-switch", "--tmax", "0.0002", "--cells", "200",
               "--out", out, "--times", "0.0001,0.0002"])
    assert rc == 0
    rows = open(out + "_grid.csv").read().strip().split("\n")[1:]
    assert len(rows) == 2 * 2 * 200  # 2 snapshots, 2 modes


def test_simulate_numerical_failure_exit_4(tmp_path):
    bad = tmp_path / "boom.rxn"
    bad.write_text(
        "model boom\nscale N = 10\n"
        "species A : discrete, init 5\nspecies B : discrete, init 0\n"
        "reaction r : A -> 0 @ expr A / B\n"
    )
    rc = main(["simulate", str(bad), "--method", "ssa", "--step", "0.1", "--tmax", "1",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 4


def test_fokker_planck_bad_dt_exit_4(tmp_path):
    rc = main(["fokker-planck", "crazy-clock", "--tmax", "0.0002", "--dt", "1.0",
               "--out", str(tmp_path / "x")])
    assert rc == 4


def test_stats_cli(tmp_path, clock_rxn):
    traj = str(tmp_path / "t.csv")
    assert main(["simulate", clock_rxn, "--method", "ssa", "--step", "1e-5", "--runs", "20",
                 "--tmax", "0.001", "--seed", "5", "--out", traj, "--record", "0.0005"]) == 0
    out = str(tmp_path / "st")
    rc = main(["stats", traj, "--at", "0.001", "--species", "A", "--atoms", "0",
               "--bins", "50", "--out", out])
    assert rc == 0
    rows = open(out + "_pmf.csv").read().strip().split("\n")[1:]
    assert sum(float(r.split(",")[-1]) for r in rows) == pytest.approx(1.0, abs=1e-12)
    mean_rows = open(out + "_mean.csv").read().strip().split("\n")
    assert mean_rows[0] == "time,species,mean,stderr"


def test_stats_unknown_species_exit_3(tmp_path, clock_rxn):
    traj = str(tmp_path / "t.csv")
    main(["simulate", clock_rxn, "--method", "ssa", "--step", "1e-5", "--runs", "2",
          "--tmax", "0.001", "--seed", "5", "--out", traj, "--record", "0.0005"])
    assert main(["stats", traj, "--at", "0.001", "--species", "nosuch", "--out",
                 str(tmp_path / "s")]) == 3


def test_stats_off_grid_time_exit_3(tmp_path, clock_rxn):
    traj = str(tmp_path / "t.csv")
    main(["simulate", clock_rxn, "--method", "ssa", "--step", "1e-5", "--runs", "2",
          "--tmax", "0.001", "--seed", "5", "--out", traj, "--record", "0.0005"])
    assert main(["stats", traj, "--at", "0.00033", "--species", "A", "--out",
                 str(tmp_path / "s")]) == 3


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0
    assert "rxnsim" in capsys.readouterr().out


def test_help(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--help"])
    assert e.value.code == 0
    assert "simulate" in capsys.readouterr().out
