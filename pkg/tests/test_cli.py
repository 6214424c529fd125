import json
from pathlib import Path

import pytest

from ofalab.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _rows(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ofalab ")
    return [line.split(",") for line in lines[1:]]


def test_solve_worked_example(tmp_path, capsys):
    assert main(["solve", "--config", str(CONFIGS / "worked_example.config"), "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "equilibrium.csv")
    assert rows[0][:4] == ["builder", "f_bar", "v_bar", "h_star"]
    assert float(rows[1][3]) == pytest.approx(49.94, abs=0.01)
    assert float(rows[2][3]) == pytest.approx(82.17, abs=0.01)
    payload = json.loads((tmp_path / "equilibrium.json").read_text())
    assert payload["meta"]["seed"] == 0 and payload["method"] == "closed_form"
    assert "49.94" in capsys.readouterr().out


def test_invalid_game_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.config"
    cfg.write_text("[game]\nf_bar = [10.0, 20.0]\nv_bar = [40.0, 5.0]\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "f_bar >= v_bar" in capsys.readouterr().err


def test_missing_config_exits_2():
    assert main(["solve"]) == 2
    assert main(["solve", "--config", "/nonexistent.config"]) == 2


@pytest.mark.parametrize("table_id", [2, 5])
def test_sweep_reproduces_tables(tmp_path, table_id):
    from ofalab.reference import TABLES

    out = tmp_path / "a"
    assert main(["sweep", "--config", str(CONFIGS / f"table{table_id}.config"), "--out", str(out)]) == 0
    rows = _rows(out / "sweep.csv")[1:]
    table = TABLES[table_id]
    m = table.n_builders
    assert len(rows) == 5 * m
    for k, row in enumerate(rows):
        col, i = divmod(k, m)
        assert float(row[4]) == pytest.approx(table.h[i][col], abs=0.01)
        assert float(row[5]) == pytest.approx(table.utility[i][col], abs=0.01)
    again = tmp_path / "b"
    main(["sweep", "--config", str(CONFIGS / f"table{table_id}.config"), "--out", str(again)])
    assert (out / "sweep.csv").read_bytes() == (again / "sweep.csv").read_bytes()


def test_sweep_records_errors_and_continues(tmp_path):
    cfg = tmp_path / "s.config"
    cfg.write_text('[game]\nv_bar = [4.0, 2.0]\nf_over_v = 2.0\n[sweep]\nparameter = "game.f_over_v"\n'
                   "values = [0.5, 3.0]\n")
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    rows = _rows(tmp_path / "sweep.csv")
    assert rows[1][-1] != "" and len(rows) == 4


def test_empty_sweep_exits_2(tmp_path):
    cfg = tmp_path / "s.config"
    cfg.write_text('[game]\nv_bar = [4.0, 2.0]\nf_over_v = 2.0\n[sweep]\nparameter = "game.f_over_v"\nvalues = []\n')
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_simulate_outputs_and_determinism(tmp_path):
    args = ["simulate", "--config", str(CONFIGS / "stakes.config"), "--replications", "1", "--seed", "7",
            "--trajectories", "per_replication"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("aggregate.csv", "histogram.csv", "trajectory_00000.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    agg = _rows(tmp_path / "a" / "aggregate.csv")
    assert len(agg) == 1002
    hist = _rows(tmp_path / "a" / "histogram.csv")
    assert sum(int(r[3]) for r in hist[1:] if r[0] == "1") == 1


def test_simulate_matches_library(tmp_path):
    from ofalab.seeding import SeedPolicy
    from ofalab.stakes import simulate
    from ofalab.verify import reference_stake_config

    assert main(["simulate", "--config", str(CONFIGS / "stakes.config"), "--replications", "2", "--seed", "3",
                 "--trajectories", "long", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "trajectories.csv")
    last = [r for r in rows[1:] if r[0] == "1"][-1]
    tr = simulate(reference_stake_config(), SeedPolicy(3).seed_sequence("simulate", 1))
    assert float(last[2]) == tr.totals[-1]


def test_simulate_rejects_cost_violation(tmp_path, capsys):
    cfg = tmp_path / "bad.config"
    text = (CONFIGS / "stakes.config").read_text().replace("alpha = 8.0", "alpha = 12.0")
    cfg.write_text(text)
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "staking cost" in capsys.readouterr().err


def test_verify_tables_and_fault(tmp_path):
    assert main(["verify", "--tables", "--out", str(tmp_path / "ok")]) == 0
    report = json.loads((tmp_path / "ok" / "report.json").read_text())
    assert [r["check_id"] for r in report] == ["table-2", "table-3", "table-4", "table-5"]
    assert main(["verify", "--tables", "--inject-fault", "--out", str(tmp_path / "bad")]) == 1
