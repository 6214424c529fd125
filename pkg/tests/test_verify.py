import json

import numpy as np
import pytest

from ofalab.equilibrium import solve_two_player_closed_form
from ofalab.game import AuctionConfig
from ofalab.seeding import SeedPolicy
from ofalab.verify import (
    QUICK,
    CheckReport,
    brute_force_equilibrium_2p,
    run_checks,
    run_table_reproduction,
    summarize,
    write_report,
)


def test_grid_oracle_worked_example():
    cfg = AuctionConfig.from_arrays([100, 200], [40, 80])
    oracle = brute_force_equilibrium_2p(cfg, 2000)
    assert oracle.n_cells == 1
    assert oracle.distance_in_cells([49.94, 82.17]) <= 1.0


def test_grid_oracle_symmetric():
    cfg = AuctionConfig.from_arrays([90, 90], [30, 30])
    oracle = brute_force_equilibrium_2p(cfg, 1200)
    assert oracle.n_cells == 1
    assert oracle.distance_in_cells([40.0, 40.0]) <= 1.0


@pytest.mark.parametrize("seed", range(3))
def test_grid_oracle_random(seed):
    rng = np.random.default_rng(seed)
    f = 10 ** rng.uniform(0, 3, 2)
    cfg = AuctionConfig.from_arrays(f, f * (1 - 0.99 * rng.random(2)))
    oracle = brute_force_equilibrium_2p(cfg, 1000)
    assert oracle.n_cells == 1
    assert oracle.distance_in_cells(solve_two_player_closed_form(cfg).h_star) <= 1.0


@pytest.mark.parametrize("table_id", [2, 3, 4, 5])
def test_table_reports_pass(table_id):
    rep = run_table_reproduction(table_id)
    assert rep.status == "pass"
    assert len(rep.measured) == 5


def test_injected_fault_fails():
    assert run_table_reproduction(2, perturb=1.0).status == "fail"


def test_status_values():
    with pytest.raises(ValueError):
        CheckReport("x", "y", "ok", 0, 0, "", 0.0)


def test_quick_suite_is_thread_independent(tmp_path):
    kw = dict(properties=True, seed_policy=SeedPolicy(9), sizes=QUICK)
    one = run_checks(threads=1, **kw)
    four = run_checks(threads=4, **kw)
    assert [r.check_id for r in one] == sorted(r.check_id for r in one)
    assert [r.measured for r in one] == [r.measured for r in four]
    assert all(r.status == "pass" for r in one)
    json_path, text_path = write_report(one, tmp_path, "hdr")
    data = json.loads(json_path.read_text())
    assert isinstance(data, list) and {"check_id", "claim_ref", "status"} <= set(data[0])
    assert text_path.read_text().startswith("# hdr")
    assert "passed" in summarize(one)
