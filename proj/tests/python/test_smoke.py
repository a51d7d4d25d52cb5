import csv
import math

import pytest

import v2xsim


def test_jakes_epsilon():
    assert v2xsim.jakes_epsilon(13.89, 28e9, 0.125e-3) == pytest.approx(0.757, abs=1e-3)
    assert abs(v2xsim.bessel_j0(2.4048)) < 1e-4


def test_rb_requirements():
    assert v2xsim.rb_requirements(400) == [16, 11, 7, 4, 3, 3, 2, 2, 1, 1, 1, 1, 1, 1, 1]


def test_select_mcs():
    assert v2xsim.select_mcs(-30.0) is None
    assert v2xsim.select_mcs(40.0) is not None


def test_matching_leaves_forbidden_cells():
    pairs, total = v2xsim.max_weight_matching([[1.0, None], [3.0, 2.0]])
    assert total == pytest.approx(3.0)
    assert sorted(pairs) == [(0, 0), (1, 1)]
    pairs, total = v2xsim.max_weight_matching([[None, -math.inf], [None, 5.0]])
    assert total == pytest.approx(5.0)
    assert len(pairs) == 1


def test_power_solve_meets_outage_target():
    p = v2xsim.PairLinkParams()
    p.alpha_v = 1e-8
    p.alpha_cv = 1e-11
    p.alpha_tilde_v = 1e-11
    p.alpha_cz = 1e-9
    p.eps_v = p.eps_cv = 0.757
    p.h_v_sq = p.h_cv_sq = p.h_cz_sq = p.h_tilde_v_sq = 1.0
    p.noise_vue_mw = 10 ** (-10.5)
    p.noise_gnb_mw = 10 ** (-10.9)
    p.gamma0 = 10 ** 0.5
    p.p0 = 1e-3
    p.pc_max_mw = p.pv_max_mw = 10 ** 2.3
    sol = v2xsim.solve_pair_power(p)
    assert sol["feasible"]
    assert 0 <= sol["p_c_mw"] <= p.pc_max_mw
    assert 0 <= sol["p_v_mw"] <= p.pv_max_mw
    assert v2xsim.outage_probability(p, sol["p_c_mw"], sol["p_v_mw"]) <= p.p0 * (1 + 1e-6)


def test_config_keys_and_errors():
    keys = v2xsim.config_keys()
    assert "scheduler.kind" in keys
    assert v2xsim.default_config()["scheduler.c_t"] == "8"
    with pytest.raises(ValueError):
        v2xsim.run({"scheduler.nope": "1"})
    with pytest.raises(ValueError):
        v2xsim.run({"scheduler.kind": "fifo"})


@pytest.mark.parametrize("kind", ["grahs", "hrahs", "ora"])
def test_short_run(kind):
    res = v2xsim.run({"scheduler.kind": kind, "run.duration_s": "0.05", "scenario.num_cues": "20"}, seed=3)
    assert res["complete"]
    assert res["ttis_bwp1"] == 400
    assert res["invariant_violations"] == 0
    assert 0.0 <= res["cue_plr"] <= 1.0
    again = v2xsim.run({"scheduler.kind": kind, "run.duration_s": "0.05", "scenario.num_cues": "20"}, seed=3)
    assert again == res


def test_run_plan_writes_csvs(tmp_path):
    runs = v2xsim.run_plan(
        {"run.duration_s": "0.02", "run.seeds": "1-2", "run.sweep": "scenario.num_cues=5,10"}, str(tmp_path)
    )
    assert len(runs) == 4
    with open(tmp_path / "plr.csv") as f:
        rows = list(csv.DictReader(f))
    assert {r["num_cues"] for r in rows} == {"5", "10"}
    for name in ("delay_cdf.csv", "sumrate.csv", "outage.csv", "rb_cdf.csv"):
        assert (tmp_path / name).exists()
