"""Smoke tests for the python bindings: construct, solve, sweep, round-trip."""

import math

import pytest

import rsfbl


def test_rate_primitives():
    params = rsfbl.FblParams(100, 1e-5)
    assert params.d_const > 0.0
    assert not params.is_infinite
    inf = rsfbl.FblParams.infinite(1e-5)
    assert inf.is_infinite
    assert inf.d_const == 0.0
    # At the sentinel the rate is exactly Shannon.
    assert rsfbl.fbl_rate(100.0, inf) == pytest.approx(math.log2(101.0), abs=1e-12)
    assert rsfbl.fbl_rate(100.0, params) < math.log2(101.0)
    assert rsfbl.q_inverse(1e-5) == pytest.approx(4.264890793922825, abs=1e-9)


def test_channels_and_schemes():
    ch = rsfbl.random_channels(4, 2, [1.0, 1.0], 5)
    assert ch.num_tx_antennas == 4
    assert ch.num_users == 2
    assert len(ch.channel(0)) == 4
    schemes = rsfbl.candidates_for(2)
    assert len(schemes) == 4
    assert schemes[0].is_rsma
    assert schemes[1].is_sdma
    with pytest.raises(ValueError):
        rsfbl.SchemeKind.noma(0, 0)


def test_solve_and_verify():
    ch = rsfbl.random_channels(2, 2, [1.0, 1.0], 9)
    budget = rsfbl.PowerBudget.from_snr_db(15.0)
    params = rsfbl.FblParams(500, 5e-6)
    opts = rsfbl.SolveOptions()
    res = rsfbl.sca_solve(ch, budget, params, 0.1, rsfbl.SchemeKind.incomplete_rsma(), opts)
    assert res.outcome == rsfbl.Outcome.CONVERGED
    assert res.converged
    sol = res.solution
    assert sol is not None
    assert sol.objective > 0.0
    check = rsfbl.verify_exact_feasibility(
        ch, budget, params, 0.1, rsfbl.SchemeKind.incomplete_rsma(), sol
    )
    assert check.ok, check.detail
    breakdown = rsfbl.evaluate_solution(ch, sol.precoders, sol.common_split, params, budget)
    assert breakdown.sum_rate > 0.0


def test_selector_and_sweep(tmp_path):
    ch = rsfbl.random_channels(4, 2, [1.0, 1.0], 3)
    budget = rsfbl.PowerBudget.from_snr_db(20.0)
    report = rsfbl.solve_best(ch, budget, 1000, 0.25)
    assert report.has_winner
    assert report.selected.solution.objective > 0.0

    cfg = rsfbl.load_config(
        "scenario_id = smoke\n"
        "channel_kind = random\n"
        "num_tx_antennas = 2\n"
        "num_users = 2\n"
        "snr_db = 10\n"
        "blocklengths = 300\n"
        "r_th_bits = 0.05\n"
        "schemes = rsma;sdma\n"
        "num_draws = 1\n"
        "base_seed = 4\n"
    )
    records = rsfbl.run_sweep(cfg)
    assert [r.scheme for r in records] == ["rsma", "sdma"]
    assert all(r.status == "converged" for r in records)

    out = tmp_path / "records.csv"
    rsfbl.write_csv_file(str(out), records)
    back = rsfbl.read_records_csv_file(str(out))
    assert len(back) == 2
    assert back[0].sum_rate_evaluated == pytest.approx(records[0].sum_rate_evaluated)

    rows = rsfbl.aggregate(records)
    assert {r.scheme for r in rows} == {"rsma", "sdma"}
    assert all(r.num_optimal == 1 for r in rows)


def test_config_errors():
    with pytest.raises(ValueError):
        rsfbl.load_config("scenario_id = x\nbogus = 1\n")
    names = rsfbl.template_names()
    assert "underloaded4x2" in names
    for name in names:
        cfg = rsfbl.load_config(rsfbl.config_template(name))
        assert cfg.scenario_id == name
