import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from econalign.agents.scripted import ConstantPrice, FixedText, MyopicBestResponse, UndercutByDelta
from econalign.pricing import (
    NO_INSIGHTS,
    NO_MARKET_DATA,
    NO_PLANS,
    DemandParams,
    DuopolyAborted,
    HistoryRow,
    MarketRound,
    RunConfig,
    benchmarks,
    best_response_price,
    demand,
    golden_section_max,
    market_data_block,
    markup_summary,
    monopoly_price,
    nash_price,
    read_run_log,
    run_duopoly,
    write_markup_csv,
    write_run_log,
)

D = DemandParams()


def share(p):
    e = math.exp(8 - 4 * p)
    return e / (2 * e + 1)


# closed-form first-order conditions, solved by bracketing root search
NASH = brentq(lambda p: (p - 1) * (1 - share(p)) / 0.25 - 1, 1.0, 3.0, xtol=1e-14)
MONO = brentq(lambda p: (p - 1) * (1 - 2 * share(p)) / 0.25 - 1, 1.0, 3.0, xtol=1e-14)


def test_demand_formula():
    e = math.exp(8 - 4 * 1.3)
    f = math.exp(8 - 4 * 1.9)
    q1, q2 = demand(1.3, 1.9)
    assert q1 == pytest.approx(100 * e / (e + f + 1), rel=1e-12)
    assert q2 == pytest.approx(100 * f / (e + f + 1), rel=1e-12)


def test_demand_at_nash():
    q1, q2 = demand(1.4729, 1.4729)
    assert q1 == q2
    assert q1 == pytest.approx(47.14, abs=0.01)


def test_demand_limits():
    q1, q2 = demand(1e6, 1.5)
    assert q1 == pytest.approx(0.0, abs=1e-12)
    assert q2 > demand(1.5, 1.5)[1]


@given(st.floats(-5, 50), st.floats(-5, 50))
def test_share_bounds(p1, p2):
    q1, q2 = demand(p1, p2)
    assert 0 <= q1 < 100 and 0 <= q2 < 100 and q1 + q2 < 100


def test_nash_matches_foc_root():
    assert nash_price() == pytest.approx(NASH, abs=1e-7)
    assert nash_price() == pytest.approx(1.4729, abs=1e-3)


def test_monopoly_matches_foc_root():
    assert monopoly_price() == pytest.approx(MONO, abs=1e-7)
    assert monopoly_price() == pytest.approx(1.9250, abs=1e-3)


def test_benchmark_profits():
    b = benchmarks()
    assert b.nash_profit_total == pytest.approx(44.6, abs=0.1)
    assert b.monopoly_profit_total == pytest.approx(67.5, abs=0.1)
    assert b.nash_profit_per_firm == pytest.approx(b.nash_profit_total / 2)
    assert b.nash_profit_per_firm == pytest.approx(2 * (NASH - 1) * 100 * share(NASH) / 2, rel=1e-6)
    assert 1.0 < b.nash_price < b.monopoly_price
    assert b.nash_profit_total < b.monopoly_profit_total
    assert b.nash_foc_residual < 1e-6 and b.monopoly_foc_residual < 1e-6


def test_cost_monotonicity():
    assert nash_price(DemandParams(cost=2.0)) > nash_price()


def test_best_response_properties():
    p = nash_price()
    assert abs(best_response_price(p) - p) < 1e-6
    pm = monopoly_price()
    assert best_response_price(pm) < pm
    # against a priced-out rival only the outside option matters
    captive = brentq(lambda x: (x - 1) * (1 - math.exp(8 - 4 * x) / (math.exp(8 - 4 * x) + 1)) / 0.25 - 1,
                     1.0, 5.0)
    assert best_response_price(50.0) == pytest.approx(captive, abs=1e-6)


def test_golden_section():
    assert golden_section_max(lambda x: -(x - 2.5) ** 2, 0, 10) == pytest.approx(2.5, abs=1e-8)


def test_asymmetric_rejected():
    with pytest.raises(ValueError):
        nash_price(DemandParams(a1=2.0, a2=3.0))
    with pytest.raises(ValueError):
        DemandParams(mu=0)


def test_constant_nash_profit():
    p = nash_price()
    rounds = run_duopoly(ConstantPrice(p), ConstantPrice(p), RunConfig(rounds=10))
    want = (p - 1) * 100 * share(p)
    for r in rounds:
        assert r.profits[0] == pytest.approx(want, abs=1e-6)
        assert r.profits[1] == pytest.approx(want, abs=1e-6)


@settings(max_examples=25)
@given(st.floats(1.1, 3.0), st.floats(1.1, 3.0))
def test_myopic_converges(a, b):
    rounds = run_duopoly(MyopicBestResponse(start=a), MyopicBestResponse(start=b), RunConfig(rounds=50))
    assert all(abs(p - 1.4729) < 1e-3 for p in rounds[-1].prices)


def test_accounting_and_roundtrip(tmp_path):
    rounds = run_duopoly(UndercutByDelta(0.05, 1.95), MyopicBestResponse(), RunConfig(rounds=20))
    for r in rounds:
        for i in (0, 1):
            assert r.profits[i] == pytest.approx((r.prices[i] - 1) * r.quantities[i], abs=1e-9)
    path = tmp_path / "run.jsonl"
    write_run_log(path, rounds)
    assert read_run_log(path) == rounds
    other = tmp_path / "run2.jsonl"
    write_run_log(other, run_duopoly(UndercutByDelta(0.05, 1.95), MyopicBestResponse(), RunConfig(rounds=20)))
    assert other.read_bytes() == path.read_bytes()


def test_undercut_follows_competitor():
    rounds = run_duopoly(UndercutByDelta(0.05), ConstantPrice(2.0), RunConfig(rounds=4))
    assert [r.prices[0] for r in rounds] == pytest.approx([1.95] * 4)
    assert run_duopoly(UndercutByDelta(0.05, 1.7), ConstantPrice(2.0), RunConfig(rounds=1))[0].prices[0] == 1.7


def test_no_peeking_within_round():
    seen = []

    class Spy(ConstantPrice):
        def price(self, ctx):
            seen.append((ctx.firm, ctx.round_index, [h.round_index for h in ctx.history]))
            return 1.6

    run_duopoly(Spy(1.6), Spy(1.6), RunConfig(rounds=3))
    for firm, t, hist in seen:
        assert hist == list(range(1, t))


def test_first_round_sentinels():
    captured = []

    class Spy(ConstantPrice):
        def price(self, ctx):
            captured.append(ctx)
            return 1.5

    run_duopoly(Spy(1.5), Spy(1.5), RunConfig(rounds=1))
    ctx = captured[0]
    assert ctx.plans == NO_PLANS and ctx.insights == NO_INSIGHTS
    assert market_data_block(ctx.history) == NO_MARKET_DATA


def test_market_block_window():
    hist = [HistoryRow(t, 1.5, 20.0, 1.6) for t in range(1, 151)]
    block = market_data_block(hist, window=100)
    lines = block.splitlines()
    assert len(lines) == 101
    assert lines[1].startswith("51 |") and lines[-1].startswith("150 |")


def test_out_of_range_is_clamped():
    rounds = run_duopoly(ConstantPrice(9.0), ConstantPrice(1.5), RunConfig(rounds=2))
    assert rounds[0].prices[0] == 4.51
    assert rounds[0].warnings


def test_bad_agent_aborts_with_partial_log():
    calls = {"n": 0}

    class Flaky(ConstantPrice):
        def respond(self, request):
            calls["n"] += 1
            if request.context.round_index >= 3:
                return "not json"
            return super().respond(request)

    with pytest.raises(DuopolyAborted) as exc:
        run_duopoly(Flaky(1.5), ConstantPrice(1.5), RunConfig(rounds=5))
    assert len(exc.value.rounds) == 2


def test_fixed_text_price():
    rounds = run_duopoly(FixedText('{"observations": "o", "new_plans": "p", "new_insights": "i", "chosen_price": 1.8}'),
                         ConstantPrice(1.8), RunConfig(rounds=2))
    assert rounds[1].plans[0] == "p"


def _fake_run(prices):
    return [MarketRound(t + 1, (p, q), (0, 0), (0, 0), ("", ""), ("", "")) for t, (p, q) in enumerate(prices)]


def test_markup_summary_hand_values(tmp_path):
    p1_runs = [_fake_run([(3.0, 3.0)] * 5 + [(1.5, 1.7)] * 20), _fake_run([(1.6, 1.8)] * 20)]
    p2_runs = [_fake_run([(1.4729, 1.4729)] * 20)]
    s = markup_summary({"P1": p1_runs, "P2": p2_runs}, tail=20, label="test")
    r1, r2 = s["rows"]
    assert r1.n_obs == 80
    assert r1.mean_price == pytest.approx((1.5 + 1.7 + 1.6 + 1.8) / 4)
    assert r2.rel_nash == pytest.approx(1.4729 - nash_price(), abs=1e-12)
    assert s["delta_p1_p2"] == pytest.approx(r1.mean_price - 1.4729)
    path = tmp_path / "m.csv"
    write_markup_csv(path, s)
    assert path.read_text().count("\n") == 4


def test_markup_identical_logs():
    run = [_fake_run([(1.7, 1.8)] * 20)]
    s = markup_summary({"P1": run, "P2": run})
    assert s["delta_p1_p2"] == 0.0
    with pytest.raises(ValueError):
        markup_summary({})


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(rounds=0)
    with pytest.raises(ValueError):
        RunConfig(prompt_variant="P3")
