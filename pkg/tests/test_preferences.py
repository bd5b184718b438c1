import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from econalign.games import GameProtocol, PayoffTuple, expected_payoffs, pure_strategies
from econalign.preferences import (
    Altruist,
    ChoiceScale,
    General,
    HomoEconomicus,
    HomoMoralis,
    InequityAverse,
    PreferenceParams,
    best_response,
    choice_probabilities,
    parse_agent,
    pure_utilities,
    softmax,
    utility,
    utility_alternative,
    utility_econ,
    utility_general,
    utility_kant,
)

import oracles

SPD, TG, UG = GameProtocol.SPD, GameProtocol.TG, GameProtocol.UG
Y = (0.33, 0.28, 0.11)
ROW1 = PayoffTuple(90, 45, 15, 10)

unit = st.floats(0.0, 1.0, allow_nan=False)
payoff_tuples = st.lists(st.integers(0, 100), min_size=4, max_size=4, unique=True).map(
    lambda v: PayoffTuple(*sorted(v, reverse=True)))
weights = st.floats(-1.0, 1.0, allow_nan=False)
kappas = st.floats(0.0, 0.99, allow_nan=False)


@st.composite
def instance(draw):
    proto = draw(st.sampled_from(list(GameProtocol)))
    n = proto.decision_points
    return proto, draw(st.tuples(*[unit] * n)), draw(st.tuples(*[unit] * n)), draw(payoff_tuples)


def test_econ_worked(worked):
    assert utility_econ((1, 0, 0), Y, worked, SPD) == pytest.approx(51.16, abs=1e-9)


def test_econ_all_defect_gets_p(worked):
    assert utility_econ((0, 0, 0), (0, 0, 0), worked, SPD) == pytest.approx(worked.P)


def test_general_row1_against_enumeration():
    theta = PreferenceParams(0.16, 0.24, 0.10)
    want = oracles.general("SPD", (1, 1, 0), Y, ROW1.as_tuple(), 0.16, 0.24, 0.10)
    assert utility_general((1, 1, 0), Y, ROW1, SPD, theta) == pytest.approx(want, abs=1e-12)
    # frozen from the enumeration above
    assert want == pytest.approx(20.007, abs=1e-12)


def test_kant_worked_against_enumeration(worked):
    want = oracles.general("SPD", (1, 1, 0), Y, worked.as_tuple(), 0, 0, 0.5)
    assert utility_kant((1, 1, 0), Y, 0.5, worked, SPD) == pytest.approx(want, abs=1e-12)
    assert want == pytest.approx(65.3375, abs=1e-12)


def test_kant_near_one_is_r(worked):
    assert utility_kant((1, 1, 1), Y, 1 - 1e-12, worked, SPD) == pytest.approx(worked.R, abs=1e-6)


def test_kappa_bounds(worked):
    for bad in (-0.1, 1.0):
        with pytest.raises(ValueError):
            utility_kant((1, 1, 0), Y, bad, worked, SPD)
        with pytest.raises(ValueError):
            HomoMoralis(bad)
    assert HomoMoralis().kappa == 0.5


def test_inequity_row1_against_enumeration():
    want = oracles.general("SPD", (1, 0, 0), Y, ROW1.as_tuple(), 0.16, 0.24, 0.0)
    got = utility_alternative(InequityAverse(0.16, 0.24), (1, 0, 0), Y, ROW1, SPD)
    assert got == pytest.approx(want, abs=1e-12)


def test_altruist_on_symmetric_payoffs():
    flat = PayoffTuple(5, 5, 5, 5)
    assert utility_alternative(Altruist(), (1, 0, 1), Y, flat, SPD) == utility_econ((1, 0, 1), Y, flat, SPD)


@given(instance())
def test_reductions_exact(inst):
    proto, x, y, pay = inst
    econ = utility_econ(x, y, pay, proto)
    assert utility_kant(x, y, 0.0, pay, proto) == econ
    assert utility_general(x, y, pay, proto, PreferenceParams()) == econ
    assert utility_alternative(InequityAverse(0, 0), x, y, pay, proto) == econ


@given(instance(), weights, weights, kappas)
def test_general_matches_enumeration(inst, a, b, k):
    proto, x, y, pay = inst
    want = oracles.general(proto.value, x, y, pay.as_tuple(), a, b, k)
    got = utility_general(x, y, pay, proto, PreferenceParams(a, b, k))
    assert got == pytest.approx(want, abs=1e-9)


@given(instance(), kappas)
def test_general_kappa_only_is_kant(inst, k):
    proto, x, y, pay = inst
    assert utility_general(x, y, pay, proto, PreferenceParams(0, 0, k)) == pytest.approx(
        utility_kant(x, y, k, pay, proto), abs=1e-12)


@given(instance())
def test_altruist_is_other_payoff(inst):
    proto, x, y, pay = inst
    assert utility_alternative(Altruist(), x, y, pay, proto) == pytest.approx(
        expected_payoffs(x, y, pay, proto)[1], abs=1e-12)


def test_worked_best_responses(worked):
    assert best_response(HomoEconomicus(), worked, SPD, Y) == (1, 0, 0)
    assert best_response(HomoMoralis(0.5), worked, SPD, Y) == (1, 1, 0)


def test_moralis_small_temptation():
    # T = R + 1, P = S + 1: the enumeration gives conditional cooperation, the
    # moral term for the after-defection reply is zero once X = 1
    pay = PayoffTuple(61, 60, 21, 20)
    vals = {s: oracles.general("SPD", s, Y, pay.as_tuple(), 0, 0, 0.5) for s in pure_strategies(SPD)}
    assert oracles.best("SPD", vals) == (1, 1, 0)
    assert best_response(HomoMoralis(0.5), pay, SPD, Y) == (1, 1, 0)


def test_tie_rule_prefers_ones():
    flat = PayoffTuple(5, 5, 5, 5)
    assert best_response(HomoEconomicus(), flat, SPD, Y) == (1, 1, 1)
    assert best_response(HomoEconomicus(), flat, TG, (0.5, 0.5)) == (1, 1)


AGENTS = [HomoEconomicus(), HomoMoralis(0.5), HomoMoralis(0.2), Altruist(), InequityAverse(0.16, 0.24),
          General(PreferenceParams(-0.1, 0.3, 0.2))]


def _oracle_value(agent, proto, s, y, pay):
    t = pay.as_tuple()
    if isinstance(agent, HomoEconomicus):
        return oracles.general(proto, s, y, t, 0, 0, 0)
    if isinstance(agent, HomoMoralis):
        return oracles.general(proto, s, y, t, 0, 0, agent.kappa)
    if isinstance(agent, Altruist):
        return oracles.other(proto, s, y, t)
    if isinstance(agent, InequityAverse):
        return oracles.general(proto, s, y, t, agent.alpha, agent.beta, 0)
    th = agent.theta
    return oracles.general(proto, s, y, t, th.alpha, th.beta, th.kappa)


@given(instance(), st.sampled_from(AGENTS))
def test_best_response_matches_naive_enumeration(inst, agent):
    proto, _, y, pay = inst
    vals = {s: _oracle_value(agent, proto.value, s, y, pay) for s in itertools.product((1, 0), repeat=len(y))}
    assert best_response(agent, pay, proto, y) == oracles.best(proto.value, vals)


@given(instance(), st.sampled_from(AGENTS), st.floats(0.1, 10), st.floats(-50, 50))
def test_best_response_affine_invariant(inst, agent, a, b):
    proto, _, y, pay = inst
    moved = PayoffTuple(*(a * v + b for v in pay.as_tuple()))
    assert best_response(agent, moved, proto, y) == best_response(agent, pay, proto, y)


@given(instance(), st.sampled_from(AGENTS))
def test_vectorised_matches_scalar(inst, agent):
    proto, _, y, pay = inst
    vec = pure_utilities(agent, pay, proto, y)
    scal = [utility(agent, s, y, pay, proto) for s in pure_strategies(proto)]
    assert np.allclose(vec, scal, atol=1e-9)


@given(st.lists(st.floats(-100, 100), min_size=2, max_size=8), st.floats(0.1, 20), st.floats(-1e3, 1e3))
def test_softmax_shift_invariant(vals, lam, c):
    v = np.array(vals)
    assert np.allclose(softmax(v, lam), softmax(v + c, lam), atol=1e-12)


def test_softmax_limits_and_overflow(worked):
    th = PreferenceParams()
    p = choice_probabilities(Y, worked, SPD, th, 1e6)
    assert np.allclose(p, 1 / 8, atol=1e-4)
    p = choice_probabilities(Y, worked, SPD, th, ChoiceScale(1e-6))
    assert p.max() >= 1 - 1e-6
    assert np.isfinite(softmax(np.array([1e4, 0.0]), 1e-3)).all()
    assert choice_probabilities(Y, worked, SPD, th, 1.7).sum() == pytest.approx(1.0, abs=1e-12)


def test_equal_utilities_equal_mass():
    p = choice_probabilities((0.5, 0.5), PayoffTuple(5, 5, 5, 5), TG, PreferenceParams(0.1, 0.1, 0.1), 2.0)
    assert np.allclose(p, 0.25)


def test_choice_scale_positive():
    with pytest.raises(ValueError):
        ChoiceScale(0.0)


def test_parse_agent():
    assert parse_agent("economicus") == HomoEconomicus()
    assert parse_agent("moralis:0.3") == HomoMoralis(0.3)
    assert parse_agent("inequity:0.16,0.24") == InequityAverse(0.16, 0.24)
    assert parse_agent("general:0.1,0.2,0.3") == General(PreferenceParams(0.1, 0.2, 0.3))
    with pytest.raises(ValueError):
        parse_agent("stoic")
