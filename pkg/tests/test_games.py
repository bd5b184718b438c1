import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from econalign.games import (
    GameProtocol,
    PayoffTuple,
    Role,
    enumerate_paths,
    eta,
    expected_payoffs,
    first_mover_expectation,
    mirror,
    pure_strategies,
    weight_matrix,
)

from oracles import own

unit = st.floats(0.0, 1.0, allow_nan=False)
protocols = st.sampled_from(list(GameProtocol))
payoff_tuples = st.lists(st.integers(0, 100), min_size=4, max_size=4, unique=True).map(
    lambda v: PayoffTuple(*sorted(v, reverse=True)))


@st.composite
def game_draw(draw):
    proto = draw(protocols)
    n = proto.decision_points
    return proto, draw(st.tuples(*[unit] * n)), draw(st.tuples(*[unit] * n))


def test_decision_points():
    assert [p.decision_points for p in GameProtocol] == [3, 2, 2]
    assert GameProtocol.parse("spd") is GameProtocol.SPD


@pytest.mark.parametrize("proto, n_paths", [(GameProtocol.SPD, 8), (GameProtocol.TG, 6), (GameProtocol.UG, 6)])
def test_path_counts(proto, n_paths):
    paths = enumerate_paths(proto)
    assert len(paths) == n_paths
    assert sum(p.role is Role.FIRST for p in paths) == n_paths // 2


def test_pure_strategy_order():
    assert pure_strategies(GameProtocol.SPD)[0] == (1, 1, 1)
    assert pure_strategies(GameProtocol.SPD)[-1] == (0, 0, 0)
    assert pure_strategies(GameProtocol.TG) == [(1, 1), (1, 0), (0, 1), (0, 0)]


def test_eta_worked_value():
    w = eta((1, 1, 0), (0.7, 0.9, 0.3), GameProtocol.SPD)
    coop_defect = next(p for p in w if p.role is Role.FIRST and p.moves == ("C", "D"))
    assert w[coop_defect] == pytest.approx(0.05, abs=1e-12)


@given(game_draw())
def test_eta_is_distribution(draw):
    proto, x, y = draw
    w = eta(x, y, proto)
    assert all(v >= 0 for v in w.values())
    assert math.fsum(w.values()) == pytest.approx(1.0, abs=1e-12)
    first = math.fsum(v for p, v in w.items() if p.role is Role.FIRST)
    assert first == pytest.approx(0.5, abs=1e-12)


@given(game_draw(), payoff_tuples)
def test_expected_payoff_matches_closed_form(draw, payoffs):
    proto, x, y = draw
    mine, _ = expected_payoffs(x, y, payoffs, proto)
    assert mine == pytest.approx(own(proto.value, x, y, payoffs.as_tuple()), abs=1e-9)


@given(game_draw(), payoff_tuples)
def test_payoff_symmetry(draw, payoffs):
    # my payoff against y equals the opponent's payoff when roles are swapped
    proto, x, y = draw
    mine, _ = expected_payoffs(x, y, payoffs, proto)
    _, theirs = expected_payoffs(y, x, payoffs, proto)
    assert mine == pytest.approx(theirs, abs=1e-9)


def test_mirror_is_involution():
    for proto in GameProtocol:
        for p in enumerate_paths(proto):
            assert mirror(mirror(p)) == p
            assert mirror(p).role is not p.role


@pytest.mark.parametrize("proto", list(GameProtocol))
def test_weight_matrix_rows(proto):
    y = [0.3] * proto.decision_points
    wm = weight_matrix(y, proto)
    assert wm.shape == (len(pure_strategies(proto)), len(enumerate_paths(proto)))
    assert np.allclose(wm.sum(axis=1), 1.0)
    # a cached matrix handed out must not be shared
    wm[:] = 0
    assert np.allclose(weight_matrix(y, proto).sum(axis=1), 1.0)


def test_first_mover_expectation_worked(worked):
    y = (0.33, 0.28, 0.11)
    assert first_mover_expectation(1, y, worked, GameProtocol.SPD) == pytest.approx(47.16, abs=1e-9)
    assert first_mover_expectation(0, y, worked, GameProtocol.SPD) == pytest.approx(43.72, abs=1e-9)


def test_rejects_bad_vectors(worked):
    with pytest.raises(ValueError):
        eta((1, 0), (0.5, 0.5, 0.5), GameProtocol.SPD)
    with pytest.raises(ValueError):
        eta((1, 0, 1), (0.5, 1.5, 0.5), GameProtocol.SPD)


def test_admissibility():
    assert PayoffTuple(4, 3, 2, 1).is_admissible()
    assert not PayoffTuple(3, 4, 2, 1).is_admissible()


def test_pure_strategies_cover_product():
    for proto in GameProtocol:
        assert sorted(pure_strategies(proto)) == sorted(itertools.product((0, 1), repeat=proto.decision_points))
