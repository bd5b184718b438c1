import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from econalign.datagen import (
    DatasetExhausted,
    DatasetSpec,
    generate_dataset,
    identifiability_census,
    is_identifiable,
    render_example,
    sample_payoffs,
    validate_file,
)
from econalign.datagen.validate import (
    ValidationError,
    check_arithmetic,
    evaluate,
    round2,
    solve,
    validate_line,
)
from econalign.games import GameProtocol, PayoffTuple, pure_strategies
from econalign.preferences import Altruist, HomoEconomicus, HomoMoralis
from econalign.scenarios import FIXED_SPD_BELIEFS

import oracles

Y = FIXED_SPD_BELIEFS
admissible = st.lists(st.integers(0, 100), min_size=4, max_size=4, unique=True).map(
    lambda v: PayoffTuple(*sorted(v, reverse=True)))
generators = st.sampled_from([HomoEconomicus(), HomoMoralis(0.5), HomoMoralis(0.3)])


def _line(ex):
    return json.dumps({"messages": ex.messages()}, ensure_ascii=False)


def test_sample_payoffs_ordered_and_reproducible():
    rng = np.random.default_rng(0)
    draws = [sample_payoffs(rng) for _ in range(10_000)]
    assert all(p.is_admissible() and 0 <= p.S and p.T <= 100 for p in draws)
    again = np.random.default_rng(0)
    assert [sample_payoffs(again) for _ in range(50)] == draws[:50]


def test_worked_economicus_text(worked):
    ex = render_example(worked, HomoEconomicus(), Y)
    assert "LEFT: 0.28 × 81 + 0.72 × 34 = 47.16" in ex.assistant_text
    assert "RIGHT: 0.11 × 90 + 0.89 × 38 = 43.72" in ex.assistant_text
    assert ex.assistant_text.endswith('Answer (in format "X|Y|Z"): 1|0|0')
    assert ex.answer == (1, 0, 0)
    assert "T=90, R=81, P=38, S=34" in ex.assistant_text


def test_worked_moralis_text(worked):
    ex = render_example(worked, HomoMoralis(0.5), Y)
    assert ex.answer == (1, 1, 0)
    for shown in ("= 17.52 ≥ 0", "= -1.34 ≥ 0", "= 44.72 ≥ 0"):
        assert shown in ex.assistant_text
    assert "weight of 0.5" in ex.system_text
    assert ex.assistant_text.endswith("1|1|0")
    facts, n = validate_line(_line(ex))
    assert facts.kappa == Fraction(1, 2) and n > 20


def test_cues_toggle(worked):
    with_cue = render_example(worked, HomoEconomicus(), Y, identity_cues=True)
    without = render_example(worked, HomoEconomicus(), Y, identity_cues=False)
    assert with_cue.user_text != without.user_text
    assert with_cue.answer == without.answer


def test_render_rejects_other_types(worked):
    with pytest.raises((TypeError, ValueError)):
        render_example(worked, Altruist(), Y)


@given(admissible, generators)
def test_render_then_validate(pay, agent):
    ex = render_example(pay, agent, Y)
    facts, _ = validate_line(_line(ex))
    assert facts.answer == ex.answer
    assert facts.payoffs == pay.as_tuple()


@given(admissible, generators)
def test_independent_solver_agrees_with_enumeration(pay, agent):
    k = getattr(agent, "kappa", 0.0)
    vals = {s: oracles.general("SPD", s, Y, pay.as_tuple(), 0, 0, k) for s in pure_strategies(GameProtocol.SPD)}
    beliefs = tuple(Fraction(str(b)) for b in Y)
    kappa = None if isinstance(agent, HomoEconomicus) else Fraction(str(k))
    assert solve(*pay.as_tuple(), beliefs, kappa) == oracles.best("SPD", vals)


def test_evaluator_and_rounding():
    assert evaluate("0.28 × 81 + 0.72 × 34") == Fraction(4716, 100)
    assert evaluate("(1 - 0.5) × (2 - 3)") == Fraction(-1, 2)
    assert round2(Fraction(1, 8)) == "0.13"
    assert round2(Fraction(-1, 8)) == "-0.13"
    assert round2(Fraction(-1, 1000)) == "-0.00"


def test_arithmetic_checker_catches_errors():
    assert check_arithmetic("x: 0.28 × 81 + 0.72 × 34 = 47.16") == 1
    with pytest.raises(ValidationError):
        check_arithmetic("x: 0.28 × 81 + 0.72 × 34 = 47.17")
    with pytest.raises(ValidationError):
        check_arithmetic("choose SOUTH, because 90 < 81")


def test_validator_rejects_tampered_answer(worked, tmp_path):
    ex = render_example(worked, HomoEconomicus(), Y)
    bad = _line(ex).replace("1|0|0", "1|1|0")
    with pytest.raises(ValidationError):
        validate_line(bad)
    path = tmp_path / "bad.jsonl"
    path.write_text(_line(ex) + "\n" + _line(ex) + "\n", encoding="utf-8")
    report = validate_file(path)
    assert not report.ok and "duplicate" in report.errors[0]


def test_validator_rejects_schema(worked):
    msgs = render_example(worked, HomoEconomicus(), Y).messages()
    with pytest.raises(ValidationError):
        validate_line(json.dumps({"messages": msgs[::-1]}))
    with pytest.raises(ValidationError):
        validate_line(json.dumps({"messages": msgs, "extra": 1}))


def test_identifiable_worked(worked):
    # economicus plays (1,0,0), moralis (1,1,0)
    assert is_identifiable(worked, HomoEconomicus(), [HomoMoralis(0.5)])
    assert not is_identifiable(worked, HomoEconomicus(), [HomoEconomicus()])


def test_universal_tie_not_identifiable():
    flat = PayoffTuple(5, 5, 5, 5)
    assert not is_identifiable(flat, HomoEconomicus())
    assert not is_identifiable(flat, HomoMoralis())


def test_identifiability_census_frozen():
    # regression statistics, recorded at first run (10,000 draws, seed 0)
    assert identifiability_census(HomoEconomicus(), 10_000, seed=0) == pytest.approx(0.1045)
    assert identifiability_census(HomoMoralis(0.5), 10_000, seed=0) == pytest.approx(0.7371)


@pytest.mark.parametrize("agent", [HomoEconomicus(), HomoMoralis(0.5)])
def test_dataset_contract(agent, tmp_path):
    ds = generate_dataset(DatasetSpec(agent=agent, n_examples=60, seed=1))
    assert len(ds.lines) == 60
    assert ds.n_identifiable >= 48
    assert len({r.payoffs for r in ds.records}) == 60
    path = tmp_path / "d.jsonl"
    ds.write(path)
    report = validate_file(path)
    assert report.ok, report.errors[:3]
    meta = json.loads((tmp_path / "d.meta.json").read_text(encoding="utf-8"))
    assert meta["n_identifiable"] == ds.n_identifiable and meta["seed"] == 1


def test_dataset_deterministic(tmp_path):
    spec = DatasetSpec(agent=HomoMoralis(0.5), n_examples=25, seed=7)
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    generate_dataset(spec).write(a)
    generate_dataset(spec).write(b)
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.jsonl"
    generate_dataset(DatasetSpec(agent=HomoMoralis(0.5), n_examples=25, seed=8)).write(c)
    assert c.read_bytes() != a.read_bytes()


def test_single_example():
    ds = generate_dataset(DatasetSpec(n_examples=1))
    assert len(ds.lines) == 1
    assert ds.n_identifiable == 1
    validate_line(ds.lines[0])


def test_exhaustion_reported():
    with pytest.raises(DatasetExhausted):
        generate_dataset(DatasetSpec(n_examples=50, max_draws=20))


def test_spec_validation():
    with pytest.raises(ValueError):
        DatasetSpec(n_examples=0)
    with pytest.raises(ValueError):
        DatasetSpec(identifiable_fraction=1.5)
    assert DatasetSpec().n_identifiable == 320
    assert DatasetSpec(n_examples=7).n_identifiable == 6
