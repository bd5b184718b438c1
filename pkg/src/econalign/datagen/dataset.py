"""Payoff sampling, identifiability filtering and JSONL dataset assembly."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..games import GameProtocol, PayoffTuple
from ..preferences import (
    AgentType,
    Altruist,
    HomoEconomicus,
    HomoMoralis,
    InequityAverse,
    best_response,
)
from ..scenarios import FIXED_SPD_BELIEFS
from .render import render_example

SPD = GameProtocol.SPD

# Comparison types beyond the other target: the fitted human (envy, guilt)
# pair plus a strong symmetric and a behindness-only variant.
COMPARISON_TYPES: tuple[AgentType, ...] = (
    Altruist(),
    InequityAverse(0.16, 0.24),
    InequityAverse(0.5, 0.5),
    InequityAverse(0.5, 0.0),
)


class DatasetExhausted(RuntimeError):
    pass


def sample_payoffs(rng: np.random.Generator) -> PayoffTuple:
    """Four distinct integers in [0, 100], largest first as (T, R, P, S)."""
    t, r, p, s = sorted((int(v) for v in rng.choice(101, size=4, replace=False)), reverse=True)
    return PayoffTuple(t, r, p, s)


def default_alternatives(target: AgentType) -> list[AgentType]:
    if isinstance(target, HomoEconomicus):
        other: AgentType = HomoMoralis(0.5)
    elif isinstance(target, HomoMoralis):
        other = HomoEconomicus()
    else:
        raise ValueError(f"target must be economicus or moralis, got {target!r}")
    return [other, *COMPARISON_TYPES]


def is_identifiable(payoffs: PayoffTuple, target: AgentType, alternatives: Sequence[AgentType] | None = None,
                    beliefs: Sequence[float] = FIXED_SPD_BELIEFS) -> bool:
    if alternatives is None:
        alternatives = default_alternatives(target)
    mine = best_response(target, payoffs, SPD, beliefs)
    return all(best_response(a, payoffs, SPD, beliefs) != mine for a in alternatives)


def parse_generator_agent(name: str) -> AgentType:
    key, _, arg = name.strip().lower().partition(":")
    if key in ("economicus", "econ", "rational", "homo_economicus"):
        return HomoEconomicus()
    if key in ("moralis", "moral", "homo_moralis"):
        return HomoMoralis(float(arg)) if arg else HomoMoralis()
    raise ValueError(f"datasets exist only for economicus and moralis, not {name!r}")


@dataclass(frozen=True)
class DatasetSpec:
    agent: AgentType = field(default_factory=HomoEconomicus)
    n_examples: int = 400
    identifiable_fraction: float = 0.8
    beliefs: tuple[float, float, float] = FIXED_SPD_BELIEFS
    seed: int = 0
    identity_cues: bool = True
    max_draws: int = 1_000_000

    def __post_init__(self):
        if self.n_examples < 1:
            raise ValueError("n_examples must be >= 1")
        if not 0.0 <= self.identifiable_fraction <= 1.0:
            raise ValueError("identifiable_fraction must lie in [0, 1]")

    @property
    def n_identifiable(self) -> int:
        # guard against 0.8 * 400 = 320.00000000000006
        return math.ceil(round(self.identifiable_fraction * self.n_examples, 9))


@dataclass
class DatasetRecord:
    payoffs: tuple[int, int, int, int]
    answer: tuple[int, ...]
    identifiable: bool
    source: str  # "filtered" or "eligible"


@dataclass
class Dataset:
    spec: DatasetSpec
    lines: list[str]
    records: list[DatasetRecord]
    draws: int

    @property
    def n_identifiable(self) -> int:
        return sum(r.identifiable for r in self.records)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in self.lines:
                fh.write(line + "\n")
        meta = path.with_name(path.stem + ".meta.json")
        meta.write_text(json.dumps(self.meta(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        return meta

    def meta(self) -> dict:
        agent = self.spec.agent
        return {
            "agent": agent.name,
            "kappa": getattr(agent, "kappa", None),
            "n_examples": self.spec.n_examples,
            "identifiable_fraction": self.spec.identifiable_fraction,
            "beliefs": list(self.spec.beliefs),
            "seed": self.spec.seed,
            "identity_cues": self.spec.identity_cues,
            "draws": self.draws,
            "n_identifiable": self.n_identifiable,
            "records": [asdict(r) for r in self.records],
        }


def generate_dataset(spec: DatasetSpec) -> Dataset:
    """Draw distinct tuples until the filtered quota is met, then top up from all tuples.

    Draws come from a single seeded stream, so the output is a pure function
    of ``spec``; the final order is a seeded shuffle of the selection.
    """
    rng = np.random.default_rng(spec.seed)
    need_id = spec.n_identifiable
    seen: set[tuple] = set()
    filtered: list[tuple[PayoffTuple, bool]] = []
    eligible: list[tuple[PayoffTuple, bool]] = []
    draws = 0
    alternatives = default_alternatives(spec.agent)
    while len(filtered) < need_id or len(filtered) + len(eligible) < spec.n_examples:
        if draws >= spec.max_draws:
            raise DatasetExhausted(
                f"only {len(filtered)} of {need_id} identifiable tuples after {draws} draws")
        draws += 1
        p = sample_payoffs(rng)
        key = p.as_tuple()
        if key in seen:
            continue
        seen.add(key)
        ident = is_identifiable(p, spec.agent, alternatives, spec.beliefs)
        if len(filtered) < need_id:
            if ident:
                filtered.append((p, True))
            continue
        eligible.append((p, ident))
    chosen = [(p, i, "filtered") for p, i in filtered] + [(p, i, "eligible") for p, i in eligible]
    order = rng.permutation(len(chosen))
    lines, records = [], []
    for j in order:
        p, ident, source = chosen[int(j)]
        ex = render_example(p, spec.agent, spec.beliefs, spec.identity_cues)
        lines.append(json.dumps({"messages": ex.messages()}, ensure_ascii=False))
        records.append(DatasetRecord(p.as_tuple(), ex.answer, ident, source))
    return Dataset(spec, lines, records, draws)


def identifiability_census(target: AgentType, draws: int = 10_000, seed: int = 0,
                           beliefs: Sequence[float] = FIXED_SPD_BELIEFS) -> float:
    """Share of random admissible tuples (with repeats) that pass the filter."""
    rng = np.random.default_rng(seed)
    alternatives = default_alternatives(target)
    hits = sum(is_identifiable(sample_payoffs(rng), target, alternatives, beliefs) for _ in range(draws))
    return hits / draws
