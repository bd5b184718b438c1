"""Sequential game protocols as explicit trees.

Each protocol is described by its terminal paths. A path records, for every
move along it, whose decision it was (the agent's own strategy or the
opponent, read from beliefs), which decision point it was and which action
was taken. Path weights are then products of move probabilities times the
0.5 role factor.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np


class GameProtocol(enum.Enum):
    SPD = "SPD"
    TG = "TG"
    UG = "UG"

    @property
    def decision_points(self) -> int:
        return 3 if self is GameProtocol.SPD else 2

    @classmethod
    def parse(cls, value: "str | GameProtocol") -> "GameProtocol":
        if isinstance(value, GameProtocol):
            return value
        aliases = {
            "SPD": cls.SPD,
            "SEQUENTIALPRISONERSDILEMMA": cls.SPD,
            "TG": cls.TG,
            "TRUSTGAME": cls.TG,
            "UG": cls.UG,
            "ULTIMATUMGAME": cls.UG,
        }
        key = "".join(ch for ch in str(value).upper() if ch.isalpha())
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown game protocol: {value!r}") from None


class Role(enum.Enum):
    FIRST = "FirstMover"
    SECOND = "SecondMover"


@dataclass(frozen=True)
class PayoffTuple:
    """Monetary payoffs (T, R, P, S).

    Construction does not enforce T > R > P > S so that degenerate tuples can
    be used in property checks; see :meth:`is_admissible`.
    """

    T: float
    R: float
    P: float
    S: float

    def is_admissible(self) -> bool:
        return self.T > self.R > self.P > self.S

    def label(self, name: str) -> float:
        return getattr(self, name)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.T, self.R, self.P, self.S)

    @classmethod
    def of(cls, values: Sequence[float]) -> "PayoffTuple":
        T, R, P, S = values
        return cls(T, R, P, S)


# A move factor: (source, decision index, action). source "own" reads the
# agent's strategy vector, "opp" reads the belief (or mirrored strategy).
Factor = tuple[str, int, int]


@dataclass(frozen=True)
class TerminalPath:
    role: Role
    moves: tuple[str, ...]
    payoff_own: str
    payoff_other: str
    factors: tuple[Factor, ...]

    def __str__(self) -> str:
        return f"{self.role.value}:{'-'.join(self.moves)}->({self.payoff_own},{self.payoff_other})"


def _spd_paths() -> list[TerminalPath]:
    # x = (coop first, coop after C, coop after D)
    first = [
        (("C", "C"), "R", "R", (("own", 0, 1), ("opp", 1, 1))),
        (("C", "D"), "S", "T", (("own", 0, 1), ("opp", 1, 0))),
        (("D", "C"), "T", "S", (("own", 0, 0), ("opp", 2, 1))),
        (("D", "D"), "P", "P", (("own", 0, 0), ("opp", 2, 0))),
    ]
    second = [
        (("C", "C"), "R", "R", (("opp", 0, 1), ("own", 1, 1))),
        (("C", "D"), "T", "S", (("opp", 0, 1), ("own", 1, 0))),
        (("D", "C"), "S", "T", (("opp", 0, 0), ("own", 2, 1))),
        (("D", "D"), "P", "P", (("opp", 0, 0), ("own", 2, 0))),
    ]
    return _build(first, second)


def _tg_paths() -> list[TerminalPath]:
    # x = (invest, return)
    first = [
        (("I", "G"), "R", "R", (("own", 0, 1), ("opp", 1, 1))),
        (("I", "K"), "S", "T", (("own", 0, 1), ("opp", 1, 0))),
        (("N",), "P", "P", (("own", 0, 0),)),
    ]
    second = [
        (("I", "G"), "R", "R", (("opp", 0, 1), ("own", 1, 1))),
        (("I", "K"), "T", "S", (("opp", 0, 1), ("own", 1, 0))),
        (("N",), "P", "P", (("opp", 0, 0),)),
    ]
    return _build(first, second)


def _ug_paths() -> list[TerminalPath]:
    # x = (equal split, accept)
    first = [
        (("E",), "R", "R", (("own", 0, 1),)),
        (("U", "A"), "T", "P", (("own", 0, 0), ("opp", 1, 1))),
        (("U", "N"), "S", "S", (("own", 0, 0), ("opp", 1, 0))),
    ]
    second = [
        (("E",), "R", "R", (("opp", 0, 1),)),
        (("U", "A"), "P", "T", (("opp", 0, 0), ("own", 1, 1))),
        (("U", "N"), "S", "S", (("opp", 0, 0), ("own", 1, 0))),
    ]
    return _build(first, second)


def _build(first, second) -> list[TerminalPath]:
    paths = [TerminalPath(Role.FIRST, m, o, t, f) for m, o, t, f in first]
    paths += [TerminalPath(Role.SECOND, m, o, t, f) for m, o, t, f in second]
    return sorted(paths, key=lambda p: (p.role is Role.SECOND, p.moves))


_BUILDERS = {GameProtocol.SPD: _spd_paths, GameProtocol.TG: _tg_paths, GameProtocol.UG: _ug_paths}


@lru_cache(maxsize=None)
def _paths(protocol: GameProtocol) -> tuple[TerminalPath, ...]:
    return tuple(_BUILDERS[protocol]())


def enumerate_paths(protocol: GameProtocol) -> list[TerminalPath]:
    """All terminal paths, first-mover paths first, then lexicographic by moves."""
    return list(_paths(GameProtocol.parse(protocol)))


@lru_cache(maxsize=None)
def _pure(protocol: GameProtocol) -> tuple[tuple[int, ...], ...]:
    n = protocol.decision_points
    return tuple(itertools.product((1, 0), repeat=n))


def pure_strategies(protocol: GameProtocol) -> list[tuple[int, ...]]:
    """Pure strategies in descending lexicographic order, (1,...,1) first."""
    return list(_pure(GameProtocol.parse(protocol)))


def _check(vec: Sequence[float], protocol: GameProtocol, what: str) -> tuple[float, ...]:
    vals = tuple(float(v) for v in vec)
    if len(vals) != protocol.decision_points:
        raise ValueError(
            f"{what} has length {len(vals)}; {protocol.value} needs {protocol.decision_points}"
        )
    if not all(0.0 <= v <= 1.0 for v in vals):
        raise ValueError(f"{what} entries must be probabilities in [0, 1], got {vals}")
    return vals


def path_weight(path: TerminalPath, x: Sequence[float], y: Sequence[float]) -> float:
    w = 0.5
    for source, idx, action in path.factors:
        p = x[idx] if source == "own" else y[idx]
        w *= p if action == 1 else 1.0 - p
    return w


def eta(x: Sequence[float], y: Sequence[float], protocol: GameProtocol) -> dict[TerminalPath, float]:
    """Probability of each terminal path under strategy ``x`` and beliefs ``y``.

    The 0.5 role factor is kept: the weights form a distribution over both
    the randomized role and the moves. Dropping it rescales every utility by
    the same constant.
    """
    protocol = GameProtocol.parse(protocol)
    x = _check(x, protocol, "strategy")
    y = _check(y, protocol, "belief")
    return {p: path_weight(p, x, y) for p in _paths(protocol)}


def expected_payoffs(
    x: Sequence[float], y: Sequence[float], payoffs: PayoffTuple, protocol: GameProtocol
) -> tuple[float, float]:
    own = other = 0.0
    for path, w in eta(x, y, protocol).items():
        own += w * payoffs.label(path.payoff_own)
        other += w * payoffs.label(path.payoff_other)
    return own, other


def first_mover_expectation(
    x1: int, y: Sequence[float], payoffs: PayoffTuple, protocol: GameProtocol
) -> float:
    """Expected own payoff of first-mover action ``x1`` given beliefs about responders."""
    protocol = GameProtocol.parse(protocol)
    y = _check(y, protocol, "belief")
    total = 0.0
    for path in _paths(protocol):
        if path.role is not Role.FIRST or path.factors[0][2] != x1:
            continue
        w = 1.0
        for source, idx, action in path.factors[1:]:
            w *= y[idx] if action == 1 else 1.0 - y[idx]
        total += w * payoffs.label(path.payoff_own)
    return total


def mirror(path: TerminalPath) -> TerminalPath:
    """The same move sequence seen from the other seat."""
    for other in _paths(_protocol_of(path)):
        if other.role is not path.role and other.moves == path.moves:
            return other
    raise KeyError(path)


def _protocol_of(path: TerminalPath) -> GameProtocol:
    for protocol in GameProtocol:
        if path in _paths(protocol):
            return protocol
    raise KeyError(path)


def payoff_vectors(payoffs: PayoffTuple, protocol: GameProtocol) -> tuple[np.ndarray, np.ndarray]:
    """(own, other) payoff per path as arrays in canonical path order."""
    paths = _paths(GameProtocol.parse(protocol))
    own = np.array([payoffs.label(p.payoff_own) for p in paths], dtype=float)
    other = np.array([payoffs.label(p.payoff_other) for p in paths], dtype=float)
    return own, other


def weight_matrix(y: Sequence[float] | None, protocol: GameProtocol) -> np.ndarray:
    """Path weights for every pure strategy, shape (K, n_paths).

    With ``y=None`` each strategy is paired with itself (the mirrored
    weights used by the Kantian term).
    """
    protocol = GameProtocol.parse(protocol)
    if y is None:
        return _self_weights(protocol).copy()
    return _weights(tuple(float(v) for v in y), protocol).copy()


@lru_cache(maxsize=None)
def _self_weights(protocol: GameProtocol) -> np.ndarray:
    return _weights(None, protocol)


@lru_cache(maxsize=4096)
def _weights(y, protocol: GameProtocol) -> np.ndarray:
    strategies = _pure(protocol)
    paths = _paths(protocol)
    out = np.empty((len(strategies), len(paths)))
    for k, x in enumerate(strategies):
        beliefs = x if y is None else y
        for j, path in enumerate(paths):
            out[k, j] = path_weight(path, x, beliefs)
    return out


def as_mapping(weights: Mapping[TerminalPath, float]) -> dict[str, float]:
    return {str(p): w for p, w in weights.items()}
