"""Utility functions over sequential-game strategies, best responses and logit choice."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .games import (
    GameProtocol,
    PayoffTuple,
    eta,
    payoff_vectors,
    pure_strategies,
    weight_matrix,
)

# Utilities closer than this are treated as tied.
TIE_TOL = 1e-9


@dataclass(frozen=True)
class PreferenceParams:
    alpha: float = 0.0  # envy
    beta: float = 0.0  # guilt
    kappa: float = 0.0  # Kantian weight

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.kappa])


@dataclass(frozen=True)
class ChoiceScale:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"choice scale must be positive, got {self.lam}")


# --- agent types -------------------------------------------------------------


@dataclass(frozen=True)
class HomoEconomicus:
    name = "economicus"


@dataclass(frozen=True)
class HomoMoralis:
    kappa: float = 0.5
    name = "moralis"

    def __post_init__(self):
        _check_kappa(self.kappa)


@dataclass(frozen=True)
class General:
    theta: PreferenceParams
    name = "general"


@dataclass(frozen=True)
class Altruist:
    """Cares only about the other player's expected payoff."""

    name = "altruist"


@dataclass(frozen=True)
class InequityAverse:
    alpha: float
    beta: float
    name = "inequity_averse"


AgentType = HomoEconomicus | HomoMoralis | General | Altruist | InequityAverse


def _check_kappa(kappa: float) -> None:
    if not 0.0 <= kappa < 1.0:
        raise ValueError(f"kappa must lie in [0, 1), got {kappa}")


# --- scalar utilities (any behavioural strategy) -----------------------------


def _sums(x, y, payoffs: PayoffTuple, protocol):
    own = other = envy = guilt = 0.0
    for path, w in eta(x, y, protocol).items():
        po, pt = payoffs.label(path.payoff_own), payoffs.label(path.payoff_other)
        own += w * po
        other += w * pt
        envy += w * max(0.0, pt - po)
        guilt += w * max(0.0, po - pt)
    return own, other, envy, guilt


def utility_econ(x, y, payoffs: PayoffTuple, protocol: GameProtocol) -> float:
    return _sums(x, y, payoffs, protocol)[0]


def utility_kant(x, y, kappa: float, payoffs: PayoffTuple, protocol: GameProtocol) -> float:
    _check_kappa(kappa)
    own = utility_econ(x, y, payoffs, protocol)
    if kappa == 0.0:
        return own
    moral = utility_econ(x, x, payoffs, protocol)
    return (1.0 - kappa) * own + kappa * moral


def utility_general(
    x, y, payoffs: PayoffTuple, protocol: GameProtocol, theta: PreferenceParams
) -> float:
    own, _, envy, guilt = _sums(x, y, payoffs, protocol)
    if theta.kappa == 0.0:
        value = own
    else:
        moral = utility_econ(x, x, payoffs, protocol)
        value = (1.0 - theta.kappa) * own + theta.kappa * moral
    return value - theta.alpha * envy - theta.beta * guilt


def utility_alternative(agent, x, y, payoffs: PayoffTuple, protocol: GameProtocol) -> float:
    own, other, envy, guilt = _sums(x, y, payoffs, protocol)
    if isinstance(agent, Altruist):
        return other
    if isinstance(agent, InequityAverse):
        return own - agent.alpha * envy - agent.beta * guilt
    raise TypeError(f"not an alternative preference type: {agent!r}")


def utility(agent: AgentType, x, y, payoffs: PayoffTuple, protocol: GameProtocol) -> float:
    """Dispatch to the utility of ``agent``."""
    if isinstance(agent, HomoEconomicus):
        return utility_econ(x, y, payoffs, protocol)
    if isinstance(agent, HomoMoralis):
        return utility_kant(x, y, agent.kappa, payoffs, protocol)
    if isinstance(agent, General):
        return utility_general(x, y, payoffs, protocol, agent.theta)
    return utility_alternative(agent, x, y, payoffs, protocol)


# --- vectorised evaluation over the pure-strategy set -------------------------


def strategy_features(y: Sequence[float], payoffs: PayoffTuple, protocol: GameProtocol) -> np.ndarray:
    """Per pure strategy: [own, mirrored own, envy, guilt, other] expectations.

    Shape (K, 5), rows in :func:`pure_strategies` order. The general
    utility is linear in these columns.
    """
    protocol = GameProtocol.parse(protocol)
    own, other = payoff_vectors(payoffs, protocol)
    wy = weight_matrix(y, protocol)
    wx = weight_matrix(None, protocol)
    return np.column_stack(
        [
            wy @ own,
            wx @ own,
            wy @ np.maximum(0.0, other - own),
            wy @ np.maximum(0.0, own - other),
            wy @ other,
        ]
    )


def utilities_from_features(agent: AgentType, feats: np.ndarray) -> np.ndarray:
    own, moral, envy, guilt, other = feats.T
    if isinstance(agent, HomoEconomicus):
        return own
    if isinstance(agent, HomoMoralis):
        return (1.0 - agent.kappa) * own + agent.kappa * moral
    if isinstance(agent, General):
        t = agent.theta
        return (1.0 - t.kappa) * own + t.kappa * moral - t.alpha * envy - t.beta * guilt
    if isinstance(agent, Altruist):
        return other
    if isinstance(agent, InequityAverse):
        return own - agent.alpha * envy - agent.beta * guilt
    raise TypeError(f"unknown agent type: {agent!r}")


def pure_utilities(agent: AgentType, payoffs: PayoffTuple, protocol: GameProtocol, beliefs) -> np.ndarray:
    return utilities_from_features(agent, strategy_features(beliefs, payoffs, protocol))


def select_best(strategies: Sequence[tuple[int, ...]], values: Sequence[float]) -> tuple[int, ...]:
    """Argmax with the tie rule: more 1-entries first, then descending lexicographic."""
    best = max(values)
    tied = [s for s, v in zip(strategies, values) if v >= best - TIE_TOL]
    return max(tied, key=lambda s: (sum(s), s))


def best_response(
    agent: AgentType, payoffs: PayoffTuple, protocol: GameProtocol, beliefs: Sequence[float]
) -> tuple[int, ...]:
    protocol = GameProtocol.parse(protocol)
    values = pure_utilities(agent, payoffs, protocol, beliefs)
    return select_best(pure_strategies(protocol), list(values))


def softmax(values: np.ndarray, lam: float) -> np.ndarray:
    z = np.asarray(values, dtype=float) / lam
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def choice_probabilities(
    y: Sequence[float],
    payoffs: PayoffTuple,
    protocol: GameProtocol,
    theta: PreferenceParams,
    scale: ChoiceScale | float,
) -> np.ndarray:
    """Logit probabilities over :func:`pure_strategies` (same order)."""
    lam = scale.lam if isinstance(scale, ChoiceScale) else ChoiceScale(float(scale)).lam
    return softmax(pure_utilities(General(theta), payoffs, protocol, y), lam)


def parse_agent(spec: str) -> AgentType:
    """Parse CLI-style agent names: ``economicus``, ``moralis[:kappa]``,
    ``altruist``, ``inequity:alpha,beta``, ``general:alpha,beta,kappa``."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name in ("economicus", "econ", "rational", "homo_economicus"):
        return HomoEconomicus()
    if name in ("moralis", "moral", "kant", "homo_moralis"):
        return HomoMoralis(float(arg)) if arg else HomoMoralis()
    if name == "altruist":
        return Altruist()
    if name in ("inequity", "inequity_averse"):
        a, b = (float(v) for v in arg.split(","))
        return InequityAverse(a, b)
    if name == "general":
        a, b, k = (float(v) for v in arg.split(","))
        return General(PreferenceParams(a, b, k))
    raise ValueError(f"unknown agent type: {spec!r}")
