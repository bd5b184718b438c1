"""Deterministic agents that honour the same contract as the remote client."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..games import GameProtocol, PayoffTuple
from ..preferences import AgentType, HomoEconomicus, best_response
from ..pricing import DemandParams, best_response_price
from ..scenarios import HUMAN_AVERAGE_BELIEFS
from .base import AgentRequest
from .parsing import GameResponse, PricingDecision, format_game_response


OPENING_PRICE = 2.0


def _require(request: AgentRequest, task: str) -> None:
    if request.task != task:
        raise ValueError(f"this scripted agent only answers {task!r} requests, got {request.task!r}")


class _PricingAgent:
    concurrency_limit = 8
    label = "scripted"

    def price(self, ctx) -> float:
        raise NotImplementedError

    def respond(self, request: AgentRequest) -> str:
        _require(request, "pricing")
        ctx = request.context
        p = self.price(ctx)
        return PricingDecision(
            observations=f"round {ctx.round_index}",
            new_plans=f"{self.label} pricing",
            new_insights=ctx.insights,
            chosen_price=p,
        ).to_json()


@dataclass
class ConstantPrice(_PricingAgent):
    p: float
    label = "constant"

    def price(self, ctx) -> float:
        return self.p


@dataclass
class MyopicBestResponse(_PricingAgent):
    """Best-responds to the competitor's previous price."""

    params: DemandParams = field(default_factory=DemandParams)
    start: float = OPENING_PRICE
    label = "myopic best-response"

    def price(self, ctx) -> float:
        if not ctx.history:
            return self.start
        return best_response_price(ctx.history[-1].competitor_price, self.params, firm=ctx.firm)


@dataclass
class UndercutByDelta(_PricingAgent):
    """Prices ``d`` below the competitor's previous price.

    Round 1 uses ``initial`` when given, otherwise ``d`` below the 2.0
    opening price the other scripted agents use.
    """

    d: float
    initial: float | None = None
    label = "undercut"

    def price(self, ctx) -> float:
        if not ctx.history:
            return OPENING_PRICE - self.d if self.initial is None else self.initial
        return ctx.history[-1].competitor_price - self.d


@dataclass
class OptimalGamePlayer:
    """Answers game prompts with the exact best response to fixed beliefs.

    Reported guesses are the beliefs themselves, as integer percentages.
    Without explicit beliefs the human averages of the protocol are used.
    """

    agent_type: AgentType = field(default_factory=HomoEconomicus)
    beliefs: dict[GameProtocol, Sequence[float]] | None = None
    concurrency_limit = 8

    def beliefs_for(self, protocol: GameProtocol) -> tuple[float, ...]:
        if self.beliefs and protocol in self.beliefs:
            return tuple(self.beliefs[protocol])
        return tuple(HUMAN_AVERAGE_BELIEFS[protocol])

    def answer(self, payoffs: PayoffTuple, protocol: GameProtocol) -> str:
        protocol = GameProtocol.parse(protocol)
        y = self.beliefs_for(protocol)
        x = best_response(self.agent_type, payoffs, protocol, y)
        return format_game_response(GameResponse(x, y))

    def respond(self, request: AgentRequest) -> str:
        _require(request, "game")
        scenario = request.context
        return self.answer(scenario.payoffs, scenario.protocol)


@dataclass
class FixedText:
    """Returns the same text for every request, whatever the task."""

    text: str
    concurrency_limit = 8

    def respond(self, request: AgentRequest) -> str:
        return self.text


@dataclass
class CallableAgent:
    fn: Callable[[AgentRequest], str]
    concurrency_limit: int = 1

    def respond(self, request: AgentRequest) -> str:
        return self.fn(request)
