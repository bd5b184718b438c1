"""Logit-demand duopoly: demand, benchmarks and the repeated pricing loop."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

log = logging.getLogger(__name__)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SEARCH_UPPER = 10.0


@dataclass(frozen=True)
class DemandParams:
    a1: float = 2.0
    a2: float = 2.0
    a0: float = 0.0
    mu: float = 0.25
    alpha_scale: float = 1.0
    beta_scale: float = 100.0
    cost: float = 1.0

    def __post_init__(self):
        if self.mu <= 0 or self.beta_scale <= 0 or self.alpha_scale <= 0:
            raise ValueError("mu, alpha_scale and beta_scale must be positive")


def demand(p1: float, p2: float, params: DemandParams = DemandParams()) -> tuple[float, float]:
    """Logit quantities for both firms; each firm's own quality enters its own index."""
    u1 = (params.a1 - p1 / params.alpha_scale) / params.mu
    u2 = (params.a2 - p2 / params.alpha_scale) / params.mu
    u0 = params.a0 / params.mu
    m = max(u0, u1, u2)
    e1, e2, e0 = math.exp(u1 - m), math.exp(u2 - m), math.exp(u0 - m)
    denom = e0 + e1 + e2
    return params.beta_scale * e1 / denom, params.beta_scale * e2 / denom


def profits(p1: float, p2: float, params: DemandParams = DemandParams()) -> tuple[float, float]:
    q1, q2 = demand(p1, p2, params)
    return (p1 - params.cost) * q1, (p2 - params.cost) * q2


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
    """Maximizer of a unimodal ``f`` on [lo, hi]."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def best_response_price(opponent_price: float, params: DemandParams = DemandParams(), firm: int = 0) -> float:
    """Own profit-maximizing price against a fixed rival price."""
    if firm == 0:
        f = lambda p: profits(p, opponent_price, params)[0]  # noqa: E731
    else:
        f = lambda p: profits(opponent_price, p, params)[1]  # noqa: E731
    return golden_section_max(f, params.cost, SEARCH_UPPER)


def nash_foc_residual(p: float, params: DemandParams = DemandParams()) -> float:
    """|1 - (p - c)(1 - s) / (mu * alpha)| at symmetric price ``p``."""
    s = demand(p, p, params)[0] / params.beta_scale
    return abs(1.0 - (p - params.cost) * (1.0 - s) / (params.mu * params.alpha_scale))


def monopoly_foc_residual(p: float, params: DemandParams = DemandParams()) -> float:
    s = demand(p, p, params)[0] / params.beta_scale
    return abs(1.0 - (p - params.cost) * (1.0 - 2.0 * s) / (params.mu * params.alpha_scale))


def joint_profit(p: float, params: DemandParams = DemandParams()) -> float:
    return sum(profits(p, p, params))


class ConvergenceError(RuntimeError):
    pass


def _require_symmetric(params: DemandParams) -> None:
    if params.a1 != params.a2:
        raise ValueError("benchmarks are defined for symmetric qualities (a1 == a2)")


def nash_price(params: DemandParams = DemandParams(), tol: float = 1e-8, damping: float = 0.5,
               max_iter: int = 1000) -> float:
    """Symmetric Bertrand-Nash price by damped best-response iteration."""
    _require_symmetric(params)
    p = params.cost + params.mu * params.alpha_scale
    for _ in range(max_iter):
        nxt = (1.0 - damping) * p + damping * best_response_price(p, params)
        if abs(nxt - p) < tol:
            p = nxt
            break
        p = nxt
    else:
        raise ConvergenceError("best-response iteration did not converge")
    if nash_foc_residual(p, params) >= 1e-6:
        raise ConvergenceError(f"first-order condition residual too large at p={p}")
    return p


def monopoly_price(params: DemandParams = DemandParams(), tol: float = 1e-8) -> float:
    """Joint-profit-maximizing common price."""
    _require_symmetric(params)
    p = golden_section_max(lambda x: joint_profit(x, params), params.cost, SEARCH_UPPER, tol=min(tol, 1e-10))
    h = 1e-6
    slope = (joint_profit(p + h, params) - joint_profit(p - h, params)) / (2 * h)
    if abs(slope) >= 1e-5:
        raise ConvergenceError(f"joint profit not stationary at p={p} (slope {slope})")
    return p


@dataclass(frozen=True)
class Benchmarks:
    nash_price: float
    monopoly_price: float
    nash_profit_per_firm: float
    nash_profit_total: float
    monopoly_profit_per_firm: float
    monopoly_profit_total: float
    nash_foc_residual: float
    monopoly_foc_residual: float


def benchmarks(params: DemandParams = DemandParams()) -> Benchmarks:
    pn = nash_price(params)
    pm = monopoly_price(params)
    n1, n2 = profits(pn, pn, params)
    m1, m2 = profits(pm, pm, params)
    return Benchmarks(pn, pm, n1, n1 + n2, m1, m1 + m2,
                      nash_foc_residual(pn, params), monopoly_foc_residual(pm, params))


# --- repeated game -------------------------------------------------------------

NO_PLANS = "No plans yet."
NO_INSIGHTS = "No insights yet."
NO_MARKET_DATA = "No market data yet (this is the first round)."
PROMPT_VARIANTS = ("P1", "P2")


@dataclass(frozen=True)
class HistoryRow:
    round_index: int
    own_price: float
    own_profit: float
    competitor_price: float


@dataclass
class PricingContext:
    """What one firm sees before choosing its price in a round."""

    round_index: int
    firm: int
    history: list[HistoryRow]
    plans: str
    insights: str
    prompt_variant: str
    params: DemandParams
    price_ceiling: float


@dataclass
class MarketRound:
    round_index: int
    prices: tuple[float, float]
    quantities: tuple[float, float]
    profits: tuple[float, float]
    plans: tuple[str, str]
    insights: tuple[str, str]
    observations: tuple[str, str] = ("", "")
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MarketRound":
        return cls(
            round_index=int(d["round_index"]),
            prices=tuple(d["prices"]),
            quantities=tuple(d["quantities"]),
            profits=tuple(d["profits"]),
            plans=tuple(d["plans"]),
            insights=tuple(d["insights"]),
            observations=tuple(d.get("observations", ("", ""))),
            warnings=list(d.get("warnings", [])),
        )


@dataclass(frozen=True)
class RunConfig:
    rounds: int = 300
    prompt_variant: str = "P1"
    history_window: int = 100
    price_ceiling: float = 4.51
    seed: int = 0
    max_reprompts: int = 3

    def __post_init__(self):
        if self.rounds < 1 or self.history_window < 1:
            raise ValueError("rounds and history_window must be >= 1")
        if self.prompt_variant not in PROMPT_VARIANTS:
            raise ValueError(f"prompt_variant must be one of {PROMPT_VARIANTS}")


def market_data_block(history: Sequence[HistoryRow], window: int = 100) -> str:
    """Plain-text table of the most recent rounds, oldest first."""
    rows = list(history)[-window:]
    if not rows:
        return NO_MARKET_DATA
    lines = ["Round | My price | My profit | Competitor's price"]
    for r in rows:
        lines.append(f"{r.round_index} | {r.own_price:.2f} | {r.own_profit:.2f} | {r.competitor_price:.2f}")
    return "\n".join(lines)


class DuopolyAborted(RuntimeError):
    """Raised when an agent keeps failing; ``rounds`` holds the partial log."""

    def __init__(self, message: str, rounds: list[MarketRound]):
        super().__init__(message)
        self.rounds = rounds


def _decide(agent, ctx: PricingContext, config: RunConfig, warn: list[str]):
    """Ask the agent for a decision; re-prompt on bad output, clamp as a last resort."""
    from .agents.base import AgentRequest
    from .agents.parsing import PricingFormatError, parse_pricing_response
    from .prompts import pricing_messages

    messages = pricing_messages(ctx, config.history_window)
    request = AgentRequest(task="pricing", messages=messages, context=ctx)
    last_decision = None
    last_error: Exception | None = None
    lo, hi = ctx.params.cost, config.price_ceiling
    for _ in range(1 + config.max_reprompts):
        try:
            text = agent.respond(request)
            decision = parse_pricing_response(text)
        except PricingFormatError as exc:
            last_error = exc
            continue
        if lo < decision.chosen_price <= hi:
            return decision
        last_decision = decision
    if last_decision is None:
        raise RuntimeError(f"firm {ctx.firm + 1}: no usable pricing response ({last_error})")
    clamped = min(max(last_decision.chosen_price, lo), hi)
    msg = (f"round {ctx.round_index} firm {ctx.firm + 1}: price {last_decision.chosen_price} "
           f"outside ({lo}, {hi}], clamped to {clamped}")
    log.warning(msg)
    warn.append(msg)
    last_decision.chosen_price = clamped
    return last_decision


def run_duopoly(agent_a, agent_b, config: RunConfig = RunConfig(),
                params: DemandParams = DemandParams(),
                on_round: Callable[[MarketRound], None] | None = None) -> list[MarketRound]:
    """Play ``config.rounds`` simultaneous pricing rounds between two agents.

    Agents follow the backend contract (``respond(request) -> str``) and
    answer with the pricing JSON. Both firms decide from history through the
    previous round only.
    """
    agents = (agent_a, agent_b)
    histories: list[list[HistoryRow]] = [[], []]
    plans = [NO_PLANS, NO_PLANS]
    insights = [NO_INSIGHTS, NO_INSIGHTS]
    rounds: list[MarketRound] = []
    for t in range(1, config.rounds + 1):
        warn: list[str] = []
        decisions = []
        for i in (0, 1):
            ctx = PricingContext(t, i, list(histories[i][-config.history_window:]), plans[i], insights[i],
                                 config.prompt_variant, params, config.price_ceiling)
            try:
                decisions.append(_decide(agents[i], ctx, config, warn))
            except Exception as exc:
                raise DuopolyAborted(f"run aborted in round {t}: {exc}", rounds) from exc
        p = (decisions[0].chosen_price, decisions[1].chosen_price)
        q = demand(p[0], p[1], params)
        pi = ((p[0] - params.cost) * q[0], (p[1] - params.cost) * q[1])
        for i in (0, 1):
            plans[i] = decisions[i].new_plans
            insights[i] = decisions[i].new_insights
            histories[i].append(HistoryRow(t, p[i], pi[i], p[1 - i]))
        rnd = MarketRound(t, p, q, pi, tuple(plans), tuple(insights),
                          (decisions[0].observations, decisions[1].observations), warn)
        rounds.append(rnd)
        if on_round is not None:
            on_round(rnd)
    return rounds


def write_run_log(path: str | Path, rounds: Sequence[MarketRound]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in rounds:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def read_run_log(path: str | Path) -> list[MarketRound]:
    with open(path, encoding="utf-8") as fh:
        return [MarketRound.from_dict(json.loads(line)) for line in fh if line.strip()]


@dataclass(frozen=True)
class MarkupRow:
    prompt_variant: str
    label: str
    mean_price: float
    rel_nash: float
    rel_monopoly: float
    n_obs: int


def pooled_mean_price(runs: Sequence[Sequence[MarketRound]], tail: int = 20,
                      firms: Sequence[int] = (0, 1)) -> tuple[float, int]:
    prices = [r.prices[i] for run in runs for r in list(run)[-tail:] for i in firms]
    if not prices:
        raise ValueError("no rounds to summarize")
    return math.fsum(prices) / len(prices), len(prices)


def markup_summary(runs_by_variant: dict[str, Sequence[Sequence[MarketRound]]], tail: int = 20,
                   firms: Sequence[int] = (0, 1), label: str = "",
                   params: DemandParams = DemandParams()) -> dict:
    """Pooled mean price over the final ``tail`` rounds per prompt variant,
    deviations from the Nash and monopoly prices, and the P1 - P2 gap."""
    if not runs_by_variant:
        raise ValueError("runs must be nonempty")
    pn, pm = nash_price(params), monopoly_price(params)
    rows = []
    for variant, runs in runs_by_variant.items():
        mean, n = pooled_mean_price(runs, tail, firms)
        rows.append(MarkupRow(variant, label, mean, mean - pn, mean - pm, n))
    means = {r.prompt_variant: r.mean_price for r in rows}
    delta = means["P1"] - means["P2"] if {"P1", "P2"} <= means.keys() else None
    return {"rows": rows, "delta_p1_p2": delta, "nash_price": pn, "monopoly_price": pm}


def write_markup_csv(path: str | Path, summary: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["prompt_variant", "label", "mean_price", "minus_nash", "minus_monopoly", "n_obs",
                    "nash_price", "monopoly_price"])
        for r in summary["rows"]:
            w.writerow([r.prompt_variant, r.label, f"{r.mean_price:.6f}", f"{r.rel_nash:.6f}",
                        f"{r.rel_monopoly:.6f}", r.n_obs, f"{summary['nash_price']:.6f}",
                        f"{summary['monopoly_price']:.6f}"])
        if summary["delta_p1_p2"] is not None:
            w.writerow(["P1-P2", "", f"{summary['delta_p1_p2']:.6f}", "", "", "", "", ""])
