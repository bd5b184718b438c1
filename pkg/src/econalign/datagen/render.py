"""Chain-of-thought chat examples for the SPD fine-tuning targets.

Every number printed next to an ``=`` is computed with exact decimal
arithmetic from the quantities shown on its left, then rounded half-up
to two places.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, localcontext
from typing import Sequence

from ..games import GameProtocol, PayoffTuple
from ..preferences import AgentType, HomoEconomicus, HomoMoralis, best_response

SPD = GameProtocol.SPD

SYSTEM_COMMON = """\
You are a strategic decision maker. For every decision you face, when quantifiable payoffs are provided, you must:

- Evaluate all available actions using expected utility maximization.

When another player is involved:

- Identify their possible strategies.

- Predict their likely behavior by modeling their incentives and beliefs based on payoffs.

- If appropriate, assume the other player is also strategic unless instructed otherwise.

Your goal is to:

"""

SYSTEM_TAIL = """

If the data are incomplete or ambiguous:

- Clearly state any assumptions you make.

- Explain how those assumptions affect your reasoning and choice."""

SYSTEM_ECON = SYSTEM_COMMON + "- Maximize your own expected payoff." + SYSTEM_TAIL

SYSTEM_MORAL = SYSTEM_COMMON + """\
- Maximize your expected payoff.

- Your own expected payoff is the utility you would receive as a rational agent, based on the predicted actions of others.

- In addition to maximizing your own expected payoffs, you have a Kantian moral concern, which represents a partly deontological motivation. This means you assign a weight of {type} to what is considered "the right thing to do." Specifically, you:

- Define the moral payoff as the expected payoff that results when both players adopt your own strategy.

- Incorporate this moral concern by calculating a weighted expected payoff:

- Total expected Payoff = (1 - {type})*Own Payoff + {type}*Moral Payoff.""" + SYSTEM_TAIL

USER = """\
In this situation, Player A first chooses LEFT or RIGHT. If A chooses LEFT, Player B has to choose between WEST or SOUTH. If Player A chooses RIGHT, Player B has to choose between NORTH and EAST.

The payoffs are:

- LEFT + WEST: Player A gets {R} points, Player B gets {R} points

- LEFT + SOUTH: Player A gets {S} points, Player B gets {T} points

- RIGHT + NORTH: Player A gets {T} points, Player B gets {S} points

- RIGHT + EAST: Player A gets {P} points, Player B gets {P} points

You should consider both roles equally likely (50% chance of being Player A, 50% chance of being Player B){cue}.

You must follow this format exactly "X|Y|Z" in your answer where:

- X: Your choice as Player A (1 for LEFT, 0 for RIGHT)

- Y: Your choice as Player B if A chose LEFT (1 for WEST, 0 for SOUTH)

- Z: Your choice as Player B if A chose RIGHT (1 for NORTH, 0 for EAST)

After presenting your answer, your analysis should include:

- Estimating the probabilities of the other player's choices

- Calculating the expected payoffs for each of your possible actions

- Making your decision based on these calculations

- Explaining how you arrived at your estimates and decisions. Your answer:"""

USER_CUE = ", and assume that the other player is also a strategic decision-maker"
ASSISTANT_CUE = "I assume the other player is an average human and will choose the best possible option at their decision point."

CHOICE_NAMES = {"X": ("RIGHT", "LEFT"), "Y": ("SOUTH", "WEST"), "Z": ("EAST", "NORTH")}


@dataclass(frozen=True)
class ChatExample:
    system_text: str
    user_text: str
    assistant_text: str
    answer: tuple[int, ...]
    payoffs: PayoffTuple

    def messages(self) -> list[dict[str, str]]:
        return [
            {"role": "system", "content": self.system_text},
            {"role": "user", "content": self.user_text},
            {"role": "assistant", "content": self.assistant_text},
        ]


def dec(v) -> Decimal:
    return v if isinstance(v, Decimal) else Decimal(str(v))


def fmt2(v: Decimal) -> str:
    q = v.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    return f"{q:.2f}"


def num(v) -> str:
    """Plain rendering of an input quantity (payoff, belief, weight)."""
    d = dec(v)
    if d == d.to_integral_value():
        return str(int(d))
    return format(d.normalize(), "f")


def pct(v) -> str:
    return num(dec(v) * 100)


def _cmp(a: Decimal, b: Decimal) -> str:
    return "≥" if a >= b else "<"


def _choice(var: str, value: int) -> str:
    return f"{CHOICE_NAMES[var][value]} ({var}={value})"


def _ints(payoffs: PayoffTuple):
    return tuple(dec(payoffs.label(k)) for k in "TRPS")


def system_text(agent: AgentType) -> str:
    if isinstance(agent, HomoMoralis):
        return SYSTEM_MORAL.format(type=num(agent.kappa))
    return SYSTEM_ECON


def user_text(payoffs: PayoffTuple, identity_cues: bool = True) -> str:
    T, R, P, S = (num(v) for v in _ints(payoffs))
    return USER.format(T=T, R=R, P=P, S=S, cue=USER_CUE if identity_cues else "")


def _preamble(payoffs: PayoffTuple, beliefs, identity_cues: bool) -> list[str]:
    T, R, P, S = (num(v) for v in _ints(payoffs))
    y1, y2, y3 = beliefs
    lines = [
        "Reasoning:",
        "",
        f"Payoffs: T={T}, R={R}, P={P}, S={S}",
        "",
        "- X: My choice as Player A (1 for LEFT, 0 for RIGHT)",
        "- Y: My choice as Player B if A chose LEFT (1 for WEST, 0 for SOUTH)",
        "- Z: My choice as Player B if A chose RIGHT (1 for NORTH, 0 for EAST)",
        "",
    ]
    if identity_cues:
        lines += [ASSISTANT_CUE, ""]
    lines += [
        "Assumptions about the other player's choices:",
        f"- First mover A chooses LEFT: {pct(y1)}%",
        f"- Second mover B chooses WEST after LEFT: {pct(y2)}%",
        f"- Second mover B chooses NORTH after RIGHT: {pct(y3)}%",
        "",
    ]
    return lines


def _answer_line(answer: Sequence[int]) -> str:
    return 'Answer (in format "X|Y|Z"): ' + "|".join(str(a) for a in answer)


def _econ_body(payoffs: PayoffTuple, beliefs, answer) -> list[str]:
    T, R, P, S = _ints(payoffs)
    y1, y2, y3 = (dec(b) for b in beliefs)
    X, Y, Z = answer
    left = y2 * R + (1 - y2) * S
    right = y3 * T + (1 - y3) * P
    sl, sr = fmt2(left), fmt2(right)
    exp_left = f"{num(y2)} × {num(R)} + {num(1 - y2)} × {num(S)} = {sl}"
    exp_right = f"{num(y3)} × {num(T)} + {num(1 - y3)} × {num(P)} = {sr}"
    return [
        "Reasoning as Second Mover (Player B):",
        "",
        "1. If Player A chooses LEFT:",
        "- Compare WEST vs. SOUTH.",
        f"- WEST yields {num(R)}, SOUTH yields {num(T)} for B.",
        f"- I will choose WEST (Y=1) if {num(R)} ≥ {num(T)}, otherwise SOUTH (Y=0).",
        "",
        "2. If Player A chooses RIGHT:",
        "- Compare NORTH vs. EAST.",
        f"- NORTH yields {num(S)}, EAST yields {num(P)} for B.",
        f"- I will choose NORTH (Z=1) if {num(S)} ≥ {num(P)}, otherwise EAST (Z=0).",
        "",
        "Reasoning as First Mover (Player A):",
        "- Predict Player B's responses to each branch:",
        f"- Expected payoff of choosing LEFT: {exp_left}",
        f"- Expected payoff of choosing RIGHT: {exp_right}",
        "- Compare expected payoffs:",
        f"- Choose LEFT (X=1) if {sl} ≥ {sr}, else choose RIGHT (X=0)",
        "",
        "Combined Analysis:",
        "1. Determine B's best responses:",
        f"- After LEFT: choose {_choice('Y', Y)}, because {num(R)} {_cmp(R, T)} {num(T)}",
        f"- After RIGHT: choose {_choice('Z', Z)}, because {num(S)} {_cmp(S, P)} {num(P)}",
        "2. Based on B's optimal responses, compute A's expected payoffs and choose the optimal action:",
        f"- A chooses {_choice('X', X)}, because {sl} {_cmp(left, right)} {sr}",
        "",
    ]


def _moral_body(payoffs: PayoffTuple, beliefs, answer, kappa) -> list[str]:
    T, R, P, S = _ints(payoffs)
    y1, y2, y3 = (dec(b) for b in beliefs)
    k = dec(kappa)
    X, Y, Z = answer
    t, r, p, s = (num(v) for v in (T, R, P, S))
    kk, ik = num(k), f"(1 - {num(k)})"
    a1, b1, a2, b2, a3, b3 = num(y1), num(1 - y1), num(y2), num(1 - y2), num(y3), num(1 - y3)

    def eq(expr: str, value: Decimal) -> str:
        return f"{expr} = {fmt2(value)}"

    # own and moral payoff at the chosen strategy
    fm_own_val = (y2 * R + (1 - y2) * S) if X else (y3 * T + (1 - y3) * P)
    fm_own_txt = f"({a2} × {r} + {b2} × {s})" if X else f"({a3} × {t} + {b3} × {p})"
    sm_y, sm_z = (R if Y else T), (S if Z else P)
    own_val = Decimal("0.5") * fm_own_val + Decimal("0.5") * (y1 * sm_y + (1 - y1) * sm_z)
    own_txt = f"0.5 × {fm_own_txt} + 0.5 × ({a1} × {num(sm_y)} + {b1} × {num(sm_z)})"
    if X:
        m1, m2 = (R, R) if Y else (S, T)
    else:
        m1, m2 = (T, S) if Z else (P, P)
    moral_val = Decimal("0.5") * m1 + Decimal("0.5") * m2
    moral_txt = f"0.5 × {num(m1)} + 0.5 × {num(m2)}"
    own_s, moral_s = fmt2(own_val), fmt2(moral_val)
    total_val = (1 - k) * dec(own_s) + k * dec(moral_s)
    total_txt = f"{ik} × {own_s} + {kk} × {moral_s}"

    y_val = (1 - k) * y1 * (R - T) + k * X * (2 * R - S - T)
    y_txt = f"{ik} × {a1} × ({r} - {t}) + {kk} × {X} × (2 × {r} - {s} - {t})"
    z_val = (1 - k) * (1 - y1) * (S - P) + k * (1 - X) * (T + S - 2 * P)
    z_txt = f"{ik} × {b1} × ({s} - {p}) + {kk} × (1 - {X}) × ({t} + {s} - 2 × {p})"
    own_diff = y2 * R + (1 - y2) * S - y3 * T - (1 - y3) * P
    moral_diff = 2 * Y * R + (1 - Y) * (S + T) - Z * (S + T) - (1 - Z) * 2 * P
    x_val = (1 - k) * own_diff + k * moral_diff
    x_txt = (f"{ik} × ({a2} × {r} + {b2} × {s} - {a3} × {t} - {b3} × {p}) + "
             f"{kk} × (2 × {Y} × {r} + (1 - {Y}) × ({s} + {t}) - {Z} × ({s} + {t}) - (1 - {Z}) × 2 × {p})")

    def verdict(value: Decimal) -> str:
        return f"{fmt2(value)} {'≥' if value >= 0 else '<'} 0"

    return [
        "My expected utility function should be a combination of my own payoffs and moral payoffs:",
        f"- Own Payoff: 0.5 × [X × ({a2} × {r} + {b2} × {s}) + (1 - X) × ({a3} × {t} + {b3} × {p})] "
        f"+ 0.5 × [{a1} × (Y × {r} + (1 - Y) × {t}) + {b1} × (Z × {s} + (1 - Z) × {p})]",
        "- Measures my expected payoff given the expected responses from the other player, given my randomized role.",
        f"- Moral Payoff: 0.5 × [X × (Y × {r} + (1 - Y) × {s}) + (1 - X) × (Z × {t} + (1 - Z) × {p})] "
        f"+ 0.5 × [X × (Y × {r} + (1 - Y) × {t}) + (1 - X) × (Z × {s} + (1 - Z) × {p})]",
        "- Reflects my concern for the right thing to do, when the other player adopts the same strategy as I do.",
        f"- My moral concern is weighted by {kk}, meaning I assign a weight of {kk} to the moral payoff.",
        f"- Total Expected Utility = {ik} × Own Payoff + {kk} × Moral Payoff",
        "",
        "Reasoning as Second Mover (Player B):",
        "",
        "1. If Player A chooses LEFT:",
        "- Compare WEST (Y = 1) vs. SOUTH (Y = 0).",
        "- Own payoff component related to Y:",
        f"- WEST gives B: {eq(f'{ik} × 0.5 × {a1} × {r}', (1 - k) * Decimal('0.5') * y1 * R)}",
        f"- SOUTH gives B: {eq(f'{ik} × 0.5 × {a1} × {t}', (1 - k) * Decimal('0.5') * y1 * T)}",
        f"- Moral component related to Y (if both players follow strategy (X, Y, Z), here X = {X}):",
        f"- WEST gives B: {eq(f'{kk} × 0.5 × {X} × ({r} + {r})', k * Decimal('0.5') * X * 2 * R)}",
        f"- SOUTH gives B: {eq(f'{kk} × 0.5 × {X} × ({s} + {t})', k * Decimal('0.5') * X * (S + T))}",
        f"- Choose WEST (Y=1) if {eq(y_txt, y_val)} ≥ 0, otherwise choose SOUTH (Y=0).",
        "",
        "2. If Player A chooses RIGHT:",
        "- Compare NORTH (Z = 1) vs. EAST (Z = 0).",
        "- Own payoff component related to Z:",
        f"- NORTH gives B: {eq(f'{ik} × 0.5 × {b1} × {s}', (1 - k) * Decimal('0.5') * (1 - y1) * S)}",
        f"- EAST gives B: {eq(f'{ik} × 0.5 × {b1} × {p}', (1 - k) * Decimal('0.5') * (1 - y1) * P)}",
        f"- Moral component related to Z (if both players follow strategy (X, Y, Z), here X = {X}):",
        f"- NORTH gives B: {eq(f'{kk} × 0.5 × (1 - {X}) × ({t} + {s})', k * Decimal('0.5') * (1 - X) * (T + S))}",
        f"- EAST gives B: {eq(f'{kk} × 0.5 × (1 - {X}) × ({p} + {p})', k * Decimal('0.5') * (1 - X) * 2 * P)}",
        f"- Choose NORTH (Z=1) if {eq(z_txt, z_val)} ≥ 0, otherwise choose EAST (Z=0).",
        "",
        "Reasoning as First Mover (Player A):",
        "- Compare LEFT (X = 1) vs. RIGHT (X = 0).",
        "- Own payoff component related to X:",
        f"- LEFT gives A: {eq(f'{ik} × 0.5 × ({a2} × {r} + {b2} × {s})', (1 - k) * Decimal('0.5') * (y2 * R + (1 - y2) * S))}",
        f"- RIGHT gives A: {eq(f'{ik} × 0.5 × ({a3} × {t} + {b3} × {p})', (1 - k) * Decimal('0.5') * (y3 * T + (1 - y3) * P))}",
        f"- Moral component related to X (if both players follow strategy (X, Y, Z), here Y = {Y}, Z = {Z}):",
        "- LEFT gives A: " + eq(
            f"{kk} × 0.5 × ({Y} × {r} + (1 - {Y}) × {s} + {Y} × {r} + (1 - {Y}) × {t})",
            k * Decimal("0.5") * (Y * R + (1 - Y) * S + Y * R + (1 - Y) * T)),
        "- RIGHT gives A: " + eq(
            f"{kk} × 0.5 × ({Z} × {t} + (1 - {Z}) × {p} + {Z} × {s} + (1 - {Z}) × {p})",
            k * Decimal("0.5") * (Z * T + (1 - Z) * P + Z * S + (1 - Z) * P)),
        "- Compare expected payoffs, given optimal responses as Player B:",
        f"- Choose LEFT (X=1) if {eq(x_txt, x_val)} ≥ 0, else choose RIGHT (X=0)",
        "",
        "Combined Analysis:",
        "1. Determine B's best responses:",
        f"- After LEFT: choose {_choice('Y', Y)}, because {verdict(y_val)}",
        f"- After RIGHT: choose {_choice('Z', Z)}, because {verdict(z_val)}",
        "2. Based on B's optimal responses, compute A's expected payoffs and choose the optimal action:",
        f"- A chooses {_choice('X', X)}, because {verdict(x_val)}",
        f"- At ({X}, {Y}, {Z}): Own Payoff = {eq(own_txt, own_val)}",
        f"- At ({X}, {Y}, {Z}): Moral Payoff = {eq(moral_txt, moral_val)}",
        f"- At ({X}, {Y}, {Z}): Total Expected Utility = {eq(total_txt, total_val)}",
        "",
    ]


def render_example(payoffs: PayoffTuple, agent: AgentType, beliefs: Sequence[float],
                   identity_cues: bool = True) -> ChatExample:
    """Render one SPD dialogue whose final line is the agent's best response."""
    if not isinstance(agent, (HomoEconomicus, HomoMoralis)):
        raise TypeError(f"no fine-tuning template for {agent!r}")
    beliefs = tuple(beliefs)
    if len(beliefs) != 3:
        raise ValueError("SPD examples need three beliefs")
    answer = best_response(agent, payoffs, SPD, beliefs)
    with localcontext() as ctx:
        ctx.prec = 50
        body = (_moral_body(payoffs, beliefs, answer, agent.kappa) if isinstance(agent, HomoMoralis)
                else _econ_body(payoffs, beliefs, answer))
    lines = _preamble(payoffs, beliefs, identity_cues) + body + [_answer_line(answer)]
    return ChatExample(system_text(agent), user_text(payoffs, identity_cues), "\n".join(lines), answer, payoffs)
