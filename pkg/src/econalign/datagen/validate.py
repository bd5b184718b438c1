"""Independent checker for generated fine-tuning files.

Nothing here reuses the solver or the renderer: payoffs, beliefs and the
moral weight are read back out of the dialogue text, each strategy is
scored with closed-form SPD expectations in exact rational arithmetic,
and every printed ``expression = value`` is re-evaluated from its text.
"""

from __future__ import annotations

import ast
import itertools
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

_NUM = r"-?\d+(?:\.\d+)?"
# an arithmetic expression (digits, parens, + - ×) followed by "= value"
ARITH = re.compile(r"(?<![\w.])([(\d][\d.() ×+\-]*?) = (" + _NUM + r")(?![\d.])")
BECAUSE = re.compile(r"because (" + _NUM + r") (≥|<) (" + _NUM + r")")
PAYOFF_LINE = re.compile(r"- (LEFT|RIGHT) \+ (WEST|SOUTH|NORTH|EAST): Player A gets (\d+) points, Player B gets (\d+) points")
BELIEF_LINE = re.compile(r"(?:First mover A chooses LEFT|Second mover B chooses WEST after LEFT|Second mover B chooses NORTH after RIGHT): (\d+(?:\.\d+)?)%")
KAPPA = re.compile(r"assign a weight of (\d+(?:\.\d+)?) to what is considered")
ANSWER = re.compile(r'Answer \(in format "X\|Y\|Z"\): ([01])\|([01])\|([01])$')


class ValidationError(ValueError):
    pass


def evaluate(expr: str) -> Fraction:
    """Exact value of a rendered arithmetic string (numbers, + - ×, parens)."""
    tree = ast.parse(expr.replace("×", "*"), mode="eval")

    def ev(node) -> Fraction:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return Fraction(ast.get_source_segment(src, node))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
        raise ValidationError(f"unsupported syntax in {expr!r}")

    src = expr.replace("×", "*")
    return ev(tree)


def round2(v: Fraction) -> str:
    """Two decimals, halves rounded away from zero."""
    cents = abs(v) * 100
    whole = math.floor(cents + Fraction(1, 2))
    sign = "-" if v < 0 else ""
    return f"{sign}{whole // 100}.{whole % 100:02d}"


def check_arithmetic(text: str) -> int:
    """Raise on the first mismatching expression; return how many were checked."""
    n = 0
    for m in ARITH.finditer(text):
        expr, shown = m.group(1).strip(), m.group(2)
        if "×" not in expr and "+" not in expr and " - " not in expr:
            continue
        if expr.count("(") != expr.count(")"):
            raise ValidationError(f"unbalanced expression {expr!r}")
        expected = round2(evaluate(expr))
        if expected != shown:
            raise ValidationError(f"{expr} = {shown}, recomputed {expected}")
        n += 1
    for m in BECAUSE.finditer(text):
        a, op, b = Fraction(m.group(1)), m.group(2), Fraction(m.group(3))
        if (a >= b) != (op == "≥"):
            raise ValidationError(f"comparison '{m.group(0)}' is false")
        n += 1
    return n


# --- independent best response --------------------------------------------------


def _spd_own(x, y, T, R, P, S) -> Fraction:
    x1, x2, x3 = x
    y1, y2, y3 = y
    as_first = x1 * (y2 * R + (1 - y2) * S) + (1 - x1) * (y3 * T + (1 - y3) * P)
    as_second = y1 * (x2 * R + (1 - x2) * T) + (1 - y1) * (x3 * S + (1 - x3) * P)
    return (as_first + as_second) / 2


def solve(T, R, P, S, beliefs, kappa: Fraction | None) -> tuple[int, int, int]:
    """Best pure strategy; ties go to more 1-entries, then the larger vector."""
    best_key, best = None, None
    for x in itertools.product((1, 0), repeat=3):
        u = _spd_own(x, beliefs, T, R, P, S)
        if kappa is not None:
            u = (1 - kappa) * u + kappa * _spd_own(x, x, T, R, P, S)
        key = (u, sum(x), x)
        if best_key is None or key > best_key:
            best_key, best = key, x
    return best


@dataclass
class DialogueFacts:
    payoffs: tuple[int, int, int, int]
    beliefs: tuple[Fraction, Fraction, Fraction]
    kappa: Fraction | None
    answer: tuple[int, int, int]


def read_facts(messages: list[dict]) -> DialogueFacts:
    system, user, assistant = (m["content"] for m in messages)
    cells = {(a, b): (int(pa), int(pb)) for a, b, pa, pb in PAYOFF_LINE.findall(user)}
    try:
        R, _ = cells[("LEFT", "WEST")]
        S, T = cells[("LEFT", "SOUTH")]
        P, _ = cells[("RIGHT", "EAST")]
    except KeyError:
        raise ValidationError("user text does not list the four SPD outcomes") from None
    if cells[("RIGHT", "NORTH")] != (T, S):
        raise ValidationError("RIGHT + NORTH payoffs are not (T, S)")
    bel = BELIEF_LINE.findall(assistant)
    if len(bel) != 3:
        raise ValidationError("assistant text does not state three beliefs")
    km = KAPPA.search(system)
    m = ANSWER.search(assistant)
    if not m:
        raise ValidationError("assistant text does not end with the X|Y|Z answer")
    return DialogueFacts(
        (T, R, P, S),
        tuple(Fraction(b) / 100 for b in bel),
        Fraction(km.group(1)) if km else None,
        tuple(int(g) for g in m.groups()),
    )


@dataclass
class ValidationReport:
    lines: int = 0
    expressions: int = 0
    distinct_payoffs: int = 0
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors and self.lines == self.distinct_payoffs


def validate_line(line: str) -> tuple[DialogueFacts, int]:
    obj = json.loads(line)
    if set(obj) != {"messages"}:
        raise ValidationError(f"unexpected top-level keys {sorted(obj)}")
    msgs = obj["messages"]
    if [m.get("role") for m in msgs] != ["system", "user", "assistant"]:
        raise ValidationError("messages must be system, user, assistant in that order")
    if any(set(m) != {"role", "content"} or not isinstance(m["content"], str) or not m["content"] for m in msgs):
        raise ValidationError("each message needs exactly a non-empty role/content pair")
    facts = read_facts(msgs)
    T, R, P, S = facts.payoffs
    if not (100 >= T > R > P > S >= 0):
        raise ValidationError(f"payoffs {facts.payoffs} are not ordered integers in [0, 100]")
    expected = solve(T, R, P, S, facts.beliefs, facts.kappa)
    if expected != facts.answer:
        raise ValidationError(f"answer {facts.answer} but recomputed best response is {expected}")
    n = check_arithmetic(msgs[2]["content"])
    return facts, n


def validate_file(path: str | Path) -> ValidationReport:
    report = ValidationReport()
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, 1):
            report.lines += 1
            try:
                facts, n = validate_line(line)
            except (ValidationError, ValueError, KeyError) as exc:
                report.errors.append(f"line {i}: {exc}")
                continue
            report.expressions += n
            if facts.payoffs in seen:
                report.errors.append(f"line {i}: duplicate payoff tuple {facts.payoffs}")
            seen.add(facts.payoffs)
    report.distinct_payoffs = len(seen)
    return report
