"""Parsers and formatters for the pipe-delimited answers and the pricing JSON."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

from ..games import GameProtocol

_INT = re.compile(r"\d+")


class FormatError(ValueError):
    """A response that does not follow the requested answer format."""

    kind = "FormatError"

    def __init__(self, message: str, field: int | None = None):
        super().__init__(message)
        self.field = field


class WrongFieldCount(FormatError):
    kind = "WrongFieldCount"


class NonBinaryAction(FormatError):
    kind = "NonBinaryAction"


class PercentOutOfRange(FormatError):
    kind = "PercentOutOfRange"


@dataclass(frozen=True)
class GameResponse:
    strategy: tuple[int, ...]
    beliefs: tuple[float, ...]
    raw: str = ""


def _binary(token: str, pos: int) -> int:
    if token not in ("0", "1"):
        raise NonBinaryAction(f"field {pos + 1}: expected 0 or 1, got {token!r}", pos)
    return int(token)


def _percent(token: str, pos: int) -> int:
    if not _INT.fullmatch(token):
        raise PercentOutOfRange(f"field {pos + 1}: expected an integer 0-100, got {token!r}", pos)
    v = int(token)
    if v > 100:
        raise PercentOutOfRange(f"field {pos + 1}: {v} is outside 0-100", pos)
    return v


def _fields(text: str, expected: int) -> list[str]:
    parts = [p.strip() for p in text.strip().split("|")]
    if len(parts) != expected:
        raise WrongFieldCount(f"expected {expected} '|'-separated fields, got {len(parts)}")
    return parts


def parse_game_response(text: str, protocol: GameProtocol) -> GameResponse:
    """``x1|x2|x3|g1|g2|g3`` for SPD, ``x1|x2|g1|g2`` for TG and UG."""
    protocol = GameProtocol.parse(protocol)
    n = protocol.decision_points
    parts = _fields(text, 2 * n)
    strategy = tuple(_binary(t, i) for i, t in enumerate(parts[:n]))
    beliefs = tuple(_percent(t, n + i) / 100 for i, t in enumerate(parts[n:]))
    return GameResponse(strategy, beliefs, text)


def format_game_response(response: GameResponse) -> str:
    pct = [str(round(b * 100)) for b in response.beliefs]
    return "|".join([str(x) for x in response.strategy] + pct)


# --- Moral Machine -------------------------------------------------------------

# Per study: field kinds in answer order ("b" binary, "s" 0-100 scale)
MM_LAYOUT = {"Study1": "bbs", "Study3": "bsss"}
MM_FIELDS = {
    "Study1": ("moral_stay", "expect_stay", "appropriate"),
    "Study3": ("moral_stay", "appropriate", "buy_protective", "buy_maximize"),
}


@dataclass(frozen=True)
class MoralMachineResponse:
    study: str
    values: tuple[int, ...]
    raw: str = ""

    def as_dict(self) -> dict[str, int]:
        return dict(zip(MM_FIELDS[self.study], self.values))


def _study(study: str) -> str:
    key = study.replace(" ", "").replace("_", "").lower()
    for name in MM_LAYOUT:
        if name.lower() == key:
            return name
    raise ValueError(f"unknown study variant {study!r}")


def parse_moral_machine_response(text: str, study: str) -> MoralMachineResponse:
    study = _study(study)
    layout = MM_LAYOUT[study]
    # answers are often echoed with the quoting used in the prompt examples
    cleaned = text.strip().strip("`").strip('"').strip()
    parts = _fields(cleaned, len(layout))
    values = tuple(
        _binary(tok, i) if kind == "b" else _percent(tok, i)
        for i, (tok, kind) in enumerate(zip(parts, layout))
    )
    return MoralMachineResponse(study, values, text)


def format_moral_machine_response(response: MoralMachineResponse) -> str:
    return "|".join(str(v) for v in response.values)


# --- pricing JSON --------------------------------------------------------------

PRICING_KEYS = ("observations", "new_plans", "new_insights", "chosen_price")
_FENCE = re.compile(r"^```[A-Za-z]*\s*\n?(.*?)\n?\s*```$", re.DOTALL)


class PricingFormatError(ValueError):
    kind = "PricingFormatError"


class InvalidJson(PricingFormatError):
    kind = "InvalidJson"


class MissingKey(PricingFormatError):
    kind = "MissingKey"


class UnexpectedKey(PricingFormatError):
    kind = "UnexpectedKey"


class NonNumericPrice(PricingFormatError):
    kind = "NonNumericPrice"


@dataclass
class PricingDecision:
    observations: str
    new_plans: str
    new_insights: str
    chosen_price: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "observations": self.observations,
                "new_plans": self.new_plans,
                "new_insights": self.new_insights,
                "chosen_price": self.chosen_price,
            }
        )


def strip_fence(text: str) -> str:
    body = text.strip()
    m = _FENCE.match(body)
    return m.group(1).strip() if m else body


def parse_pricing_response(text: str) -> PricingDecision:
    """Strict JSON with exactly the four pricing keys; one markdown fence is tolerated."""
    body = strip_fence(text)
    try:
        obj = json.loads(body)
    except json.JSONDecodeError as exc:
        raise InvalidJson(f"not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise InvalidJson("top-level JSON value must be an object")
    # a present but unusable price is the more useful diagnosis
    if "chosen_price" in obj:
        price = obj["chosen_price"]
        if isinstance(price, bool) or not isinstance(price, (int, float)) or not math.isfinite(price):
            raise NonNumericPrice(f"chosen_price must be a finite number, got {price!r}")
    missing = [k for k in PRICING_KEYS if k not in obj]
    if missing:
        raise MissingKey(f"missing key(s): {', '.join(missing)}")
    extra = sorted(set(obj) - set(PRICING_KEYS))
    if extra:
        raise UnexpectedKey(f"unexpected key(s): {', '.join(extra)}")
    price = obj["chosen_price"]
    texts = [obj[k] if isinstance(obj[k], str) else json.dumps(obj[k]) for k in PRICING_KEYS[:3]]
    return PricingDecision(*texts, chosen_price=float(price))
