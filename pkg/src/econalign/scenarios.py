"""The 18 elicitation scenarios (6 per protocol) and the human reference beliefs."""

from __future__ import annotations

from dataclasses import dataclass

from .games import GameProtocol, PayoffTuple


@dataclass(frozen=True)
class Scenario:
    protocol: GameProtocol
    index: int  # 1-based row within the protocol
    payoffs: PayoffTuple

    @property
    def key(self) -> str:
        return f"{self.protocol.value}-{self.index}"


_ROWS = {
    GameProtocol.SPD: [(90, 45, 15, 10), (90, 55, 20, 10), (80, 65, 25, 20),
                       (90, 65, 25, 10), (80, 75, 30, 20), (90, 75, 30, 10)],
    GameProtocol.TG: [(80, 50, 30, 20), (90, 50, 30, 10), (80, 60, 30, 20),
                      (90, 60, 30, 10), (80, 70, 30, 20), (90, 70, 30, 10)],
    GameProtocol.UG: [(60, 50, 40, 10), (65, 50, 35, 10), (70, 50, 30, 10),
                      (75, 50, 25, 10), (80, 50, 20, 10), (85, 50, 15, 10)],
}

# Average stated beliefs of the human subjects, per scenario row.
HUMAN_BELIEFS = {
    GameProtocol.SPD: [(0.33, 0.20, 0.13), (0.30, 0.21, 0.07), (0.32, 0.30, 0.16),
                       (0.31, 0.25, 0.08), (0.40, 0.41, 0.11), (0.33, 0.33, 0.08)],
    GameProtocol.TG: [(0.41, 0.23), (0.33, 0.19), (0.47, 0.30),
                      (0.37, 0.24), (0.54, 0.42), (0.42, 0.31)],
    GameProtocol.UG: [(0.48, 0.91), (0.49, 0.88), (0.47, 0.87),
                      (0.47, 0.83), (0.51, 0.79), (0.55, 0.72)],
}

# Fixed beliefs used for the fine-tuning targets (human SPD averages).
FIXED_SPD_BELIEFS = (0.33, 0.28, 0.11)

# Human protocol-level averages; used as default beliefs of scripted players.
HUMAN_AVERAGE_BELIEFS = {
    GameProtocol.SPD: FIXED_SPD_BELIEFS,
    GameProtocol.TG: (0.42, 0.28),
    GameProtocol.UG: (0.50, 0.83),
}


def scenario_table() -> list[Scenario]:
    """Default table: SPD rows, then TG, then UG."""
    return [
        Scenario(proto, i + 1, PayoffTuple.of(row))
        for proto, rows in _ROWS.items()
        for i, row in enumerate(rows)
    ]


def human_beliefs(scenario: Scenario) -> tuple[float, ...]:
    return HUMAN_BELIEFS[scenario.protocol][scenario.index - 1]
