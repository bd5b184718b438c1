"""Agent backend contract shared by scripted agents and the remote client."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Protocol

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatTurn:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown chat role {self.role!r}")
        if self.role in ("system", "user") and not self.content:
            raise ValueError(f"{self.role} turn must not be empty")

    def to_dict(self) -> dict[str, str]:
        return {"role": self.role, "content": self.content}


@dataclass
class AgentRequest:
    """One query to an agent.

    ``messages`` is what a chat model sees. ``context`` carries the same
    situation in structured form (a scenario, a pricing context, a study
    condition) so scripted agents need not parse prompt text.
    """

    task: str  # "game", "moral_machine" or "pricing"
    messages: list[ChatTurn]
    context: Any = None
    max_output_length: int | None = None


class AgentBackend(Protocol):
    concurrency_limit: int

    def respond(self, request: AgentRequest) -> str: ...
