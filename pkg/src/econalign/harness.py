"""Experiment orchestration: game sessions, Moral Machine studies, tables and manifests."""

from __future__ import annotations

import csv
import json
import math
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .agents.base import AgentRequest
from .agents.client import CompletionError
from .agents.parsing import (
    MM_FIELDS,
    MM_LAYOUT,
    FormatError,
    GameResponse,
    parse_game_response,
    parse_moral_machine_response,
)
from .estimation import ObservedResponse
from .games import GameProtocol, PayoffTuple
from .preferences import AgentType, best_response
from .prompts import DEFAULT_POINT_VALUE, MM_CONDITIONS, game_messages, moral_machine_messages
from .scenarios import Scenario, scenario_table

GAME_OUTPUT_CAP = 20  # characters requested from remote models for game answers

CONSISTENT, INCONSISTENT = "Consistent", "Inconsistent"


# --- game evaluation ---------------------------------------------------------------


@dataclass
class ScenarioEntry:
    scenario: str
    protocol: str
    payoffs: tuple[float, float, float, float]
    raw: str
    strategy: tuple[int, ...] | None = None
    beliefs: tuple[float, ...] | None = None
    error_kind: str | None = None
    error: str | None = None
    started: float = 0.0
    finished: float = 0.0

    @property
    def parsed(self) -> bool:
        return self.strategy is not None


@dataclass
class SessionLog:
    session_id: str
    agent: str
    entries: list[ScenarioEntry] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SessionLog":
        entries = [ScenarioEntry(**{**e, "payoffs": tuple(e["payoffs"]),
                                    "strategy": None if e["strategy"] is None else tuple(e["strategy"]),
                                    "beliefs": None if e["beliefs"] is None else tuple(e["beliefs"])})
                   for e in d["entries"]]
        return cls(d["session_id"], d["agent"], entries)


@dataclass
class AggregateRow:
    protocol: str
    label: str  # scenario key, or "All"
    payoffs: tuple[float, float, float, float] | None
    issued: int
    parsed: int
    x_mean: tuple[float, ...] | None
    y_mean: tuple[float, ...] | None

    @property
    def excluded(self) -> int:
        return self.issued - self.parsed

    @property
    def empty(self) -> bool:
        return self.x_mean is None


@dataclass
class AggregateReport:
    rows: list[AggregateRow]
    issued: int
    parsed: int

    @property
    def exclusion_rate(self) -> float:
        return (self.issued - self.parsed) / self.issued if self.issued else 0.0

    def row(self, label: str, protocol: str | None = None) -> AggregateRow:
        for r in self.rows:
            if r.label == label and (protocol is None or r.protocol == protocol):
                return r
        raise KeyError(label)


class EvaluationAborted(RuntimeError):
    def __init__(self, message: str, logs: list[SessionLog]):
        super().__init__(message)
        self.logs = logs


def _mean(vectors: list[tuple[float, ...]]) -> tuple[float, ...]:
    return tuple(math.fsum(col) / len(vectors) for col in zip(*vectors))


def aggregate(logs: Sequence[SessionLog], table: Sequence[Scenario] | None = None) -> AggregateReport:
    """Per-scenario means plus unweighted "All" rows per protocol."""
    table = list(table or scenario_table())
    by_key: dict[str, list[ScenarioEntry]] = {s.key: [] for s in table}
    for log_ in sorted(logs, key=lambda s: s.session_id):
        for e in log_.entries:
            by_key.setdefault(e.scenario, []).append(e)
    rows: list[AggregateRow] = []
    total_issued = total_parsed = 0
    for proto in GameProtocol:
        proto_rows = []
        for sc in (s for s in table if s.protocol is proto):
            entries = by_key[sc.key]
            ok = [e for e in entries if e.parsed]
            # sort so floating sums do not depend on arrival order
            xs = sorted(e.strategy for e in ok)
            ys = sorted(e.beliefs for e in ok)
            row = AggregateRow(proto.value, sc.key, sc.payoffs.as_tuple(), len(entries), len(ok),
                               _mean(xs) if ok else None, _mean(ys) if ok else None)
            proto_rows.append(row)
            total_issued += row.issued
            total_parsed += row.parsed
        if not proto_rows:
            continue
        filled = [r for r in proto_rows if not r.empty]
        all_row = AggregateRow(
            proto.value, "All", None,
            sum(r.issued for r in proto_rows), sum(r.parsed for r in proto_rows),
            _mean([r.x_mean for r in filled]) if filled else None,
            _mean([r.y_mean for r in filled]) if filled else None,
        )
        rows += proto_rows + [all_row]
    return AggregateReport(rows, total_issued, total_parsed)


def _ask_game(agent, sc: Scenario, point_value: str, original: bool) -> ScenarioEntry:
    request = AgentRequest("game", game_messages(sc.payoffs, sc.protocol, point_value, original),
                           context=sc, max_output_length=GAME_OUTPUT_CAP)
    started = time.time()
    raw = agent.respond(request)
    entry = ScenarioEntry(sc.key, sc.protocol.value, sc.payoffs.as_tuple(), raw,
                          started=started, finished=time.time())
    try:
        parsed = parse_game_response(raw, sc.protocol)
    except FormatError as exc:
        entry.error_kind, entry.error = exc.kind, str(exc)
    else:
        entry.strategy, entry.beliefs = parsed.strategy, parsed.beliefs
    return entry


@dataclass
class EvaluationResult:
    logs: list[SessionLog]
    report: AggregateReport


def run_evaluation(agent, table: Sequence[Scenario] | None = None, sessions: int = 50, seed: int = 0,
                   agent_label: str = "agent", point_value: str = DEFAULT_POINT_VALUE,
                   original_instructions: bool = False) -> EvaluationResult:
    """Issue every scenario of every session as an independent conversation.

    The seed only permutes the issue order within each session, which
    matters for rate-limited remote backends and not for the results.
    """
    if sessions < 1:
        raise ValueError("sessions must be >= 1")
    table = list(table or scenario_table())
    rng = np.random.default_rng(seed)
    jobs = []
    for i in range(sessions):
        for j in rng.permutation(len(table)):
            jobs.append((i, table[int(j)]))
    logs = [SessionLog(f"s{i:04d}", agent_label) for i in range(sessions)]
    workers = max(1, int(getattr(agent, "concurrency_limit", 1)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [(i, pool.submit(_ask_game, agent, sc, point_value, original_instructions))
                   for i, sc in jobs]
        failure = None
        for i, fut in futures:
            try:
                logs[i].entries.append(fut.result())
            except CompletionError as exc:
                failure = failure or exc
    if failure is not None:
        raise EvaluationAborted(f"backend failed: {failure}", logs)
    order = {sc.key: n for n, sc in enumerate(table)}
    for log_ in logs:
        log_.entries.sort(key=lambda e: order[e.scenario])
    return EvaluationResult(logs, aggregate(logs, table))


def observed_responses(logs: Sequence[SessionLog]) -> list[ObservedResponse]:
    out = []
    for log_ in logs:
        for e in log_.entries:
            if e.parsed:
                out.append(ObservedResponse(log_.session_id, GameProtocol.parse(e.protocol),
                                            PayoffTuple.of(e.payoffs), e.strategy, e.beliefs))
    return out


def consistency_flags(response: GameResponse, agent: AgentType, payoffs: PayoffTuple,
                      protocol: GameProtocol) -> tuple[str, ...]:
    """Compare each reported action with the best response to the reported beliefs."""
    optimal = best_response(agent, payoffs, protocol, response.beliefs)
    return tuple(CONSISTENT if a == b else INCONSISTENT for a, b in zip(response.strategy, optimal))


# --- Moral Machine ----------------------------------------------------------------


@dataclass
class ItemStat:
    name: str
    kind: str  # "binary" or "scale"
    mean: float | None
    spread: float | None  # SE for binary items, SD for scales

    @property
    def spread_label(self) -> str:
        return "se" if self.kind == "binary" else "sd"


@dataclass
class ConditionReport:
    study: str
    condition: str
    issued: int
    parsed: int
    items: list[ItemStat]
    refusals: list[str] = field(default_factory=list)

    @property
    def excluded(self) -> int:
        return self.issued - self.parsed


def item_stats(study: str, answers: Sequence[Sequence[int]]) -> list[ItemStat]:
    out = []
    n = len(answers)
    for pos, (name, kind) in enumerate(zip(MM_FIELDS[study], MM_LAYOUT[study])):
        col = [a[pos] for a in answers]
        if not n:
            out.append(ItemStat(name, "binary" if kind == "b" else "scale", None, None))
            continue
        mean = math.fsum(col) / n
        if kind == "b":
            out.append(ItemStat(name, "binary", mean, math.sqrt(mean * (1 - mean) / n)))
        else:
            sd = math.sqrt(math.fsum((v - mean) ** 2 for v in col) / (n - 1)) if n > 1 else 0.0
            out.append(ItemStat(name, "scale", mean, sd))
    return out


def run_moral_machine(agent, study: str = "Study1", sessions: int = 200) -> list[ConditionReport]:
    """Both conditions of a study, ``sessions`` independent queries each.

    Unparseable answers (including refusals) are excluded and kept verbatim.
    """
    if study not in MM_CONDITIONS:
        raise ValueError(f"study must be one of {sorted(MM_CONDITIONS)}")
    reports = []
    workers = max(1, int(getattr(agent, "concurrency_limit", 1)))
    for condition in MM_CONDITIONS[study]:
        request = AgentRequest("moral_machine", moral_machine_messages(study, condition),
                               context=(study, condition))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raws = list(pool.map(lambda _: agent.respond(request), range(sessions)))
        answers, refusals = [], []
        for raw in raws:
            try:
                answers.append(parse_moral_machine_response(raw, study).values)
            except FormatError:
                refusals.append(raw)
        reports.append(ConditionReport(study, condition, sessions, len(answers),
                                       item_stats(study, sorted(answers)), refusals))
    return reports


# --- persistence -----------------------------------------------------------------


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.6g}"


def write_session_logs(path: str | Path, logs: Sequence[SessionLog]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for log_ in logs:
            fh.write(json.dumps(log_.to_dict(), ensure_ascii=False) + "\n")


def read_session_logs(path: str | Path) -> list[SessionLog]:
    with open(path, encoding="utf-8") as fh:
        return [SessionLog.from_dict(json.loads(line)) for line in fh if line.strip()]


def write_aggregate_csv(path: str | Path, report: AggregateReport) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["protocol", "scenario", "T", "R", "P", "S", "issued", "parsed", "excluded",
                    "x1", "x2", "x3", "y1", "y2", "y3"])
        for r in report.rows:
            pay = list(r.payoffs) if r.payoffs else [""] * 4
            xs = list(r.x_mean or ()) + [None] * (3 - len(r.x_mean or ()))
            ys = list(r.y_mean or ()) + [None] * (3 - len(r.y_mean or ()))
            w.writerow([r.protocol, r.label, *[_fmt(v) if v != "" else "" for v in pay],
                        r.issued, r.parsed, r.excluded, *map(_fmt, xs), *map(_fmt, ys)])


def write_moral_machine_csv(path: str | Path, reports: Sequence[ConditionReport]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["study", "condition", "item", "kind", "mean", "spread", "spread_kind",
                    "issued", "parsed", "excluded"])
        for rep in reports:
            for it in rep.items:
                w.writerow([rep.study, rep.condition, it.name, it.kind, _fmt(it.mean), _fmt(it.spread),
                            it.spread_label, rep.issued, rep.parsed, rep.excluded])


def _versions() -> dict[str, str]:
    import httpx
    import scipy

    from . import __version__

    return {"econalign": __version__, "python": sys.version.split()[0], "platform": platform.platform(),
            "numpy": np.__version__, "scipy": scipy.__version__, "httpx": httpx.__version__}


def write_manifest(out_dir: str | Path, command: str, config: dict, seed: int | None,
                   outputs: Sequence[str | Path]) -> Path:
    """``<command>.manifest.json`` naming every output file of one run, relative to ``out_dir``."""
    out_dir = Path(out_dir)
    rel = sorted(str(Path(p).resolve().relative_to(out_dir.resolve())) for p in outputs)
    manifest = {
        "command": command,
        "seed": seed,
        "config": config,
        "versions": _versions(),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "outputs": rel,
    }
    path = out_dir / f"{command}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8")
    return path
