"""Pooled logit maximum likelihood for (alpha, beta, kappa, lambda) and the
session block bootstrap."""

from __future__ import annotations

import json
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .games import GameProtocol, PayoffTuple, pure_strategies
from .preferences import PreferenceParams, strategy_features

log = logging.getLogger(__name__)

PARAM_NAMES = ("alpha", "beta", "kappa", "lambda")
K_MAX = 8
DEFAULT_INIT = (0.0, 0.0, 0.0, math.log(5.0))
JITTER = np.array([0.25, 0.25, 0.25, 0.75])


@dataclass(frozen=True)
class ObservedResponse:
    session_id: str
    protocol: GameProtocol
    payoffs: PayoffTuple
    strategy: tuple[int, ...]
    beliefs: tuple[float, ...]

    def __post_init__(self):
        protocol = GameProtocol.parse(self.protocol)
        object.__setattr__(self, "protocol", protocol)
        object.__setattr__(self, "strategy", tuple(int(v) for v in self.strategy))
        object.__setattr__(self, "beliefs", tuple(float(v) for v in self.beliefs))
        n = protocol.decision_points
        if len(self.strategy) != n or len(self.beliefs) != n:
            raise ValueError(f"response vectors must have length {n} for {protocol.value}")
        if any(v not in (0, 1) for v in self.strategy):
            raise ValueError(f"strategy must be pure, got {self.strategy}")
        if any(not 0.0 <= b <= 1.0 for b in self.beliefs):
            raise ValueError(f"beliefs must lie in [0, 1], got {self.beliefs}")

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "protocol": self.protocol.value,
            "payoffs": list(self.payoffs.as_tuple()),
            "strategy": list(self.strategy),
            "beliefs": list(self.beliefs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ObservedResponse":
        return cls(
            session_id=str(d["session_id"]),
            protocol=GameProtocol.parse(d["protocol"]),
            payoffs=PayoffTuple.of(d["payoffs"]),
            strategy=tuple(d["strategy"]),
            beliefs=tuple(d["beliefs"]),
        )


@dataclass
class EstimationResult:
    theta: PreferenceParams
    lam: float
    log_likelihood: float
    standard_errors: dict[str, float] = field(default_factory=dict)
    replicates: int = 0
    converged: bool = True
    boundary: bool = False
    n_obs: int = 0
    failed_replicates: int = 0

    @property
    def params(self) -> dict[str, float]:
        return {"alpha": self.theta.alpha, "beta": self.theta.beta, "kappa": self.theta.kappa, "lambda": self.lam}

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "log_likelihood": self.log_likelihood,
            "standard_errors": self.standard_errors,
            "replicates": self.replicates,
            "failed_replicates": self.failed_replicates,
            "converged": self.converged,
            "boundary": self.boundary,
            "n_obs": self.n_obs,
        }


# --- design arrays -------------------------------------------------------------


@dataclass
class Design:
    feats: np.ndarray  # (N, K_MAX, 4): own, mirrored own, envy, guilt
    valid: np.ndarray  # (N, K_MAX) bool
    chosen: np.ndarray  # (N,) index into the pure-strategy list
    sessions: np.ndarray  # (N,) session labels

    def take(self, idx: np.ndarray) -> "Design":
        return Design(self.feats[idx], self.valid[idx], self.chosen[idx], self.sessions[idx])

    def __len__(self) -> int:
        return len(self.chosen)


def build_design(data: Sequence[ObservedResponse]) -> Design:
    if not data:
        raise ValueError("no responses")
    n = len(data)
    feats = np.zeros((n, K_MAX, 4))
    valid = np.zeros((n, K_MAX), dtype=bool)
    chosen = np.empty(n, dtype=int)
    cache: dict = {}
    for i, r in enumerate(data):
        key = (r.protocol, r.payoffs, r.beliefs)
        if key not in cache:
            cache[key] = strategy_features(r.beliefs, r.payoffs, r.protocol)[:, :4]
        f = cache[key]
        k = len(f)
        feats[i, :k] = f
        valid[i, :k] = True
        try:
            chosen[i] = pure_strategies(r.protocol).index(r.strategy)
        except ValueError:
            raise ValueError(f"strategy {r.strategy} not in the {r.protocol.value} pure set") from None
    sessions = np.array([r.session_id for r in data], dtype=object)
    return Design(feats, valid, chosen, sessions)


def _obs_loglik(vec: np.ndarray, d: Design) -> np.ndarray:
    alpha, beta, kappa, log_lam = vec
    f = d.feats
    u = f[..., 0] + kappa * (f[..., 1] - f[..., 0]) - alpha * f[..., 2] - beta * f[..., 3]
    z = np.where(d.valid, u / math.exp(log_lam), -np.inf)
    zmax = z.max(axis=1)
    lse = zmax + np.log(np.exp(z - zmax[:, None]).sum(axis=1))
    return z[np.arange(len(d)), d.chosen] - lse


def _neg_loglik(vec: np.ndarray, d: Design) -> float:
    value = float(np.sum(_obs_loglik(vec, d)))
    return -value if math.isfinite(value) else 1e300


def log_likelihood(data: Sequence[ObservedResponse], theta: PreferenceParams, lam: float) -> float:
    """Sum of log choice probabilities of the stated strategies under each
    respondent's own beliefs. Independent of the order of ``data``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    ordered = sorted(data, key=lambda r: json.dumps(r.to_dict(), sort_keys=True))
    d = build_design(ordered)
    terms = _obs_loglik(np.array([theta.alpha, theta.beta, theta.kappa, math.log(lam)]), d)
    return math.fsum(terms.tolist())


# --- fitting -----------------------------------------------------------------


def _nelder_mead(d: Design, start: np.ndarray, max_iter: int):
    opts = {"xatol": 1e-6, "fatol": 1e-8, "maxiter": max_iter, "maxfev": 2 * max_iter}
    res = minimize(_neg_loglik, start, args=(d,), method="Nelder-Mead", options=opts)
    # one restart from the reported optimum guards against simplex collapse
    res2 = minimize(_neg_loglik, res.x, args=(d,), method="Nelder-Mead", options=opts)
    best = res2 if res2.fun <= res.fun else res
    return best.x, best.fun, bool(res.success and res2.success)


def _fit_design(d: Design, inits: Iterable[np.ndarray], max_iter: int):
    best = None
    for start in inits:
        x, fun, ok = _nelder_mead(d, np.asarray(start, dtype=float), max_iter)
        if best is None or fun < best[1]:
            best = (x, fun, ok)
    return best


def _result_from(x: np.ndarray, loglik: float, converged: bool, n: int) -> EstimationResult:
    lam = math.exp(x[3])
    # a log likelihood at zero means the choices are perfectly separated
    boundary = bool(lam < 1e-3 or lam > 1e4 or np.any(np.abs(x[:3]) > 1e3) or loglik > -1e-9)
    return EstimationResult(
        theta=PreferenceParams(float(x[0]), float(x[1]), float(x[2])),
        lam=lam,
        log_likelihood=float(loglik),
        converged=converged,
        boundary=boundary,
        n_obs=n,
    )


def fit_mle(
    data: Sequence[ObservedResponse],
    init: Sequence[float] | None = None,
    restarts: int = 8,
    seed: int = 0,
    max_iter: int = 20000,
) -> EstimationResult:
    """Maximize the pooled log likelihood over (alpha, beta, kappa, log lambda).

    ``init`` is given on the natural scale (alpha, beta, kappa, lambda).
    The first run starts at ``init``; the remaining ``restarts - 1`` runs
    start from jittered copies of it. The best run is returned.
    """
    scenarios = {(r.protocol, r.payoffs) for r in data}
    if len(scenarios) < 2:
        raise ValueError("data must span at least two distinct scenarios")
    d = build_design(list(data))
    if init is None:
        start = np.array(DEFAULT_INIT)
    else:
        a, b, k, lam = init
        start = np.array([a, b, k, math.log(lam)])
    rng = np.random.default_rng(seed)
    inits = [start] + [start + rng.normal(0.0, JITTER) for _ in range(max(restarts, 1) - 1)]
    x, fun, ok = _fit_design(d, inits, max_iter)
    result = _result_from(x, -fun, ok, len(d))
    if not ok:
        log.warning("likelihood maximization hit the iteration cap; best point returned")
    if result.boundary:
        log.warning("fit is at or near the parameter boundary (lambda=%.3g)", result.lam)
    return result


# --- block bootstrap -----------------------------------------------------------


@dataclass
class BootstrapResult:
    standard_errors: dict[str, float]
    estimates: np.ndarray  # (successful replicates, 4) on the natural scale
    replicates: int
    failed: int


def _replicate(args) -> np.ndarray | None:
    d, blocks, n_draw, child_seed, start, max_iter = args
    rng = np.random.default_rng(child_seed)
    picks = rng.integers(0, len(blocks), size=n_draw)
    idx = np.concatenate([blocks[i] for i in picks])
    try:
        x, fun, _ = _fit_design(d.take(idx), [start], max_iter)
    except Exception as exc:  # recorded as a failed replicate
        log.warning("bootstrap replicate failed: %s", exc)
        return None
    if not np.all(np.isfinite(x)) or fun >= 1e300:
        return None
    out = x.copy()
    out[3] = math.exp(x[3])
    return out


def block_bootstrap(
    data: Sequence[ObservedResponse],
    replicates: int = 300,
    seed: int = 0,
    n_blocks: int | None = None,
    init: Sequence[float] | None = None,
    max_iter: int = 20000,
    workers: int = 1,
) -> BootstrapResult:
    """Standard errors from resampling whole sessions with replacement.

    Each replicate draws ``n_blocks`` sessions (default: the number of
    sessions in ``data``) and refits from ``init`` (default: the full-sample
    estimate). Standard errors are the across-replicate standard deviations.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    d = build_design(list(data))
    labels = sorted(set(d.sessions.tolist()), key=str)
    blocks = [np.flatnonzero(d.sessions == s) for s in labels]
    n_draw = n_blocks or len(blocks)
    if init is None:
        full = fit_mle(data)
        init = (full.theta.alpha, full.theta.beta, full.theta.kappa, full.lam)
    a, b, k, lam = init
    start = np.array([a, b, k, math.log(lam)])
    seeds = np.random.SeedSequence(seed).spawn(replicates)
    jobs = [(d, blocks, n_draw, s, start, max_iter) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_replicate, jobs))
    else:
        outs = [_replicate(j) for j in jobs]
    good = [o for o in outs if o is not None]
    failed = len(outs) - len(good)
    est = np.array(good).reshape(-1, 4)
    if len(good) < 2:
        warnings.warn("fewer than two successful bootstrap replicates; standard errors set to 0")
        se = np.zeros(4)
    else:
        se = est.std(axis=0, ddof=1)
    return BootstrapResult(dict(zip(PARAM_NAMES, se.tolist())), est, replicates, failed)


def estimate(
    data: Sequence[ObservedResponse],
    replicates: int = 300,
    seed: int = 0,
    restarts: int = 8,
    n_blocks: int | None = None,
    workers: int = 1,
) -> EstimationResult:
    """Point estimate plus bootstrap standard errors."""
    result = fit_mle(data, restarts=restarts, seed=seed)
    if replicates > 0:
        boot = block_bootstrap(
            data,
            replicates=replicates,
            seed=seed,
            n_blocks=n_blocks,
            init=(result.theta.alpha, result.theta.beta, result.theta.kappa, result.lam),
            workers=workers,
        )
        result.standard_errors = boot.standard_errors
        result.replicates = boot.replicates
        result.failed_replicates = boot.failed
    return result


# --- simulation and IO ---------------------------------------------------------


def simulate_responses(
    scenarios: Sequence[tuple[GameProtocol, PayoffTuple, Sequence[float]]],
    theta: PreferenceParams,
    lam: float,
    sessions: int,
    seed: int = 0,
) -> list[ObservedResponse]:
    """Draw logit choices for every scenario in every session.

    Each scenario carries the beliefs the simulated respondent states.
    """
    from .preferences import choice_probabilities

    rng = np.random.default_rng(seed)
    probs = [choice_probabilities(b, pay, proto, theta, lam) for proto, pay, b in scenarios]
    out = []
    for s in range(sessions):
        sid = f"s{s:04d}"
        for (proto, pay, b), p in zip(scenarios, probs):
            k = rng.choice(len(p), p=p)
            out.append(ObservedResponse(sid, proto, pay, pure_strategies(proto)[k], tuple(b)))
    return out


def read_responses(path: str | Path) -> list[ObservedResponse]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(ObservedResponse.from_dict(json.loads(line)))
    return out


def write_responses(path: str | Path, data: Iterable[ObservedResponse]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in data:
            fh.write(json.dumps(r.to_dict()) + "\n")
