"""Chat-completion HTTP client with retries, bounded concurrency and an audit log."""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from typing import Callable

import httpx

from .base import AgentRequest

log = logging.getLogger(__name__)

RETRY_STATUS = frozenset({408, 409, 429, 500, 502, 503, 504})


class CompletionError(RuntimeError):
    pass


class AuthFailure(CompletionError):
    pass


class ExhaustedRetries(CompletionError):
    pass


class CompletionTimeout(CompletionError):
    pass


@dataclass(frozen=True)
class CompletionConfig:
    model_name: str
    base_url: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"
    temperature: float = 1.0
    top_p: float = 1.0
    max_output_length: int | None = None
    timeout: float = 60.0
    max_retries: int = 5
    concurrency_limit: int = 4
    backoff_base: float = 1.0
    backoff_cap: float = 30.0
    audit_log: str | None = None

    def __post_init__(self):
        if self.max_retries < 0 or self.concurrency_limit < 1:
            raise ValueError("max_retries must be >= 0 and concurrency_limit >= 1")


class ChatCompletionClient:
    """Agent backend speaking the common ``/chat/completions`` schema.

    The credential is read from the environment when the client is built
    and only ever placed in the Authorization header.
    """

    def __init__(self, config: CompletionConfig, transport: httpx.BaseTransport | None = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.config = config
        key = os.environ.get(config.api_key_env, "")
        if not key:
            raise AuthFailure(f"environment variable {config.api_key_env} is not set")
        self._http = httpx.Client(
            base_url=config.base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {key}"},
            timeout=config.timeout,
            transport=transport,
        )
        self._sem = threading.BoundedSemaphore(config.concurrency_limit)
        self._audit_lock = threading.Lock()
        self._sleep = sleep

    @property
    def concurrency_limit(self) -> int:
        return self.config.concurrency_limit

    def close(self) -> None:
        self._http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _payload(self, request: AgentRequest) -> dict:
        body = {
            "model": self.config.model_name,
            "messages": [t.to_dict() for t in request.messages],
            "temperature": self.config.temperature,
            "top_p": self.config.top_p,
        }
        cap = request.max_output_length or self.config.max_output_length
        if cap is not None:
            body["max_tokens"] = cap
        return body

    def _audit(self, record: dict) -> None:
        if not self.config.audit_log:
            return
        line = json.dumps(record, ensure_ascii=False)
        with self._audit_lock:
            with open(self.config.audit_log, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def _delay(self, attempt: int, response: httpx.Response | None) -> float:
        if response is not None:
            retry_after = response.headers.get("retry-after")
            if retry_after:
                try:
                    return min(float(retry_after), self.config.backoff_cap)
                except ValueError:
                    pass
        return min(self.config.backoff_base * 2**attempt, self.config.backoff_cap)

    def respond(self, request: AgentRequest) -> str:
        payload = self._payload(request)
        with self._sem:
            return self._send(payload, request.task)

    def _send(self, payload: dict, task: str) -> str:
        last = ""
        for attempt in range(self.config.max_retries + 1):
            started = time.time()
            response = None
            try:
                response = self._http.post("/chat/completions", json=payload)
            except httpx.TimeoutException as exc:
                last = f"timeout: {exc}"
                self._audit({"task": task, "attempt": attempt, "request": payload, "error": last})
                if attempt == self.config.max_retries:
                    raise CompletionTimeout(last) from None
            except httpx.TransportError as exc:
                last = f"transport error: {exc}"
                self._audit({"task": task, "attempt": attempt, "request": payload, "error": last})
            else:
                record = {
                    "task": task,
                    "attempt": attempt,
                    "request": payload,
                    "status": response.status_code,
                    "elapsed": round(time.time() - started, 3),
                }
                if response.status_code in (401, 403):
                    self._audit({**record, "error": "authentication rejected"})
                    raise AuthFailure(f"endpoint rejected the credential (HTTP {response.status_code})")
                if response.status_code == 200:
                    text = _content(response)
                    self._audit({**record, "response": text})
                    return text
                last = f"HTTP {response.status_code}"
                self._audit({**record, "error": last, "body": response.text[:2000]})
                if response.status_code not in RETRY_STATUS:
                    raise CompletionError(f"{last}: {response.text[:200]}")
            if attempt < self.config.max_retries:
                wait = self._delay(attempt, response)
                log.info("retrying after %s (attempt %d, waiting %.2fs)", last, attempt + 1, wait)
                self._sleep(wait)
        raise ExhaustedRetries(f"gave up after {self.config.max_retries + 1} attempts; last: {last}")


def _content(response: httpx.Response) -> str:
    try:
        return response.json()["choices"][0]["message"]["content"] or ""
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise CompletionError(f"malformed completion payload: {exc}") from None

