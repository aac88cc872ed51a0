"""Language-model backend abstraction.

One wire shape (the common chat-completions JSON schema) over HTTP for
live use, plus a deterministic scripted mock for tests. Engine code
treats every failure as BackendFailure and falls back to the rule paths.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Callable, Optional, Protocol

import requests

ENDPOINT_ENV = "BARGAIN_LLM_ENDPOINT"
API_KEY_ENV = "BARGAIN_LLM_API_KEY"
MODEL_ENV = "BARGAIN_LLM_MODEL"

RETRY_BASE_DELAY = 0.5
RETRY_FACTOR = 2.0
MAX_ATTEMPTS = 3
RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class BackendFailure(Exception):
    """Any backend problem the engine should degrade around."""


class BackendTimeout(BackendFailure):
    pass


class TransportError(BackendFailure):
    pass


class ProviderError(BackendFailure):
    def __init__(self, status: int, body_excerpt: str):
        self.status = status
        self.body_excerpt = body_excerpt
        super().__init__(f"provider returned {status}: {body_excerpt[:200]}")


@dataclass(frozen=True)
class BackendRequest:
    messages: tuple[dict[str, str], ...]
    temperature: float = 0.7
    max_tokens: int = 512
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[0]["role"] not in ("system", "user"):
            raise ValueError("first message must be system or user")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class BackendResponse:
    text: str
    latency: float
    token_counts: Optional[dict[str, int]] = None


class Backend(Protocol):
    def complete(self, request: BackendRequest) -> BackendResponse: ...


def simple_request(system: str, user: str, temperature: float = 0.7) -> BackendRequest:
    return BackendRequest(
        messages=(
            {"role": "system", "content": system},
            {"role": "user", "content": user},
        ),
        temperature=temperature,
    )


class MockBackend:
    """Scripted backend: each call pops the next line, wrapping around.

    The call log is retained so tests can assert on call counts and
    prompt contents.
    """

    def __init__(self, lines: list[str]):
        if not lines:
            raise ValueError("script must be non-empty")
        self.lines = list(lines)
        self.calls: list[BackendRequest] = []

    def complete(self, request: BackendRequest) -> BackendResponse:
        self.calls.append(request)
        text = self.lines[(len(self.calls) - 1) % len(self.lines)]
        return BackendResponse(text=text, latency=0.0)


def mock_from_script(lines: list[str]) -> MockBackend:
    return MockBackend(lines)


class FailingBackend:
    """Raises on every call; exercises fallback paths."""

    def __init__(self, error: Optional[BackendFailure] = None):
        self.error = error or BackendFailure("scripted failure")
        self.calls = 0

    def complete(self, request: BackendRequest) -> BackendResponse:
        self.calls += 1
        raise self.error


@dataclass
class HttpBackendConfig:
    endpoint: str
    api_key: str = ""
    model: str = "default"

    @classmethod
    def from_env(cls) -> Optional["HttpBackendConfig"]:
        endpoint = os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            return None
        return cls(
            endpoint=endpoint,
            api_key=os.environ.get(API_KEY_ENV, ""),
            model=os.environ.get(MODEL_ENV, "default"),
        )


class HttpBackend:
    """JSON-over-HTTP chat-completions client with retry/backoff.

    Retries transport errors and 5xx/429 responses with exponential
    backoff (base 500 ms, factor 2, at most 3 attempts). Error messages
    never include the credential.
    """

    def __init__(
        self,
        config: HttpBackendConfig,
        session: Optional[requests.Session] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self._session = session or requests.Session()
        self._sleep = sleep

    def complete(self, request: BackendRequest) -> BackendResponse:
        payload = {
            "model": self.config.model,
            "messages": list(request.messages),
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"

        started = time.monotonic()
        last_error: BackendFailure = TransportError("no attempt made")
        for attempt in range(MAX_ATTEMPTS):
            if attempt:
                self._sleep(RETRY_BASE_DELAY * RETRY_FACTOR ** (attempt - 1))
            try:
                response = self._session.post(
                    self.config.endpoint,
                    json=payload,
                    headers=headers,
                    timeout=request.timeout,
                )
            except requests.Timeout:
                last_error = BackendTimeout(f"timeout after {request.timeout}s")
                continue
            except requests.RequestException as exc:
                last_error = TransportError(type(exc).__name__)
                continue
            if response.status_code in RETRYABLE_STATUS:
                last_error = ProviderError(response.status_code, response.text[:200])
                continue
            if response.status_code != 200:
                raise ProviderError(response.status_code, response.text[:200])
            try:
                body = response.json()
                text = body["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ProviderError(200, f"malformed completion body: {exc}") from exc
            usage = body.get("usage") or {}
            token_counts = None
            if "prompt_tokens" in usage or "completion_tokens" in usage:
                token_counts = {
                    "prompt": int(usage.get("prompt_tokens", 0)),
                    "completion": int(usage.get("completion_tokens", 0)),
                }
            return BackendResponse(
                text=text,
                latency=time.monotonic() - started,
                token_counts=token_counts,
            )
        raise last_error


def backend_from_env() -> Optional[HttpBackend]:
    config = HttpBackendConfig.from_env()
    return HttpBackend(config) if config else None
