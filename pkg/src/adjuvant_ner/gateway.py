"""Dispatch rendered prompts to a chat-completion backend.

Responsibilities:
- carry the decoding setup (temperature 0.0001, 100-token cap by default);
- key every response by a digest of the prompt and the decoding parameters;
- append live responses to an append-only replay store and replay them
  bit-identically afterwards;
- bound in-flight requests and preserve input order in batch dispatch.

Environment for the live backend: ``ADJNER_API_BASE`` (chat-completion
endpoint base URL) and ``ADJNER_API_KEY``.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

import httpx

from .errors import AuthError, BackendMismatch, RateLimited, TransportError
from .prompts import PromptBundle

DEFAULT_TEMPERATURE = 0.0001
DEFAULT_MAX_TOKENS = 100


class BackendKind(str, Enum):
    LIVE = "live"
    REPLAY = "replay"
    MOCK = "mock"


@dataclass(frozen=True, slots=True)
class ModelParams:
    model_name: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    request_timeout: float = 60.0
    max_retries: int = 3

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")

    def identity(self) -> dict[str, object]:
        # Only fields that change the response belong in the cache key;
        # transport settings (timeout, retries) do not.
        return {
            "model_name": self.model_name,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }


@dataclass(frozen=True, slots=True)
class RawResponse:
    text: str
    backend: BackendKind
    cache_key: str
    latency: float
    truncated: bool = False


def cache_key(prompt: str, params: ModelParams) -> str:
    canonical = json.dumps(params.identity(), sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256()
    digest.update(prompt.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(canonical.encode("utf-8"))
    return digest.hexdigest()


class ReplayStore:
    """Append-only JSONL store of (cache_key, params, response text) records."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: dict[str, dict] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        record = json.loads(line)
                        self._records[record["cache_key"]] = record

    def __len__(self) -> int:
        return len(self._records)

    def get(self, key: str) -> dict | None:
        return self._records.get(key)

    def records(self) -> list[dict]:
        return list(self._records.values())

    def append(
        self,
        key: str,
        params: ModelParams,
        text: str,
        truncated: bool = False,
        target_id: str | None = None,
    ) -> None:
        record = {
            "cache_key": key,
            "params": params.identity(),
            "text": text,
            "truncated": truncated,
            "target_id": target_id,
        }
        with self._lock:
            self._records[key] = record
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())


class MockBackend:
    """Scripted backend for tests and offline smoke runs.

    ``script`` maps target ids to response text or an exception to raise;
    unscripted targets fall back to a deterministic synthesized response.
    """

    kind = BackendKind.MOCK

    def __init__(self, script: dict[str, str | Exception] | None = None):
        self.script = script or {}

    def _synthesize(self, bundle: PromptBundle) -> str:
        lines = []
        head = bundle.text.rsplit("\n", 1)[-1]
        marker = f"{bundle.target_id}\t"
        if head.startswith(marker):
            for label in ("Substances: ", "Interventions: "):
                at = head.find(label)
                if at >= 0:
                    first = head[at + len(label):].rstrip(".").split(",")[0].strip()
                    if first:
                        lines.append(f"{bundle.target_id}\t{first}")
                    break
        lines.append("Done")
        return "\n".join(lines)

    def complete(self, bundle: PromptBundle, params: ModelParams) -> RawResponse:
        start = time.monotonic()
        scripted = self.script.get(bundle.target_id)
        if isinstance(scripted, Exception):
            raise scripted
        text = scripted if scripted is not None else self._synthesize(bundle)
        return RawResponse(
            text=text,
            backend=self.kind,
            cache_key=cache_key(bundle.text, params),
            latency=time.monotonic() - start,
        )


class ReplayBackend:
    """Replays a frozen store; unseen prompts are a hard error."""

    kind = BackendKind.REPLAY

    def __init__(self, store: ReplayStore):
        self.store = store

    def complete(self, bundle: PromptBundle, params: ModelParams) -> RawResponse:
        key = cache_key(bundle.text, params)
        record = self.store.get(key)
        if record is None:
            raise BackendMismatch(f"no replay record for {bundle.target_id} (key {key[:12]}…)")
        return RawResponse(
            text=record["text"],
            backend=self.kind,
            cache_key=key,
            latency=0.0,
            truncated=bool(record.get("truncated", False)),
        )


class LiveBackend:
    """HTTP chat-completion backend with retries and replay-store recording."""

    kind = BackendKind.LIVE

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        store: ReplayStore | None = None,
        transport: httpx.BaseTransport | None = None,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.base_url = base_url or os.environ.get("ADJNER_API_BASE", "")
        self.api_key = api_key or os.environ.get("ADJNER_API_KEY", "")
        if not self.base_url:
            raise TransportError("no endpoint configured; set ADJNER_API_BASE")
        if not self.api_key:
            raise AuthError("no credential configured; set ADJNER_API_KEY")
        self.store = store
        self._sleep = sleeper
        self._client = httpx.Client(
            base_url=self.base_url,
            headers={"Authorization": f"Bearer {self.api_key}"},
            transport=transport,
        )

    def _post(self, bundle: PromptBundle, params: ModelParams) -> tuple[str, bool]:
        payload = {
            "model": params.model_name,
            "messages": [{"role": "user", "content": bundle.text}],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        attempts = params.max_retries + 1
        backoff = 1.0
        last_error: Exception | None = None
        throttled = False
        for attempt in range(attempts):
            if attempt:
                self._sleep(backoff)
                backoff *= 2
            try:
                response = self._client.post(
                    "/chat/completions", json=payload, timeout=params.request_timeout
                )
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code in (401, 403):
                raise AuthError(f"backend rejected credential (HTTP {response.status_code})")
            if response.status_code == 429:
                throttled = True
                last_error = TransportError("throttled (HTTP 429)")
                continue
            if response.status_code >= 500:
                last_error = TransportError(f"backend failure (HTTP {response.status_code})")
                continue
            body = response.json()
            choice = body["choices"][0]
            return choice["message"]["content"], choice.get("finish_reason") == "length"
        if throttled:
            raise RateLimited(f"retry budget exhausted: {last_error}")
        raise TransportError(f"retry budget exhausted: {last_error}")

    def complete(self, bundle: PromptBundle, params: ModelParams) -> RawResponse:
        key = cache_key(bundle.text, params)
        start = time.monotonic()
        text, truncated = self._post(bundle, params)
        latency = time.monotonic() - start
        if self.store is not None:
            self.store.append(key, params, text, truncated=truncated, target_id=bundle.target_id)
        return RawResponse(
            text=text, backend=self.kind, cache_key=key, latency=latency, truncated=truncated
        )


Backend = MockBackend | ReplayBackend | LiveBackend


@dataclass(slots=True)
class BatchItem:
    index: int
    target_id: str
    response: RawResponse | None
    error: Exception | None


def complete(bundle: PromptBundle, params: ModelParams, backend: Backend) -> RawResponse:
    if not bundle.text:
        raise ValueError("empty prompt")
    return backend.complete(bundle, params)


def run_batch(
    bundles: Sequence[PromptBundle],
    params: ModelParams,
    backend: Backend,
    concurrency_limit: int = 1,
) -> list[BatchItem]:
    """Dispatch a batch, at most ``concurrency_limit`` in flight, results in input order."""
    if concurrency_limit < 1:
        raise ValueError("concurrency_limit must be >= 1")
    if not bundles:
        return []

    def one(indexed: tuple[int, PromptBundle]) -> BatchItem:
        index, bundle = indexed
        try:
            return BatchItem(index, bundle.target_id, complete(bundle, params, backend), None)
        except Exception as exc:  # per-item failures never abort the batch
            return BatchItem(index, bundle.target_id, None, exc)

    with ThreadPoolExecutor(max_workers=concurrency_limit) as pool:
        return list(pool.map(one, enumerate(bundles)))
