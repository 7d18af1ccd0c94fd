"""Block-explorer client: verified source and metadata with caching,
token-bucket rate limiting and an offline fixture mode.

Resolution order is fixture dir, then local cache, then the live API.
With a fixture dir configured the transport is never touched, so test
corpora run fully offline.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import requests

from .ingest import normalize_address

API_KEY_ENV = "EVOCHAIN_EXPLORER_KEY"
METADATA_TTL_SECONDS = 24 * 3600
RETRY_ATTEMPTS = 3
RETRY_BACKOFF_START = 0.5


class TransientFailureError(RuntimeError):
    def __init__(self, message: str, attempts: list[str]):
        super().__init__(message)
        self.attempts = attempts


class ProtocolError(RuntimeError):
    """Upstream returned a body we cannot interpret."""


@dataclass
class ClientConfig:
    base_url: str = "https://api.etherscan.io/api"
    api_key: str = field(default_factory=lambda: os.environ.get(API_KEY_ENV, ""))
    max_requests_per_second: float = 4.0
    cache_dir: Optional[str] = None
    offline_fixture_dir: Optional[str] = None


@dataclass
class SourceBundle:
    address: str
    verified: bool
    source_text: str
    compiler_version: str
    contract_name: str
    fetched_at: int
    origin: str  # live | cache | fixture

    def to_dict(self) -> dict:
        return {
            "address": self.address,
            "verified": self.verified,
            "source_text": self.source_text,
            "compiler_version": self.compiler_version,
            "contract_name": self.contract_name,
            "fetched_at": self.fetched_at,
            "origin": self.origin,
        }


class TokenBucket:
    """Blocking rate limiter; requests queue, none are dropped."""

    def __init__(self, rate_per_second: float,
                 clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        if rate_per_second <= 0:
            raise ValueError("rate must be positive")
        self._interval = 1.0 / rate_per_second
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_free = None

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            if self._next_free is None or now >= self._next_free:
                self._next_free = now + self._interval
                return
            wait = self._next_free - now
            self._next_free += self._interval
        self._sleep(wait)


def _http_transport(url: str, params: dict) -> dict:
    response = requests.get(url, params=params, timeout=30)
    response.raise_for_status()
    return response.json()


class ExplorerClient:
    def __init__(self, config: ClientConfig,
                 transport: Callable[[str, dict], dict] = _http_transport,
                 clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep,
                 wall_clock: Callable[[], float] = time.time):
        self.config = config
        self._transport = transport
        self._sleep = sleep
        self._wall_clock = wall_clock
        self._limiter = TokenBucket(config.max_requests_per_second, clock, sleep)
        self._lock = threading.Lock()
        self.live_requests = 0

    # -- public API --------------------------------------------------

    def fetch_verified_source(self, address: str) -> SourceBundle:
        address = normalize_address(address)
        fixture = self._fixture(address)
        if fixture is not None or self._offline:
            return self._bundle_from(fixture or {}, address, "fixture")
        cached = self._cache_read("source", address)
        if cached is not None:
            return self._bundle_from(cached, address, "cache")
        result = self._request({"module": "contract", "action": "getsourcecode",
                                "address": address})
        bundle = self._parse_source_response(result, address)
        self._cache_write("source", address, bundle.to_dict())
        return bundle

    def fetch_metadata(self, address: str) -> dict:
        address = normalize_address(address)
        fixture = self._fixture(address)
        if fixture is not None or self._offline:
            fixture = fixture or {}
            return {"first_tx_timestamp": fixture.get("first_tx_timestamp"),
                    "tx_count": fixture.get("tx_count")}
        cached = self._cache_read("metadata", address, ttl=METADATA_TTL_SECONDS)
        if cached is not None:
            return {"first_tx_timestamp": cached.get("first_tx_timestamp"),
                    "tx_count": cached.get("tx_count")}
        result = self._request({"module": "contract", "action": "getcontractmetadata",
                                "address": address})
        if not isinstance(result, dict):
            raise ProtocolError(f"metadata response is not an object: {result!r}")
        payload = result.get("result") or {}
        if isinstance(payload, list):
            payload = payload[0] if payload else {}
        meta = {"first_tx_timestamp": payload.get("first_tx_timestamp"),
                "tx_count": payload.get("tx_count"),
                "fetched_at": int(self._wall_clock())}
        self._cache_write("metadata", address, meta)
        return {"first_tx_timestamp": meta["first_tx_timestamp"],
                "tx_count": meta["tx_count"]}

    # -- resolution layers -------------------------------------------

    @property
    def _offline(self) -> bool:
        return self.config.offline_fixture_dir is not None

    def _fixture(self, address: str) -> Optional[dict]:
        if not self._offline:
            return None
        path = Path(self.config.offline_fixture_dir) / f"{address}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def _bundle_from(self, obj: dict, address: str, origin: str) -> SourceBundle:
        verified = bool(obj.get("verified", bool(obj.get("source_text"))))
        source = obj.get("source_text", "") if verified else ""
        return SourceBundle(
            address=address,
            verified=verified and bool(source),
            source_text=source,
            compiler_version=obj.get("compiler_version", ""),
            contract_name=obj.get("contract_name", ""),
            fetched_at=int(obj.get("fetched_at") or self._wall_clock()),
            origin=origin,
        )

    def _cache_path(self, section: str, address: str) -> Optional[Path]:
        if not self.config.cache_dir:
            return None
        return Path(self.config.cache_dir) / section / f"{address}.json"

    def _cache_read(self, section: str, address: str,
                    ttl: Optional[int] = None) -> Optional[dict]:
        path = self._cache_path(section, address)
        if path is None or not path.exists():
            return None
        obj = json.loads(path.read_text(encoding="utf-8"))
        if ttl is not None:
            fetched = obj.get("fetched_at", 0)
            if self._wall_clock() - fetched > ttl:
                return None
        return obj

    def _cache_write(self, section: str, address: str, obj: dict) -> None:
        path = self._cache_path(section, address)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(obj, sort_keys=True), encoding="utf-8")

    # -- live transport ----------------------------------------------

    def _request(self, params: dict) -> dict:
        params = dict(params)
        if self.config.api_key:
            params["apikey"] = self.config.api_key
        attempts: list[str] = []
        backoff = RETRY_BACKOFF_START
        for attempt in range(1, RETRY_ATTEMPTS + 1):
            self._limiter.acquire()
            try:
                with self._lock:
                    self.live_requests += 1
                return self._transport(self.config.base_url, params)
            except (requests.RequestException, ConnectionError, OSError) as exc:
                attempts.append(f"attempt {attempt}: {exc}")
                if attempt < RETRY_ATTEMPTS:
                    self._sleep(backoff)
                    backoff *= 2
        raise TransientFailureError(
            f"explorer request failed after {RETRY_ATTEMPTS} attempts", attempts)

    def _parse_source_response(self, result, address: str) -> SourceBundle:
        if not isinstance(result, dict) or "result" not in result:
            raise ProtocolError(f"unexpected response shape: {result!r}")
        payload = result["result"]
        if isinstance(payload, list):
            payload = payload[0] if payload else {}
        if not isinstance(payload, dict):
            raise ProtocolError(f"unexpected result payload: {payload!r}")
        source, file_count = _flatten_source(payload.get("SourceCode", ""))
        bundle = SourceBundle(
            address=address,
            verified=bool(source),
            source_text=source,
            compiler_version=payload.get("CompilerVersion", ""),
            contract_name=payload.get("ContractName", ""),
            fetched_at=int(self._wall_clock()),
            origin="live",
        )
        return bundle


def _flatten_source(raw: str) -> tuple[str, int]:
    """Concatenate multi-file verified sources with path-comment separators."""
    if not raw:
        return "", 0
    text = raw.strip()
    # Etherscan wraps multi-file JSON in an extra brace pair.
    if text.startswith("{{") and text.endswith("}}"):
        text = text[1:-1]
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            return raw, 1
        sources = obj.get("sources", obj) if isinstance(obj, dict) else {}
        parts = []
        for path in sorted(sources):
            entry = sources[path]
            content = entry.get("content", "") if isinstance(entry, dict) else str(entry)
            parts.append(f"// File: {path}\n{content}")
        if parts:
            return "\n\n".join(parts), len(parts)
    return raw, 1
