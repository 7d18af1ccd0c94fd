"""Embedded property graph of proxies, versions and observed changes.

Single-writer / multi-reader in-memory store with a canonical NDJSON
snapshot format: sorted sections (proxies, versions, changes) followed by
a sha256 checksum line. Equal stores produce byte-identical snapshots.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

from .ingest import normalize_address

PAGE_LIMIT_MAX = 500


class ReferentialIntegrityError(ValueError):
    """Edge endpoint does not exist."""


class SchemaError(ValueError):
    """Graph shape constraint violated."""


class CorruptSnapshotError(ValueError):
    """Snapshot file failed checksum or structural validation."""


@dataclass
class ProxyNode:
    address: str
    proxy_type: str
    created_at: int = 0
    total_versions: int = 0
    evidence: list[str] = field(default_factory=list)


@dataclass
class VersionNode:
    proxy: str
    version_number: int
    contract_address: str
    creation_timestamp: Optional[int] = None
    last_tx_timestamp: Optional[int] = None
    total_transactions: int = 0
    vulnerabilities: list[str] = field(default_factory=list)

    @property
    def key(self) -> tuple[str, int]:
        return (self.proxy, self.version_number)


@dataclass
class ObservedChangeEdge:
    proxy: str
    from_version: int
    to_version: int
    categories: list[str] = field(default_factory=list)
    evidence: list[str] = field(default_factory=list)


@dataclass
class Lineage:
    found: bool
    proxy: Optional[ProxyNode]
    items: list[tuple[VersionNode, Optional[ObservedChangeEdge]]]


class GraphStore:
    def __init__(self):
        self._lock = threading.RLock()
        self._proxies: dict[str, ProxyNode] = {}
        self._versions: dict[tuple[str, int], VersionNode] = {}
        self._changes: dict[tuple[str, int], ObservedChangeEdge] = {}

    # -- writes ------------------------------------------------------

    def upsert_proxy(self, node: ProxyNode) -> str:
        node.address = normalize_address(node.address)
        with self._lock:
            node.total_versions = self._version_count(node.address)
            self._proxies[node.address] = node
        return node.address

    def upsert_version(self, node: VersionNode, implements_from: str) -> tuple[str, int]:
        node.proxy = normalize_address(implements_from)
        node.contract_address = normalize_address(node.contract_address)
        if node.version_number < 1:
            raise SchemaError(f"version_number must be >= 1, got {node.version_number}")
        with self._lock:
            proxy = self._proxies.get(node.proxy)
            if proxy is None:
                raise ReferentialIntegrityError(
                    f"IMPLEMENTS edge references unknown proxy {node.proxy}")
            self._versions[node.key] = node
            proxy.total_versions = self._version_count(node.proxy)
        return node.key

    def upsert_change(self, edge: ObservedChangeEdge) -> tuple[str, int]:
        edge.proxy = normalize_address(edge.proxy)
        if edge.to_version != edge.from_version + 1:
            raise SchemaError(
                f"OBSERVED_CHANGE must connect consecutive versions, got "
                f"{edge.from_version} -> {edge.to_version}")
        with self._lock:
            for v in (edge.from_version, edge.to_version):
                if (edge.proxy, v) not in self._versions:
                    raise ReferentialIntegrityError(
                        f"OBSERVED_CHANGE references unknown version ({edge.proxy}, {v})")
            self._changes[(edge.proxy, edge.from_version)] = edge
        return (edge.proxy, edge.from_version)

    def _version_count(self, proxy: str) -> int:
        return sum(1 for key in self._versions if key[0] == proxy)

    # -- queries -----------------------------------------------------

    def get_proxy(self, address: str) -> Optional[ProxyNode]:
        with self._lock:
            return self._proxies.get(normalize_address(address))

    def get_lineage(self, proxy: str) -> Lineage:
        proxy = normalize_address(proxy)
        with self._lock:
            node = self._proxies.get(proxy)
            if node is None:
                return Lineage(found=False, proxy=None, items=[])
            versions = sorted(
                (v for k, v in self._versions.items() if k[0] == proxy),
                key=lambda v: v.version_number)
            items = []
            for v in versions:
                incoming = self._changes.get((proxy, v.version_number - 1))
                items.append((v, incoming))
            return Lineage(found=True, proxy=node, items=items)

    def find(self, proxy_type: Optional[str] = None,
             min_versions: Optional[int] = None,
             vulnerability: Optional[str] = None,
             address_prefix: Optional[str] = None,
             limit: int = 50, offset: int = 0) -> tuple[list[ProxyNode], int]:
        """Conjunctive filtered page of proxies, ordered by address."""
        if not 1 <= limit <= PAGE_LIMIT_MAX:
            raise ValueError(f"limit must be in [1, {PAGE_LIMIT_MAX}], got {limit}")
        if offset < 0:
            raise ValueError(f"offset must be >= 0, got {offset}")
        prefix = None
        if address_prefix:
            prefix = address_prefix.lower()
            if not prefix.startswith("0x"):
                prefix = "0x" + prefix
        with self._lock:
            matches = []
            for address in sorted(self._proxies):
                node = self._proxies[address]
                if proxy_type is not None and node.proxy_type != proxy_type:
                    continue
                if min_versions is not None and node.total_versions < min_versions:
                    continue
                if prefix is not None and not address.startswith(prefix):
                    continue
                if vulnerability is not None and not self._has_vulnerability(address, vulnerability):
                    continue
                matches.append(node)
            return matches[offset:offset + limit], len(matches)

    def _has_vulnerability(self, proxy: str, category: str) -> bool:
        return any(category in v.vulnerabilities
                   for k, v in self._versions.items() if k[0] == proxy)

    def stats(self) -> dict:
        with self._lock:
            by_type: dict[str, int] = {}
            for node in self._proxies.values():
                by_type[node.proxy_type] = by_type.get(node.proxy_type, 0) + 1
            return {
                "proxy_count": len(self._proxies),
                "version_count": len(self._versions),
                "edge_counts": {
                    "implements": len(self._versions),
                    "observed_change": len(self._changes),
                },
                "by_type": dict(sorted(by_type.items())),
            }

    def audit(self) -> list[dict]:
        """Full-store referential and shape audit; returns violations."""
        problems = []
        with self._lock:
            for key, version in self._versions.items():
                if version.proxy not in self._proxies:
                    problems.append({"kind": "dangling-implements", "key": list(key)})
            for key, change in self._changes.items():
                for v in (change.from_version, change.to_version):
                    if (change.proxy, v) not in self._versions:
                        problems.append({"kind": "dangling-change", "key": list(key)})
                if change.to_version != change.from_version + 1:
                    problems.append({"kind": "non-consecutive-change", "key": list(key)})
            for address, proxy in self._proxies.items():
                if proxy.total_versions != self._version_count(address):
                    problems.append({"kind": "version-count-mismatch", "key": [address]})
        return problems

    # -- persistence -------------------------------------------------

    def snapshot_bytes(self) -> bytes:
        with self._lock:
            lines = []
            for address in sorted(self._proxies):
                lines.append(json.dumps(
                    {"kind": "proxy", **asdict(self._proxies[address])},
                    sort_keys=True, separators=(",", ":")))
            for key in sorted(self._versions):
                lines.append(json.dumps(
                    {"kind": "version", **asdict(self._versions[key])},
                    sort_keys=True, separators=(",", ":")))
            for key in sorted(self._changes):
                lines.append(json.dumps(
                    {"kind": "change", **asdict(self._changes[key])},
                    sort_keys=True, separators=(",", ":")))
        body = "".join(line + "\n" for line in lines).encode("utf-8")
        checksum = hashlib.sha256(body).hexdigest()
        trailer = json.dumps({"kind": "checksum", "sha256": checksum},
                             sort_keys=True, separators=(",", ":"))
        return body + trailer.encode("utf-8") + b"\n"

    def snapshot(self, path) -> None:
        Path(path).write_bytes(self.snapshot_bytes())

    def digest(self) -> str:
        return hashlib.sha256(self.snapshot_bytes()).hexdigest()

    @classmethod
    def load(cls, path) -> "GraphStore":
        raw = Path(path).read_bytes()
        if not raw.endswith(b"\n"):
            raise CorruptSnapshotError("truncated snapshot: missing trailing newline")
        lines = raw.split(b"\n")
        lines.pop()
        if not lines:
            raise CorruptSnapshotError("empty snapshot file")
        try:
            trailer = json.loads(lines[-1])
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise CorruptSnapshotError(f"unreadable checksum line: {exc}") from None
        if not isinstance(trailer, dict) or trailer.get("kind") != "checksum":
            raise CorruptSnapshotError("missing checksum trailer")
        canonical = json.dumps(trailer, sort_keys=True, separators=(",", ":")).encode("utf-8")
        if canonical != lines[-1]:
            raise CorruptSnapshotError("non-canonical checksum line")
        body = b"".join(line + b"\n" for line in lines[:-1])
        actual = hashlib.sha256(body).hexdigest()
        if actual != trailer.get("sha256"):
            raise CorruptSnapshotError(
                f"checksum mismatch: recorded {trailer.get('sha256')}, actual {actual}")

        store = cls()
        for lineno, line in enumerate(lines[:-1], start=1):
            try:
                obj = json.loads(line)
                kind = obj.pop("kind")
            except (json.JSONDecodeError, UnicodeDecodeError, KeyError) as exc:
                raise CorruptSnapshotError(f"line {lineno}: {exc}") from None
            try:
                if kind == "proxy":
                    store.upsert_proxy(ProxyNode(**obj))
                elif kind == "version":
                    node = VersionNode(**obj)
                    store.upsert_version(node, node.proxy)
                elif kind == "change":
                    store.upsert_change(ObservedChangeEdge(**obj))
                else:
                    raise CorruptSnapshotError(f"line {lineno}: unknown kind {kind!r}")
            except (TypeError, ValueError) as exc:
                raise CorruptSnapshotError(f"line {lineno}: {exc}") from None
        problems = store.audit()
        if problems:
            raise CorruptSnapshotError(f"audit failed after load: {problems[:3]}")
        return store
