"""Parse blockchain ETL export files (NDJSON) into validated in-memory records.

Accepted kinds: event logs, contract creations, transaction summaries and
externally produced vulnerability findings. Field names mirror common
blockchain-ETL exports; unknown fields are ignored.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

_ADDRESS_RE = re.compile(r"^(0x)?[0-9a-fA-F]{40}$")
_SEVERITIES = {"low", "medium", "high"}

KINDS = ("logs", "creations", "transactions", "vuln_findings")


class ValidationError(ValueError):
    """A record or field failed validation."""


def normalize_address(text: str) -> str:
    """Canonicalize an address to lowercase 0x-prefixed form."""
    if not isinstance(text, str) or not _ADDRESS_RE.match(text):
        raise ValidationError(f"not a 20-byte hex address: {text!r}")
    body = text[2:] if text.lower().startswith("0x") else text
    return "0x" + body.lower()


def _parse_hex_bytes(value, expected_len: Optional[int] = None) -> bytes:
    if not isinstance(value, str):
        raise ValidationError(f"expected hex string, got {type(value).__name__}")
    body = value[2:] if value.lower().startswith("0x") else value
    if len(body) % 2:
        raise ValidationError(f"odd-length hex string: {value!r}")
    try:
        raw = bytes.fromhex(body)
    except ValueError:
        raise ValidationError(f"non-hex characters in {value!r}") from None
    if expected_len is not None and len(raw) != expected_len:
        raise ValidationError(f"expected {expected_len} bytes, got {len(raw)}: {value!r}")
    return raw


def _parse_nonneg_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        try:
            value = int(value)
        except (TypeError, ValueError):
            raise ValidationError(f"{name} is not an integer: {value!r}") from None
    if value < 0:
        raise ValidationError(f"{name} is negative: {value}")
    return value


@dataclass(frozen=True)
class LogRecord:
    address: str
    topics: tuple[bytes, ...]
    data: bytes
    block_number: int
    log_index: int
    tx_hash: bytes

    @property
    def key(self):
        return (self.block_number, self.log_index)


@dataclass(frozen=True)
class ContractCreation:
    address: str
    creator: str
    runtime_bytecode: bytes
    block_number: int
    block_timestamp: int
    tx_hash: bytes
    gas_used: int

    @property
    def key(self):
        return self.address


@dataclass(frozen=True)
class TxSummary:
    to: Optional[str]
    block_number: int
    block_timestamp: int
    tx_hash: bytes

    @property
    def key(self):
        return self.tx_hash


@dataclass(frozen=True)
class VulnFinding:
    address: str
    detector: str
    category: str
    severity: str
    source_location: str

    @property
    def key(self):
        return (self.address, self.detector, self.category, self.severity,
                self.source_location)


@dataclass
class IngestStats:
    records_read: int = 0
    records_accepted: int = 0
    records_rejected: int = 0
    first_error: Optional[str] = None


def _get(obj: dict, *names):
    for n in names:
        if n in obj and obj[n] is not None:
            return obj[n]
    return None


def _require(obj: dict, *names):
    value = _get(obj, *names)
    if value is None:
        raise ValidationError(f"missing field {names[0]!r}")
    return value


def parse_log(obj: dict) -> LogRecord:
    raw_topics = obj.get("topics") or []
    if not isinstance(raw_topics, list):
        raise ValidationError("topics is not a list")
    if len(raw_topics) > 4:
        raise ValidationError(f"too many topics: {len(raw_topics)}")
    topics = tuple(_parse_hex_bytes(t, 32) for t in raw_topics)
    return LogRecord(
        address=normalize_address(_require(obj, "address")),
        topics=topics,
        data=_parse_hex_bytes(obj.get("data") or "0x"),
        block_number=_parse_nonneg_int(_require(obj, "block_number"), "block_number"),
        log_index=_parse_nonneg_int(_require(obj, "log_index"), "log_index"),
        tx_hash=_parse_hex_bytes(_require(obj, "transaction_hash", "tx_hash"), 32),
    )


def parse_creation(obj: dict) -> ContractCreation:
    return ContractCreation(
        address=normalize_address(_require(obj, "address")),
        creator=normalize_address(_require(obj, "creator")),
        runtime_bytecode=_parse_hex_bytes(obj.get("bytecode") or "0x"),
        block_number=_parse_nonneg_int(_require(obj, "block_number"), "block_number"),
        block_timestamp=_parse_nonneg_int(_require(obj, "block_timestamp"), "block_timestamp"),
        tx_hash=_parse_hex_bytes(_require(obj, "transaction_hash", "tx_hash"), 32),
        gas_used=_parse_nonneg_int(obj.get("gas_used", 0), "gas_used"),
    )


def parse_transaction(obj: dict) -> TxSummary:
    to = _get(obj, "to_address", "to")
    return TxSummary(
        to=normalize_address(to) if to is not None else None,
        block_number=_parse_nonneg_int(_require(obj, "block_number"), "block_number"),
        block_timestamp=_parse_nonneg_int(_require(obj, "block_timestamp"), "block_timestamp"),
        tx_hash=_parse_hex_bytes(_require(obj, "transaction_hash", "hash", "tx_hash"), 32),
    )


def parse_vuln_finding(obj: dict) -> VulnFinding:
    severity = _require(obj, "severity")
    if severity not in _SEVERITIES:
        raise ValidationError(f"severity must be one of {sorted(_SEVERITIES)}: {severity!r}")
    return VulnFinding(
        address=normalize_address(_require(obj, "address")),
        detector=str(obj.get("detector", "")),
        category=str(_require(obj, "category")),
        severity=severity,
        source_location=str(obj.get("source_location", "")),
    )


_PARSERS = {
    "logs": parse_log,
    "creations": parse_creation,
    "transactions": parse_transaction,
    "vuln_findings": parse_vuln_finding,
}


def _canonical_record(record) -> dict:
    """JSON-safe canonical form, used for digests and dataset persistence."""
    if isinstance(record, LogRecord):
        return {
            "address": record.address,
            "topics": ["0x" + t.hex() for t in record.topics],
            "data": "0x" + record.data.hex(),
            "block_number": record.block_number,
            "log_index": record.log_index,
            "transaction_hash": "0x" + record.tx_hash.hex(),
        }
    if isinstance(record, ContractCreation):
        return {
            "address": record.address,
            "creator": record.creator,
            "bytecode": "0x" + record.runtime_bytecode.hex(),
            "block_number": record.block_number,
            "block_timestamp": record.block_timestamp,
            "transaction_hash": "0x" + record.tx_hash.hex(),
            "gas_used": record.gas_used,
        }
    if isinstance(record, TxSummary):
        return {
            "to_address": record.to,
            "block_number": record.block_number,
            "block_timestamp": record.block_timestamp,
            "transaction_hash": "0x" + record.tx_hash.hex(),
        }
    if isinstance(record, VulnFinding):
        return {
            "address": record.address,
            "detector": record.detector,
            "category": record.category,
            "severity": record.severity,
            "source_location": record.source_location,
        }
    raise TypeError(type(record))


class Dataset:
    """In-memory record sets keyed by primary key, one map per kind.

    Appends are synchronized so files may be ingested from worker threads;
    dataset_digest() and downstream handoff assume ingestion has finished.
    """

    def __init__(self):
        self._lock = threading.RLock()
        self.records: dict[str, dict] = {k: {} for k in KINDS}
        self.rejections: list[dict] = []

    def ingest_file(self, path, kind: str) -> IngestStats:
        if kind not in _PARSERS:
            raise ValueError(f"unknown kind {kind!r}")
        parser = _PARSERS[kind]
        stats = IngestStats()
        path = Path(path)
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                stats.records_read += 1
                try:
                    obj = json.loads(line)
                    if not isinstance(obj, dict):
                        raise ValidationError("line is not a JSON object")
                    record = parser(obj)
                except (ValidationError, json.JSONDecodeError) as exc:
                    self._reject(stats, path, lineno, str(exc))
                    continue
                with self._lock:
                    existing = self.records[kind].get(record.key)
                    if existing is not None:
                        if existing == record:
                            reason = "duplicate primary key (identical record)"
                        else:
                            reason = "duplicate primary key (first record wins)"
                        self._reject(stats, path, lineno, reason)
                        continue
                    self.records[kind][record.key] = record
                stats.records_accepted += 1
        return stats

    def _reject(self, stats: IngestStats, path: Path, lineno: int, reason: str):
        stats.records_rejected += 1
        if stats.first_error is None:
            stats.first_error = f"{path.name}:{lineno}: {reason}"
        with self._lock:
            self.rejections.append({"file": path.name, "line": lineno, "reason": reason})

    # -- typed views -------------------------------------------------

    @property
    def logs(self) -> list[LogRecord]:
        return sorted(self.records["logs"].values(), key=lambda r: r.key)

    @property
    def creations(self) -> list[ContractCreation]:
        return sorted(self.records["creations"].values(), key=lambda r: r.key)

    @property
    def transactions(self) -> list[TxSummary]:
        return sorted(self.records["transactions"].values(), key=lambda r: r.key)

    @property
    def vuln_findings(self) -> list[VulnFinding]:
        return sorted(self.records["vuln_findings"].values(), key=lambda r: r.key)

    # -- digest & persistence ----------------------------------------

    def _canonical_lines(self):
        for kind in KINDS:
            records = sorted(self.records[kind].values(), key=lambda r: r.key)
            for record in records:
                obj = _canonical_record(record)
                yield kind, json.dumps(obj, sort_keys=True, separators=(",", ":"))

    def dataset_digest(self) -> bytes:
        """Order-independent content hash over the sorted canonical records."""
        h = hashlib.sha256()
        for kind, line in self._canonical_lines():
            h.update(kind.encode())
            h.update(b"\x00")
            h.update(line.encode())
            h.update(b"\n")
        return h.digest()

    def save(self, directory) -> None:
        """Persist normalized NDJSON per kind, plus digest and rejections."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        files = {k: [] for k in KINDS}
        for kind, line in self._canonical_lines():
            files[kind].append(line)
        for kind, lines in files.items():
            (directory / f"{kind}.ndjson").write_text(
                "".join(l + "\n" for l in lines), encoding="utf-8")
        (directory / "digest.txt").write_text(self.dataset_digest().hex() + "\n")
        with open(directory / "rejected.ndjson", "w", encoding="utf-8") as fh:
            for rej in self.rejections:
                fh.write(json.dumps(rej, sort_keys=True) + "\n")

    @classmethod
    def load(cls, directory) -> "Dataset":
        directory = Path(directory)
        ds = cls()
        for kind in KINDS:
            path = directory / f"{kind}.ndjson"
            if path.exists():
                ds.ingest_file(path, kind)
        digest_file = directory / "digest.txt"
        if digest_file.exists():
            recorded = digest_file.read_text().strip()
            actual = ds.dataset_digest().hex()
            if recorded != actual:
                raise ValidationError(
                    f"dataset digest mismatch: recorded {recorded}, actual {actual}")
        return ds
