"""Upgrade-event decoding and version-chain reconstruction.

Each proxy's history is the run-length segmentation of its upgrade events
by implementation address; repeated settings of the current implementation
are no-op upgrades and do not open a new version.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .ingest import ContractCreation, LogRecord, TxSummary, normalize_address
from .keccak import event_topic

ZERO_ADDRESS = "0x" + "00" * 20


@dataclass(frozen=True)
class EventSignature:
    name: str
    signature: str
    impl_param_index: int = 0  # index among indexed topics, or data words
    indexed: bool = True

    @property
    def topic0(self) -> bytes:
        return event_topic(self.signature)


DEFAULT_SIGNATURES = (
    EventSignature("Upgraded", "Upgraded(address)", 0, True),
    EventSignature("ImplementationUpdated",
                   "ImplementationUpdated(address,address,address)", 1, True),
)


def load_signature_table(path) -> tuple[EventSignature, ...]:
    """Read extra event signatures from an NDJSON file."""
    entries = list(DEFAULT_SIGNATURES)
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            entries.append(EventSignature(
                name=obj["name"],
                signature=obj["signature"],
                impl_param_index=int(obj.get("impl_param_index", 0)),
                indexed=bool(obj.get("indexed", True)),
            ))
    return tuple(entries)


@dataclass(frozen=True)
class UpgradeEvent:
    proxy: str
    new_implementation: str
    block_number: int
    log_index: int
    tx_hash: bytes
    event_name: str

    @property
    def position(self) -> tuple[int, int]:
        return (self.block_number, self.log_index)

    @property
    def is_bricking(self) -> bool:
        return self.new_implementation == ZERO_ADDRESS


@dataclass
class VersionEntry:
    version_number: int
    implementation: str
    active_from: tuple[int, int]
    active_until: Optional[tuple[int, int]] = None
    tx_count: int = 0
    creation_timestamp: Optional[int] = None
    last_tx_timestamp: Optional[int] = None
    noop_upgrades: int = 0


@dataclass
class VersionChain:
    proxy: str
    entries: list[VersionEntry] = field(default_factory=list)


def decode_upgrade_events(logs: Iterable[LogRecord],
                          signatures: Iterable[EventSignature] = DEFAULT_SIGNATURES,
                          stats: Optional[dict] = None) -> list[UpgradeEvent]:
    """Select and decode upgrade logs, sorted by (block_number, log_index).

    Malformed matches (no usable topic or data word) are skipped; when
    ``stats`` is given, its ``malformed`` counter is incremented.
    """
    by_topic = {sig.topic0: sig for sig in signatures}
    events = []
    malformed = 0
    for log in logs:
        if not log.topics:
            continue
        sig = by_topic.get(log.topics[0])
        if sig is None:
            continue
        word = _impl_word(log, sig)
        if word is None:
            malformed += 1
            continue
        events.append(UpgradeEvent(
            proxy=log.address,
            new_implementation="0x" + word[12:32].hex(),
            block_number=log.block_number,
            log_index=log.log_index,
            tx_hash=log.tx_hash,
            event_name=sig.name,
        ))
    if stats is not None:
        stats["malformed"] = stats.get("malformed", 0) + malformed
    events.sort(key=lambda e: e.position)
    return events


def _impl_word(log: LogRecord, sig: EventSignature) -> Optional[bytes]:
    if sig.indexed:
        idx = 1 + sig.impl_param_index
        if len(log.topics) > idx:
            return log.topics[idx]
        # fall through: some emitters put the parameter in data instead
    offset = (sig.impl_param_index if not sig.indexed else 0) * 32
    if len(log.data) >= offset + 32:
        return log.data[offset:offset + 32]
    return None


def build_version_chain(proxy: str, events: list[UpgradeEvent],
                        creation: Optional[ContractCreation] = None) -> VersionChain:
    """Segment the event sequence into consecutive implementation versions."""
    proxy = normalize_address(proxy)
    for event in events:
        if event.proxy != proxy:
            raise ValueError(
                f"event for {event.proxy} passed to chain of {proxy}")
    chain = VersionChain(proxy=proxy)
    for event in events:
        current = chain.entries[-1] if chain.entries else None
        if current is not None and event.new_implementation == current.implementation:
            current.noop_upgrades += 1
            continue
        if current is not None:
            current.active_until = event.position
        # Version 1 opens at the proxy's creation point when the creation
        # transaction itself emitted the event; that point coincides with
        # the event position (same block), so the position is used either way.
        active_from = event.position
        chain.entries.append(VersionEntry(
            version_number=len(chain.entries) + 1,
            implementation=event.new_implementation,
            active_from=active_from,
        ))
    return chain


def attach_activity(chain: VersionChain, txs: Iterable[TxSummary]) -> VersionChain:
    """Attribute proxy transactions to the version active at their block.

    A transaction in a version's opening block is attributed to that
    (newly opened) version; transactions before version 1 opened are left
    unattributed.
    """
    for tx in txs:
        if tx.to != chain.proxy:
            raise ValueError(f"transaction to {tx.to} attached to chain of {chain.proxy}")
        entry = _entry_for_block(chain, tx.block_number)
        if entry is None:
            continue
        entry.tx_count += 1
        if entry.last_tx_timestamp is None or tx.block_timestamp > entry.last_tx_timestamp:
            entry.last_tx_timestamp = tx.block_timestamp
    return chain


def _entry_for_block(chain: VersionChain, block_number: int) -> Optional[VersionEntry]:
    chosen = None
    for entry in chain.entries:
        if entry.active_from[0] <= block_number:
            chosen = entry
        else:
            break
    return chosen
