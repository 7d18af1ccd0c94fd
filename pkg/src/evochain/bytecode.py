"""Proxy detection from runtime bytecode and emitted event logs.

A linear scan with push-immediate skipping decides whether DELEGATECALL
appears in the executable stream, collects PUSH32 constants, and matches
the canonical EIP-1167 minimal-proxy pattern. Classification combines the
scan with upgrade-event topics.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .ingest import LogRecord
from .keccak import event_topic, keccak256

PUSH1 = 0x60
PUSH32 = 0x7F
DELEGATECALL = 0xF4

# EIP-1167 canonical runtime code: prefix || 20-byte target || suffix.
EIP1167_PREFIX = bytes.fromhex("363d3d373d3d3d363d73")
EIP1167_SUFFIX = bytes.fromhex("5af43d82803e903d91602b57fd5bf3")

UPGRADED_TOPIC = event_topic("Upgraded(address)")


class ProxyKind:
    EIP1967 = "Eip1967"
    UUPS_LIKE = "UupsLike"
    BEACON_LIKE = "BeaconLike"
    MINIMAL_EIP1167 = "MinimalEip1167"
    DELEGATECALL_GENERIC = "DelegatecallGeneric"
    NOT_PROXY = "NotProxy"

    ALL = (EIP1967, UUPS_LIKE, BEACON_LIKE, MINIMAL_EIP1167,
           DELEGATECALL_GENERIC, NOT_PROXY)


@dataclass(frozen=True)
class OpcodeScan:
    has_delegatecall: bool
    pushed_constants: frozenset[bytes]
    eip1167_target: Optional[str]
    code_size: int


@dataclass(frozen=True)
class ProxyClassification:
    kind: str
    evidence: tuple[str, ...]


@dataclass(frozen=True)
class SlotConstants:
    implementation_slot: bytes
    admin_slot: bytes
    beacon_slot: bytes


def _label_slot(label: str) -> bytes:
    value = int.from_bytes(keccak256(label.encode("ascii")), "big") - 1
    return value.to_bytes(32, "big")


@lru_cache(maxsize=1)
def slot_constants() -> SlotConstants:
    """The three well-known EIP-1967 storage slots."""
    return SlotConstants(
        implementation_slot=_label_slot("eip1967.proxy.implementation"),
        admin_slot=_label_slot("eip1967.proxy.admin"),
        beacon_slot=_label_slot("eip1967.proxy.beacon"),
    )


def scan_bytecode(runtime_bytecode: bytes) -> OpcodeScan:
    """Linear walk over runtime code, skipping push-immediate data.

    Truncated trailing push data is tolerated; no jump/reachability
    analysis is attempted.
    """
    has_delegatecall = False
    pushed: set[bytes] = set()
    target: Optional[str] = None
    i = 0
    n = len(runtime_bytecode)
    while i < n:
        if target is None and runtime_bytecode.startswith(EIP1167_PREFIX, i):
            end = i + len(EIP1167_PREFIX) + 20
            if runtime_bytecode.startswith(EIP1167_SUFFIX, end):
                target = "0x" + runtime_bytecode[i + len(EIP1167_PREFIX):end].hex()
        op = runtime_bytecode[i]
        if op == DELEGATECALL:
            has_delegatecall = True
        if PUSH1 <= op <= PUSH32:
            width = op - PUSH1 + 1
            if width == 32 and i + 32 < n:
                pushed.add(bytes(runtime_bytecode[i + 1:i + 33]))
            i += 1 + width
        else:
            i += 1
    return OpcodeScan(
        has_delegatecall=has_delegatecall,
        pushed_constants=frozenset(pushed),
        eip1167_target=target,
        code_size=n,
    )


def classify_proxy(scan: OpcodeScan, address_logs: Iterable[LogRecord]) -> ProxyClassification:
    """Decide the proxy mechanism; first matching rule wins.

    Evidence tags record every rule that fired, not just the winner.
    """
    slots = slot_constants()
    upgrade_event = any(
        log.topics and log.topics[0] == UPGRADED_TOPIC for log in address_logs)

    evidence: list[str] = []
    if scan.eip1167_target is not None:
        evidence.append("minimal-pattern-match")
    if slots.implementation_slot in scan.pushed_constants:
        evidence.append("slot-constant-in-code")
    if slots.admin_slot in scan.pushed_constants:
        evidence.append("admin-slot-constant-in-code")
    if slots.beacon_slot in scan.pushed_constants:
        evidence.append("beacon-slot-constant-in-code")
    if upgrade_event:
        evidence.append("upgrade-event-emitted")
    if scan.has_delegatecall:
        evidence.append("delegatecall-present")

    if scan.eip1167_target is not None:
        kind = ProxyKind.MINIMAL_EIP1167
    elif slots.implementation_slot in scan.pushed_constants and scan.has_delegatecall:
        kind = ProxyKind.EIP1967
    elif slots.beacon_slot in scan.pushed_constants and scan.has_delegatecall:
        kind = ProxyKind.BEACON_LIKE
    elif upgrade_event:
        kind = ProxyKind.EIP1967 if scan.has_delegatecall else ProxyKind.UUPS_LIKE
    elif scan.has_delegatecall:
        kind = ProxyKind.DELEGATECALL_GENERIC
    else:
        return ProxyClassification(kind=ProxyKind.NOT_PROXY, evidence=())
    return ProxyClassification(kind=kind, evidence=tuple(evidence))
