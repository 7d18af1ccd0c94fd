"""Seeded synthetic corpus generator with ground-truth manifest.

Emits NDJSON export files (creations, logs, transactions, vuln findings),
an offline source-fixture directory and a manifest recording the expected
classification and version count for every generated contract. The real
full-chain corpus is not desk-reproducible; acceptance runs against this
generator instead.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from .bytecode import (EIP1167_PREFIX, EIP1167_SUFFIX, ProxyKind, slot_constants)
from .keccak import event_topic

UPGRADED_TOPIC = event_topic("Upgraded(address)")

_VULN_CATEGORIES = ("reentrancy", "integer-overflow", "unchecked-call",
                    "tx-origin", "timestamp-dependence")

_SOURCE_TEMPLATE = """\
// SPDX-License-Identifier: MIT
pragma solidity ^0.8.0;

contract Token{n} {{
    uint256 public total;

    function transfer(address to, uint256 amount) public {{
        total = total + {n};
    }}
{extra}
}}
"""


def _rand_address(rng: random.Random) -> str:
    return "0x" + bytes(rng.randrange(256) for _ in range(20)).hex()


def _rand_hash(rng: random.Random) -> str:
    return "0x" + bytes(rng.randrange(256) for _ in range(32)).hex()


def _benign_code(rng: random.Random, length: int = 12) -> bytes:
    # PUSH1 x / ADD pairs: never an executable DELEGATECALL, no PUSH32.
    out = bytearray()
    for _ in range(length):
        out += bytes([0x60, rng.randrange(256), 0x01])
    out.append(0x00)
    return bytes(out)


def _eip1967_code(rng: random.Random, with_admin: bool) -> bytes:
    slots = slot_constants()
    code = bytearray(_benign_code(rng, 2))
    code += b"\x7f" + slots.implementation_slot + b"\x54"
    if with_admin:
        code += b"\x7f" + slots.admin_slot + b"\x54"
    code += b"\x36\x3d\x3d\x37\x5a\xf4"
    return bytes(code)


def _beacon_code(rng: random.Random) -> bytes:
    slots = slot_constants()
    return bytes(_benign_code(rng, 2)) + b"\x7f" + slots.beacon_slot + b"\x54\x5a\xf4"


def _generic_delegatecall_code(rng: random.Random) -> bytes:
    return bytes(_benign_code(rng, 4)) + b"\x36\x3d\x3d\x37\x5a\xf4\x00"


def _minimal_code(target: str) -> bytes:
    return EIP1167_PREFIX + bytes.fromhex(target[2:]) + EIP1167_SUFFIX


def generate_corpus(out_dir, seed: int = 0, contracts: int = 100) -> dict:
    """Write the corpus files under ``out_dir`` and return the manifest."""
    rng = random.Random(seed)
    out_dir = Path(out_dir)
    fixture_dir = out_dir / "fixtures"
    fixture_dir.mkdir(parents=True, exist_ok=True)

    creations: list[dict] = []
    logs: list[dict] = []
    transactions: list[dict] = []
    vulns: list[dict] = []
    manifest_contracts: list[dict] = []

    kinds = [ProxyKind.EIP1967, ProxyKind.MINIMAL_EIP1167, ProxyKind.UUPS_LIKE,
             ProxyKind.BEACON_LIKE, ProxyKind.DELEGATECALL_GENERIC,
             ProxyKind.NOT_PROXY]
    block = 1000
    total_versions = 0
    proxy_count = 0

    for i in range(contracts):
        kind = kinds[i % len(kinds)]
        address = _rand_address(rng)
        block += rng.randrange(1, 5)

        impls = []
        version_count = 0
        if kind in (ProxyKind.EIP1967, ProxyKind.UUPS_LIKE, ProxyKind.BEACON_LIKE):
            # Distinct consecutive implementations; each opens one version.
            version_count = rng.randrange(1, 5)
            impls = [_rand_address(rng) for _ in range(version_count)]

        if kind == ProxyKind.EIP1967:
            code = _eip1967_code(rng, with_admin=rng.random() < 0.5)
        elif kind == ProxyKind.MINIMAL_EIP1167:
            target = _rand_address(rng)
            impls = [target]
            code = _minimal_code(target)
        elif kind == ProxyKind.UUPS_LIKE:
            code = _benign_code(rng)
        elif kind == ProxyKind.BEACON_LIKE:
            code = _beacon_code(rng)
        elif kind == ProxyKind.DELEGATECALL_GENERIC:
            code = _generic_delegatecall_code(rng)
        else:
            code = _benign_code(rng)

        creations.append({
            "address": address,
            "creator": _rand_address(rng),
            "bytecode": "0x" + code.hex(),
            "block_number": block,
            "block_timestamp": 1_600_000_000 + block * 12,
            "transaction_hash": _rand_hash(rng),
            "gas_used": rng.randrange(200_000, 2_000_000),
        })

        # Implementation contracts exist as ordinary creations with source
        # fixtures, findings and deployment gas for change classification.
        prev_gas = None
        for v, impl in enumerate(impls, start=1):
            block += 1
            gas = rng.randrange(300_000, 1_500_000)
            if prev_gas is not None and rng.random() < 0.3:
                gas = int(prev_gas * 0.85)
            prev_gas = gas
            creations.append({
                "address": impl,
                "creator": _rand_address(rng),
                "bytecode": "0x" + _benign_code(rng).hex(),
                "block_number": block,
                "block_timestamp": 1_600_000_000 + block * 12,
                "transaction_hash": _rand_hash(rng),
                "gas_used": gas,
            })
            extra = ""
            if rng.random() < 0.5:
                extra = f"\n    function feature{v}() public {{ total += 1; }}\n"
            source = _SOURCE_TEMPLATE.format(n=v, extra=extra)
            (fixture_dir / f"{impl}.json").write_text(json.dumps({
                "verified": True,
                "source_text": source,
                "compiler_version": "v0.8.21",
                "contract_name": f"Token{v}",
                "fetched_at": 1_700_000_000,
            }))
            if rng.random() < 0.4:
                vulns.append({
                    "address": impl,
                    "detector": "ingested-scanner",
                    "category": rng.choice(_VULN_CATEGORIES),
                    "severity": rng.choice(("low", "medium", "high")),
                    "source_location": f"Token{v}.sol:{rng.randrange(1, 40)}",
                })

        # Upgrade events (minimal proxies upgrade by redeployment, none here).
        if kind != ProxyKind.MINIMAL_EIP1167:
            for impl in impls:
                block += rng.randrange(1, 3)
                logs.append({
                    "address": address,
                    "topics": ["0x" + UPGRADED_TOPIC.hex(),
                               "0x" + "00" * 12 + impl[2:]],
                    "data": "0x",
                    "block_number": block,
                    "log_index": rng.randrange(0, 10),
                    "transaction_hash": _rand_hash(rng),
                })

        if kind != ProxyKind.NOT_PROXY:
            proxy_count += 1
            chain_versions = version_count if kind != ProxyKind.MINIMAL_EIP1167 else 0
            total_versions += chain_versions
            for _ in range(rng.randrange(0, 8)):
                block += 1
                transactions.append({
                    "to_address": address,
                    "block_number": block,
                    "block_timestamp": 1_600_000_000 + block * 12,
                    "transaction_hash": _rand_hash(rng),
                })
        else:
            chain_versions = 0

        manifest_contracts.append({
            "address": address,
            "kind": kind,
            "versions": chain_versions,
        })

    _write_ndjson(out_dir / "creations.ndjson", creations)
    _write_ndjson(out_dir / "logs.ndjson", logs)
    _write_ndjson(out_dir / "transactions.ndjson", transactions)
    _write_ndjson(out_dir / "vuln_findings.ndjson", vulns)

    manifest = {
        "seed": seed,
        "contracts": manifest_contracts,
        "stats": {"proxies": proxy_count, "versions": total_versions},
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return manifest


def _write_ndjson(path: Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
