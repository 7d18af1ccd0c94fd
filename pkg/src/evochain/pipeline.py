"""End-to-end build: detect proxies, trace versions, classify changes,
populate the graph store.

Per-contract detection and per-proxy tracing run on a worker pool; results
are sorted by address before store writes so the snapshot is deterministic
regardless of scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .bytecode import ProxyKind, classify_proxy, scan_bytecode
from .classify import DEFAULT_GAS_THRESHOLD, classify_change, diff_sources
from .explorer import ExplorerClient
from .ingest import ContractCreation, Dataset, VulnFinding
from .store import GraphStore, ObservedChangeEdge, ProxyNode, VersionNode
from .trace import (DEFAULT_SIGNATURES, EventSignature, attach_activity,
                    build_version_chain, decode_upgrade_events)


@dataclass
class BuildResult:
    store: GraphStore
    proxies: int
    versions: int


def build_graph(dataset: Dataset,
                signatures: tuple[EventSignature, ...] = DEFAULT_SIGNATURES,
                gas_threshold: float = DEFAULT_GAS_THRESHOLD,
                explorer: Optional[ExplorerClient] = None,
                jobs: int = 1) -> BuildResult:
    logs_by_address: dict[str, list] = {}
    for log in dataset.logs:
        logs_by_address.setdefault(log.address, []).append(log)
    txs_by_to: dict[str, list] = {}
    for tx in dataset.transactions:
        if tx.to is not None:
            txs_by_to.setdefault(tx.to, []).append(tx)
    creations_by_address: dict[str, ContractCreation] = {
        c.address: c for c in dataset.creations}
    findings_by_address: dict[str, list[VulnFinding]] = {}
    for finding in dataset.vuln_findings:
        findings_by_address.setdefault(finding.address, []).append(finding)

    def detect(creation: ContractCreation):
        scan = scan_bytecode(creation.runtime_bytecode)
        classification = classify_proxy(scan, logs_by_address.get(creation.address, ()))
        return creation, classification

    creations = dataset.creations
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            detected = list(pool.map(detect, creations))
    else:
        detected = [detect(c) for c in creations]

    store = GraphStore()
    version_total = 0
    proxy_total = 0
    for creation, classification in sorted(detected, key=lambda d: d[0].address):
        if classification.kind == ProxyKind.NOT_PROXY:
            continue
        proxy_total += 1
        store.upsert_proxy(ProxyNode(
            address=creation.address,
            proxy_type=classification.kind,
            created_at=creation.block_timestamp,
            evidence=list(classification.evidence),
        ))
        events = decode_upgrade_events(
            logs_by_address.get(creation.address, ()), signatures)
        chain = build_version_chain(creation.address, events, creation)
        attach_activity(chain, txs_by_to.get(creation.address, ()))
        version_total += len(chain.entries)

        for entry in chain.entries:
            impl_creation = creations_by_address.get(entry.implementation)
            store.upsert_version(VersionNode(
                proxy=creation.address,
                version_number=entry.version_number,
                contract_address=entry.implementation,
                creation_timestamp=(impl_creation.block_timestamp
                                    if impl_creation else None),
                last_tx_timestamp=entry.last_tx_timestamp,
                total_transactions=entry.tx_count,
                vulnerabilities=sorted({
                    f.category for f in findings_by_address.get(entry.implementation, ())}),
            ), implements_from=creation.address)

        for old, new in zip(chain.entries, chain.entries[1:]):
            report = _classify_pair(old, new, creations_by_address,
                                    findings_by_address, explorer, gas_threshold)
            store.upsert_change(ObservedChangeEdge(
                proxy=creation.address,
                from_version=old.version_number,
                to_version=new.version_number,
                categories=list(report.categories),
                evidence=list(report.evidence),
            ))
    return BuildResult(store=store, proxies=proxy_total, versions=version_total)


def _classify_pair(old, new, creations_by_address, findings_by_address,
                   explorer: Optional[ExplorerClient], gas_threshold: float):
    old_source = new_source = ""
    if explorer is not None:
        old_source = explorer.fetch_verified_source(old.implementation).source_text
        new_source = explorer.fetch_verified_source(new.implementation).source_text
    old_creation = creations_by_address.get(old.implementation)
    new_creation = creations_by_address.get(new.implementation)
    return classify_change(
        diff_sources(old_source, new_source),
        old_findings=findings_by_address.get(old.implementation, ()),
        new_findings=findings_by_address.get(new.implementation, ()),
        old_gas=old_creation.gas_used if old_creation else None,
        new_gas=new_creation.gas_used if new_creation else None,
        from_version=old.version_number,
        to_version=new.version_number,
        gas_threshold=gas_threshold,
    )
