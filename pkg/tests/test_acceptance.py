"""Acceptance gate: each test implements one release criterion at its
stated tolerance and prints a PASS line on success."""

import json
import random
import time

import pytest
from fastapi.testclient import TestClient

from evochain.api import create_app
from evochain.bytecode import (UPGRADED_TOPIC, ProxyKind, classify_proxy,
                               scan_bytecode, slot_constants)
from evochain.cli import main as cli_main
from evochain.explorer import ClientConfig, ExplorerClient
from evochain.ingest import Dataset, TxSummary
from evochain.pipeline import build_graph
from evochain.store import CorruptSnapshotError, GraphStore
from evochain.trace import UpgradeEvent, attach_activity, build_version_chain

from click.testing import CliRunner

from oracles import (keccak256_oracle, reference_delegatecall_present,
                     segment_by_implementation)
from test_api import validate
from test_store import random_store


def report(name):
    print(f"ACCEPTANCE PASS: {name}")


def test_slot_and_topic_constants_match_keccak_oracle():
    start = time.monotonic()
    slots = slot_constants()
    for label, actual in [
        (b"eip1967.proxy.implementation", slots.implementation_slot),
        (b"eip1967.proxy.admin", slots.admin_slot),
        (b"eip1967.proxy.beacon", slots.beacon_slot),
    ]:
        expected = (int.from_bytes(keccak256_oracle(label), "big") - 1).to_bytes(32, "big")
        assert actual == expected
    assert UPGRADED_TOPIC == keccak256_oracle(b"Upgraded(address)")
    elapsed = time.monotonic() - start
    assert elapsed < 1.0, f"took {elapsed:.3f}s"
    report("slot/topic constants byte-equal to keccak oracle, < 1 s")


def test_detection_accuracy_100_percent_on_corpus(corpus_dataset, corpus_manifest):
    start = time.monotonic()
    logs_by_address = {}
    for log in corpus_dataset.logs:
        logs_by_address.setdefault(log.address, []).append(log)
    creations = {c.address: c for c in corpus_dataset.creations}
    mismatches = []
    for contract in corpus_manifest["contracts"]:
        creation = creations[contract["address"]]
        result = classify_proxy(
            scan_bytecode(creation.runtime_bytecode),
            logs_by_address.get(creation.address, ()))
        if result.kind != contract["kind"]:
            mismatches.append((contract["address"], result.kind, contract["kind"]))
    assert len(corpus_manifest["contracts"]) == 100
    assert mismatches == []
    elapsed = time.monotonic() - start
    assert elapsed < 5.0, f"took {elapsed:.3f}s"
    report("proxy detection 100% exact-kind agreement on 100-contract corpus, < 5 s")


def test_disassembly_soundness_10000_random_inputs():
    rng = random.Random(0xEC0)
    disagreements = 0
    for _ in range(10_000):
        code = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 128)))
        if scan_bytecode(code).has_delegatecall != reference_delegatecall_present(code):
            disagreements += 1
    assert disagreements == 0
    report("delegatecall detection agrees with reference disassembler on 10,000 random inputs")


def test_lineage_oracle_equivalence_and_conservation():
    rng = random.Random(0xA11CE)
    proxy = "0x" + "01" * 20
    alphabet = ["0x" + f"{i:02x}" * 20 for i in range(1, 6)]
    for _ in range(1000):
        impls = [rng.choice(alphabet) for _ in range(rng.randrange(0, 51))]
        events = [
            UpgradeEvent(proxy=proxy, new_implementation=impl, block_number=i + 1,
                         log_index=0, tx_hash=b"\x00" * 32, event_name="Upgraded")
            for i, impl in enumerate(impls)]
        chain = build_version_chain(proxy, events)
        assert ([e.implementation for e in chain.entries]
                == segment_by_implementation(impls))
    for _ in range(1000):
        impls = [rng.choice(alphabet) for _ in range(rng.randrange(1, 6))]
        events = []
        block = 1
        for impl in impls:
            block += rng.randrange(1, 10)
            events.append(UpgradeEvent(
                proxy=proxy, new_implementation=impl, block_number=block,
                log_index=0, tx_hash=b"\x00" * 32, event_name="Upgraded"))
        chain = build_version_chain(proxy, events)
        first_block = chain.entries[0].active_from[0]
        n_txs = rng.randrange(0, 30)
        txs = [TxSummary(to=proxy, block_number=rng.randrange(first_block, block + 50),
                         block_timestamp=0, tx_hash=bytes(rng.randrange(256) for _ in range(32)))
               for _ in range(n_txs)]
        attach_activity(chain, txs)
        assert sum(e.tx_count for e in chain.entries) == n_txs
    report("version chains equal segmentation oracle on 1,000 sequences; "
           "tx-count conservation on 1,000 attachments")


def test_change_classification_rule_fixtures():
    from evochain.classify import (FEATURE_MODIFICATION, GAS_OPTIMIZATION,
                                   VULNERABILITY_FIX, classify_change, diff_sources)
    from evochain.ingest import VulnFinding

    finding = VulnFinding(address="0x" + "aa" * 20, detector="scanner",
                          category="reentrancy", severity="high",
                          source_location="C.sol:1")
    vuln = classify_change(diff_sources("", ""), old_findings=[finding],
                           new_findings=[])
    assert vuln.categories == (VULNERABILITY_FIX,)
    assert "fixed:reentrancy" in vuln.evidence

    old = "contract C { function f() public {} }"
    new = "contract C { function f() public {} function pause() public {} }"
    feature = classify_change(diff_sources(old, new))
    assert feature.categories == (FEATURE_MODIFICATION,)

    gas = classify_change(diff_sources(old, old), old_gas=1_000_000, new_gas=900_000)
    assert gas.categories == (GAS_OPTIMIZATION,)
    report("classification rule fixtures (vuln-fix / feature / gas -10% at theta=0.05) exact")


def test_graph_round_trip_and_corruption(tmp_path):
    store = random_store(random.Random(0xBEEF), proxies=70, max_versions=4)
    stats = store.stats()
    assert stats["proxy_count"] + stats["version_count"] >= 200, stats
    path = tmp_path / "store.snap"
    store.snapshot(path)
    loaded = GraphStore.load(path)
    assert loaded.snapshot_bytes() == store.snapshot_bytes()
    assert loaded.stats() == store.stats()
    for node in store.find(limit=500)[0]:
        assert loaded.get_lineage(node.address) == store.get_lineage(node.address)

    raw = path.read_bytes()
    rng = random.Random(0xC0DE)
    for _ in range(100):
        pos = rng.randrange(len(raw))
        flip = rng.randrange(1, 256)
        mutated = bytearray(raw)
        mutated[pos] ^= flip
        path.write_bytes(bytes(mutated))
        with pytest.raises(CorruptSnapshotError):
            GraphStore.load(path)
    report("200+-node store survives snapshot round-trip; 100/100 single-byte corruptions detected")


def test_pipeline_determinism_end_to_end(corpus_dir, tmp_path):
    start = time.monotonic()
    runner = CliRunner()
    digests = []
    for run in ("a", "b"):
        dataset_dir = tmp_path / f"ds-{run}"
        result = runner.invoke(cli_main, [
            "ingest",
            "--logs", str(corpus_dir / "logs.ndjson"),
            "--creations", str(corpus_dir / "creations.ndjson"),
            "--transactions", str(corpus_dir / "transactions.ndjson"),
            "--vulns", str(corpus_dir / "vuln_findings.ndjson"),
            "--out", str(dataset_dir)])
        assert result.exit_code == 0, result.output
        snapshot = tmp_path / f"graph-{run}.snap"
        result = runner.invoke(cli_main, [
            "build", "--dataset", str(dataset_dir),
            "--snapshot", str(snapshot),
            "--fixtures", str(corpus_dir / "fixtures"),
            "--jobs", "4"])
        assert result.exit_code == 0, result.output
        digests.append(json.loads(result.output)["snapshot_digest"])
    assert digests[0] == digests[1]
    elapsed = time.monotonic() - start
    assert elapsed < 30.0, f"took {elapsed:.3f}s"
    report("two full ingest+build runs produce byte-identical snapshot digests, < 30 s")


def test_api_conformance_on_fixture_snapshot(corpus_dataset, corpus_dir, tmp_path):
    explorer = ExplorerClient(
        ClientConfig(offline_fixture_dir=str(corpus_dir / "fixtures")))
    built = build_graph(corpus_dataset, explorer=explorer)
    store = built.store
    client = TestClient(create_app(store, explorer=explorer))

    proxies = client.get("/api/v1/proxies", params={"limit": 500}).json()
    validate("proxies_page", proxies)
    validate("stats", client.get("/api/v1/stats").json())
    sampled = proxies["items"][:10]
    for proxy in sampled:
        address = proxy["address"]
        lineage = client.get(f"/api/v1/contracts/{address}/lineage").json()
        validate("lineage", lineage)
        expected = [v.version_number for v, _ in store.get_lineage(address).items]
        assert [v["version"]["version_number"] for v in lineage["versions"]] == expected
        validate("graph", client.get(f"/api/v1/graph/{address}").json())
        if lineage["versions"]:
            impl = lineage["versions"][0]["version"]["contract_address"]
            validate("source", client.get(f"/api/v1/contracts/{impl}/source").json())
    validate("error", client.get("/api/v1/contracts/0xzz/lineage").json())
    validate("error", client.get("/api/v1/proxies", params={"limit": "0"}).json())

    digest = store.digest()
    rng = random.Random(0xF122)
    paths = ["/api/v1/proxies", "/api/v1/stats",
             f"/api/v1/contracts/{sampled[0]['address']}/lineage",
             f"/api/v1/graph/{sampled[0]['address']}",
             "/api/v1/contracts/0xdeadbeef/lineage"]
    for _ in range(150):
        params = {rng.choice(["limit", "offset", "depth", "q", "type", "junk"]):
                  rng.choice(["-5", "0", "1", "501", "zz", "Eip1967"])}
        client.get(rng.choice(paths), params=params)
    assert store.digest() == digest
    report("all endpoints validate against shipped JSON Schemas; lineage ordering matches store; "
           "request fuzzing leaves store digest unchanged")
