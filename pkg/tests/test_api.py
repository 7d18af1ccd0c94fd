import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from evochain.api import create_app
from evochain.explorer import ClientConfig, ExplorerClient

from test_explorer import FailingTransport, RecordingTransport, FakeClock
from test_store import PROXY, OTHER, populated_store

SCHEMA_DIR = Path(__file__).parent.parent / "src" / "evochain" / "schemas"


def schema_validator(name):
    registry = Registry()
    for path in SCHEMA_DIR.glob("*.json"):
        schema = json.loads(path.read_text())
        resource = Resource.from_contents(schema)
        registry = registry.with_resource(schema["$id"], resource)
        registry = registry.with_resource(path.name, resource)
    schema = json.loads((SCHEMA_DIR / f"{name}.json").read_text())
    return Draft202012Validator(schema, registry=registry)


def validate(name, payload):
    errors = list(schema_validator(name).iter_errors(payload))
    assert not errors, errors[:3]


@pytest.fixture()
def store():
    return populated_store()


@pytest.fixture()
def client(store, tmp_path):
    fixtures = tmp_path / "fixtures"
    fixtures.mkdir()
    impl = "0x" + f"{10:040x}"
    (fixtures / f"{impl}.json").write_text(json.dumps({
        "verified": True, "source_text": "contract A {}",
        "contract_name": "A", "compiler_version": "v0.8.0",
        "fetched_at": 1700000000}))
    clock = FakeClock()
    explorer = ExplorerClient(ClientConfig(offline_fixture_dir=str(fixtures)),
                              transport=FailingTransport(), clock=clock,
                              sleep=clock.sleep, wall_clock=clock)
    app = create_app(store, explorer=explorer)
    return TestClient(app)


class TestProxiesEndpoint:
    def test_empty_store(self):
        client = TestClient(create_app(populated_store().__class__()))
        body = client.get("/api/v1/proxies").json()
        assert body == {"items": [], "total": 0, "limit": 50, "offset": 0}

    def test_type_filter(self, client):
        body = client.get("/api/v1/proxies", params={"type": "Eip1967"}).json()
        assert body["total"] == 1
        validate("proxies_page", body)

    def test_invalid_limit_400(self, client):
        response = client.get("/api/v1/proxies", params={"limit": 0})
        assert response.status_code == 400
        body = response.json()
        assert body["code"] == "bad_request"
        validate("error", body)

    def test_prefix_search(self, client):
        body = client.get("/api/v1/proxies", params={"q": PROXY[:8]}).json()
        assert body["total"] == 1
        assert body["items"][0]["address"] == PROXY


class TestLineageEndpoint:
    def test_fixture_lineage(self, client):
        body = client.get(f"/api/v1/contracts/{PROXY}/lineage").json()
        assert [v["version"]["version_number"] for v in body["versions"]] == [1, 2, 3]
        assert body["versions"][0]["change"] is None
        assert body["versions"][1]["change"]["categories"] == ["FeatureModification"]
        validate("lineage", body)

    def test_unknown_404(self, client):
        response = client.get("/api/v1/contracts/" + "0x" + "ff" * 20 + "/lineage")
        assert response.status_code == 404
        body = response.json()
        assert body["code"] == "not_found"
        validate("error", body)

    def test_malformed_address_400(self, client):
        response = client.get("/api/v1/contracts/0xZZ/lineage")
        assert response.status_code == 400
        validate("error", response.json())

    def test_ordering_matches_store(self, client, store):
        body = client.get(f"/api/v1/contracts/{PROXY}/lineage").json()
        expected = [v.version_number for v, _ in store.get_lineage(PROXY).items]
        assert [v["version"]["version_number"] for v in body["versions"]] == expected


class TestSourceEndpoint:
    def test_fixture_backed(self, client):
        impl = "0x" + f"{10:040x}"
        body = client.get(f"/api/v1/contracts/{impl}/source").json()
        assert body["origin"] == "fixture"
        assert body["verified"] is True
        validate("source", body)

    def test_offline_miss_soft(self, client):
        body = client.get("/api/v1/contracts/" + "0x" + "ee" * 20 + "/source").json()
        assert body["verified"] is False
        validate("source", body)

    def test_transport_failure_502(self, store):
        clock = FakeClock()
        explorer = ExplorerClient(
            ClientConfig(), transport=RecordingTransport(error=ConnectionError("x")),
            clock=clock, sleep=clock.sleep, wall_clock=clock)
        client = TestClient(create_app(store, explorer=explorer))
        response = client.get(f"/api/v1/contracts/{PROXY}/source")
        assert response.status_code == 502
        body = response.json()
        assert body["code"] == "upstream_unavailable"
        validate("error", body)


class TestGraphEndpoint:
    def test_default_depth_counts(self, client):
        body = client.get(f"/api/v1/graph/{PROXY}").json()
        assert len(body["nodes"]) == 4  # proxy + 3 versions
        assert len(body["edges"]) == 5  # 3 implements + 2 observed_change
        validate("graph", body)

    def test_depth_one_no_change_edges(self, client):
        body = client.get(f"/api/v1/graph/{PROXY}", params={"depth": 1}).json()
        assert len(body["nodes"]) == 4
        kinds = {e["kind"] for e in body["edges"]}
        assert kinds == {"implements"}

    def test_unknown_404(self, client):
        response = client.get("/api/v1/graph/" + "0x" + "ff" * 20)
        assert response.status_code == 404

    def test_bad_depth_400(self, client):
        assert client.get(f"/api/v1/graph/{PROXY}", params={"depth": 9}).status_code == 400

    def test_node_discriminators(self, client):
        body = client.get(f"/api/v1/graph/{PROXY}").json()
        types = sorted(n["type"] for n in body["nodes"])
        assert types == ["proxy", "version", "version", "version"]


class TestStatsEndpoint:
    def test_fixture_counts(self, client):
        body = client.get("/api/v1/stats").json()
        assert body["proxy_count"] == 2
        assert body["version_count"] == 4
        assert sum(body["by_type"].values()) == body["proxy_count"]
        validate("stats", body)


class TestReadOnly:
    def test_fuzzed_requests_leave_store_unchanged(self, client, store):
        import random
        rng = random.Random(13)
        digest = store.digest()
        paths = ["/api/v1/proxies", f"/api/v1/contracts/{PROXY}/lineage",
                 f"/api/v1/graph/{PROXY}", "/api/v1/stats",
                 "/api/v1/contracts/0xzz/lineage", "/api/v1/nope"]
        for _ in range(100):
            path = rng.choice(paths)
            params = {}
            if rng.random() < 0.5:
                params = {rng.choice(["limit", "offset", "depth", "q", "type"]):
                          rng.choice(["0", "-1", "x", "501", "3", PROXY[:5]])}
            client.get(path, params=params)
        assert store.digest() == digest
