import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evochain.corpus import generate_corpus  # noqa: E402
from evochain.ingest import Dataset  # noqa: E402


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    generate_corpus(out, seed=42, contracts=100)
    return out


@pytest.fixture(scope="session")
def corpus_manifest(corpus_dir):
    import json
    return json.loads((corpus_dir / "manifest.json").read_text())


@pytest.fixture(scope="session")
def corpus_dataset(corpus_dir):
    dataset = Dataset()
    for kind, name in [("logs", "logs.ndjson"),
                       ("creations", "creations.ndjson"),
                       ("transactions", "transactions.ndjson"),
                       ("vuln_findings", "vuln_findings.ndjson")]:
        dataset.ingest_file(corpus_dir / name, kind)
    return dataset
