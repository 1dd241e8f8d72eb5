import warnings

import pytest

from scriptorium.bench.questions import BenchCorpus
from scriptorium.kb.snapshot import KbSnapshot
from scriptorium.synth.config import SynthConfig
from scriptorium.synth.corpus import generate_corpus

warnings.filterwarnings("ignore", message=".*starlette.testclient.*")


@pytest.fixture(scope="session")
def small_config():
    return SynthConfig(master_seed=7, n_classes=10, n_fragments=20, noise="low")


@pytest.fixture(scope="session")
def small_payload(small_config):
    return generate_corpus(small_config)


@pytest.fixture(scope="session")
def kb(small_payload):
    snapshot = KbSnapshot()
    reports = snapshot.ingest_payload(small_payload)
    assert all(r.rejected_count == 0 for r in reports.values())
    snapshot.build_indexes()
    return snapshot


@pytest.fixture(scope="session")
def bench_corpus(small_payload):
    return BenchCorpus.from_payload(small_payload)
