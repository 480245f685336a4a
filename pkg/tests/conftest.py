from __future__ import annotations

import sys
from importlib.resources import files
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from unlrdf.parser import parse_unl_document  # noqa: E402
from unlrdf.quadstore import SKOLEM, Iri, Quad, QuadStore  # noqa: E402
from unlrdf.rdf_unl import ScopeMode, link_volume, to_rdf, volume_from_documents  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"
FIXTURES = files("unlrdf.data.fixtures")
VOLUME_PATH = Path(str(files("unlrdf.data").joinpath("Test_UW_Volume.uwv")))


def fixture_text(name: str) -> str:
    return FIXTURES.joinpath(name).read_text(encoding="utf-8")


def fixture_path(name: str) -> Path:
    return Path(str(FIXTURES.joinpath(name)))


def r1_r2_docs():
    r1 = parse_unl_document(fixture_text("R1.unl"))
    r2 = parse_unl_document(fixture_text("R2.unl"), counter_base=r1.next_counter())
    return r1, r2


def linked_store(docs, mode=ScopeMode.REIFIED) -> QuadStore:
    store = to_rdf(list(docs), mode)
    return link_volume(store, volume_from_documents(list(docs)))[0]


def without_skolems(store: QuadStore) -> set:
    """Quads with every skolem IRI collapsed to one placeholder."""
    def norm(t):
        return Iri(SKOLEM + "_") if isinstance(t, Iri) and t.value.startswith(SKOLEM) else t
    return {Quad(norm(q.subject), q.predicate, norm(q.object), q.graph) for q in store}


@pytest.fixture
def r1_doc():
    return r1_r2_docs()[0]


@pytest.fixture
def r2_doc():
    return r1_r2_docs()[1]


@pytest.fixture
def rules_store():
    return linked_store(r1_r2_docs())
