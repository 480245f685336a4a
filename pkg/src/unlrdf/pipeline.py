"""Shared operations behind the command line and the HTTP service."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .checker import InconsistencyReport, check, format_lines, format_text
from .core import UnlDocument, Vocabulary, default_vocabulary, load_vocabulary, validate_document
from .parser import parse_unl_document
from .quadstore import EXAMPLE, QuadStore, emit_trig, emit_turtle, load_trig
from .rdf_unl import (
    IS_OCCURRENCE_OF,
    UNL_SENTENCE,
    RDF_TYPE,
    ScopeMode,
    UwVolume,
    convert_scope_mode,
    detect_scope_mode,
    documents_from_rdf,
    link_volume,
    load_volume,
    to_rdf,
    volume_from_documents,
)
from .rules import ExtractedAxiom, axioms_from_rdf, format_axioms, run_all

ENV_PREFIX = "UNLRDF_"


class ValidationFailed(Exception):
    def __init__(self, report):
        super().__init__("\n".join(str(i) for i in report))
        self.report = report


@dataclass
class PipelineConfig:
    scope_mode: ScopeMode = ScopeMode.REIFIED
    strict: bool = False
    base: str = EXAMPLE
    vocab_path: str | None = None
    volume_path: str | None = None
    counter_base: int = 1

    @classmethod
    def from_env(cls, environ=None) -> PipelineConfig:
        env = os.environ if environ is None else environ

        def get(name, default=None):
            return env.get(ENV_PREFIX + name, default)

        return cls(
            scope_mode=ScopeMode(get("MODE", ScopeMode.REIFIED.value)),
            strict=get("STRICT", "0").lower() in ("1", "true", "yes", "strict"),
            base=get("BASE", EXAMPLE),
            vocab_path=get("VOCAB"),
            volume_path=get("VOLUME"),
            counter_base=int(get("COUNTER_BASE", "1")),
        )

    def vocabulary(self) -> Vocabulary:
        if self.vocab_path:
            return load_vocabulary(self.vocab_path, "strict" if self.strict else "lax")
        return default_vocabulary()

    def volume(self) -> UwVolume | None:
        return load_volume(self.volume_path) if self.volume_path else None


def parse_and_validate(text: str, config: PipelineConfig, vocab: Vocabulary | None = None,
                       counter_base: int | None = None) -> UnlDocument:
    doc = parse_unl_document(text, counter_base=config.counter_base if counter_base is None else counter_base)
    report = validate_document(doc, vocab or config.vocabulary(), "strict" if config.strict else "lax")
    if not report.ok:
        raise ValidationFailed(report)
    return doc


def serialize(store: QuadStore, mode: ScopeMode) -> str:
    return emit_trig(store) if mode is ScopeMode.NAMED_GRAPHS else emit_turtle(store)


def unl_to_rdf_text(text: str, config: PipelineConfig, vocab: Vocabulary | None = None) -> str:
    vocab = vocab or config.vocabulary()
    doc = parse_and_validate(text, config, vocab)
    store = to_rdf(doc, config.scope_mode, config.base, vocab, config.strict)
    volume = config.volume()
    if volume is not None:
        store, _ = link_volume(store, volume, config.base)
    return serialize(store, config.scope_mode)


def merged_volume(docs: list[UnlDocument], given: UwVolume | None) -> UwVolume:
    """Lexemes derived from the documents, overridden by ``given`` entries."""
    volume = volume_from_documents(docs)
    if given is not None:
        volume.name = given.name
        volume.lexemes.update(given.lexemes)
    return volume


def prepare_for_rules(store: QuadStore, config: PipelineConfig) -> QuadStore:
    """Bring a store to reified mode and attach lexemes when none are linked."""
    if detect_scope_mode(store) is ScopeMode.NAMED_GRAPHS:
        store = convert_scope_mode(store, ScopeMode.REIFIED)
    if store.quads(None, RDF_TYPE, UNL_SENTENCE) and not store.quads(None, IS_OCCURRENCE_OF, None):
        docs = documents_from_rdf(store)
        store, _ = link_volume(store, merged_volume(docs, config.volume()), config.base)
    return store


def extract(store: QuadStore, config: PipelineConfig) -> tuple[list[ExtractedAxiom], QuadStore]:
    return run_all(prepare_for_rules(store, config))


def collect_axioms(store: QuadStore, config: PipelineConfig) -> list[ExtractedAxiom]:
    """Axioms already present in ``store`` plus those the rules extract from it."""
    found = axioms_from_rdf(store)
    if store.quads(None, RDF_TYPE, UNL_SENTENCE):
        found += extract(store, config)[0]
    return list(dict.fromkeys(found))


def report_text(axioms: list[ExtractedAxiom], reports: list[InconsistencyReport]) -> str:
    parts = ["# axioms\n", format_axioms(axioms), "\n# violations\n", format_lines(reports), "\n", format_text(reports)]
    return "".join(parts)


@dataclass
class PipelineResult:
    documents: list[UnlDocument]
    files: dict[str, str]
    axioms: list[ExtractedAxiom]
    reports: list[InconsistencyReport]


def run_pipeline(texts: list[str], config: PipelineConfig) -> PipelineResult:
    """Parse, serialize (reified), extract and check.  Counters continue
    across inputs so that every occurrence gets a distinct IRI."""
    vocab = config.vocabulary()
    docs = []
    counter = config.counter_base
    for text in texts:
        doc = parse_and_validate(text, config, vocab, counter_base=counter)
        counter = doc.next_counter(counter)
        docs.append(doc)

    files: dict[str, str] = {}
    combined = QuadStore()
    for index, doc in enumerate(docs, start=1):
        store = to_rdf(doc, ScopeMode.REIFIED, config.base, vocab, config.strict)
        first = next(doc.sentences(), None)
        name = f"{first.id if first else f'document{index}'}.trig"
        if name in files:
            name = f"{Path(name).stem}_{index}.trig"
        files[name] = emit_trig(store)
        combined = combined.union(store)

    linked, _ = link_volume(combined, merged_volume(docs, config.volume()), config.base)
    axioms, axiom_store = run_all(linked)
    reports = check(axioms)
    files["axioms.ttl"] = emit_turtle(axiom_store)
    files["report.txt"] = report_text(axioms, reports)
    return PipelineResult(docs, files, axioms, reports)


def load_rdf_file(path: str | Path) -> QuadStore:
    return load_trig(Path(path).read_text(encoding="utf-8"))
