"""Mapping between UNL documents and RDF-UNL quads.

Two scope encodings are supported.  With named graphs, a relation of an inner
scope is a triple placed in the scope's graph.  With reification, every
relation becomes a resource typed by its relation class and carrying
``unl:has_source``, ``unl:has_target`` and ``unl:has_scope``; main-scope
relations point ``has_scope`` at the sentence.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import unquote

from .core import (
    ROOT_RELATION,
    DocumentError,
    Occurrence,
    OccurrenceRef,
    Paragraph,
    RelationInstance,
    Scope,
    ScopeRef,
    Sentence,
    UnlDocument,
    UnlError,
    UriDecodeError,
    UwExpression,
    UwLexeme,
    Vocabulary,
    decode_uri_local,
    encode_uri_local,
    escape_local,
    validate_document,
)
from .parser import UnlSyntaxError, parse_master_definition, parse_uw
from .quadstore import (
    EXAMPLE,
    OWL,
    RDF,
    RDFS,
    SKOLEM,
    SKOS,
    UNL,
    Iri,
    ListNode,
    Literal,
    Quad,
    QuadStore,
)


class ScopeMode(enum.Enum):
    NAMED_GRAPHS = "named-graphs"
    REIFIED = "reified"


class RdfUnlError(UnlError):
    pass


class SchemaError(RdfUnlError):
    pass


class AmbiguityError(RdfUnlError):
    pass


def unl(local: str) -> Iri:
    return Iri(UNL + local)


RDF_TYPE = Iri(RDF + "type")
RDFS_LABEL = Iri(RDFS + "label")
RDFS_SUBCLASS = Iri(RDFS + "subClassOf")
RDFS_SUBPROPERTY = Iri(RDFS + "subPropertyOf")
RDFS_DOMAIN = Iri(RDFS + "domain")
RDFS_RANGE = Iri(RDFS + "range")
RDFS_COMMENT = Iri(RDFS + "comment")
RDFS_DATATYPE = Iri(RDFS + "Datatype")
OWL_CLASS = Iri(OWL + "Class")
OWL_OBJECT_PROPERTY = Iri(OWL + "ObjectProperty")
OWL_DATATYPE_PROPERTY = Iri(OWL + "DatatypeProperty")
OWL_ANNOTATION_PROPERTY = Iri(OWL + "AnnotationProperty")
OWL_INVERSE_OF = Iri(OWL + "inverseOf")
OWL_SAME_AS = Iri(OWL + "sameAs")
OWL_EQUIVALENT_CLASS = Iri(OWL + "equivalentClass")
OWL_ONE_OF = Iri(OWL + "oneOf")
SKOS_ALT_LABEL = Iri(SKOS + "altLabel")
SKOS_DEFINITION = Iri(SKOS + "definition")
SKOS_EXAMPLE = Iri(SKOS + "example")
SKOS_SEMANTIC_RELATION = Iri(SKOS + "semanticRelation")

UNL_DOCUMENT = unl("UNL_Document")
UNL_PARAGRAPH = unl("UNL_Paragraph")
UNL_SENTENCE = unl("UNL_Sentence")
UNL_SCOPE = unl("UNL_Scope")
UW_OCCURRENCE = unl("UW_Occurrence")
UW_LEXEME = unl("UW_Lexeme")
TOP_CONCEPT = unl("UNLKB_Top_Concept")
UNL_NODE = unl("UNL_Node")
UNIVERSAL_RELATION = unl(ROOT_RELATION)
IS_SUBSTRUCTURE_OF = unl("is_substructure_of")
IS_SUPERSTRUCTURE_OF = unl("is_superstructure_of")
HAS_ATTRIBUTE = unl("has_attribute")
HAS_SOURCE = unl("has_source")
HAS_TARGET = unl("has_target")
HAS_SCOPE = unl("has_scope")
HAS_OCCURRENCE = unl("has_occurrence")
IS_OCCURRENCE_OF = unl("is_occurrence_of")
HAS_ID = unl("has_id")
HAS_MASTER_DEFINITION = unl("has_master_definition")
ATTRIBUTE_DATATYPE = unl("attribute")
# variant spellings found in hand-written reified data
SOURCE_VARIANT = unl("source")
TARGET_VARIANT = unl("target")

_STRUCTURAL = {
    IS_SUBSTRUCTURE_OF, IS_SUPERSTRUCTURE_OF, HAS_ATTRIBUTE, HAS_SOURCE, HAS_TARGET,
    HAS_SCOPE, HAS_OCCURRENCE, IS_OCCURRENCE_OF, SOURCE_VARIANT, TARGET_VARIANT,
    unl("has_lexeme"),
}
_SCOPE_LOCAL_RE = re.compile(r"UNL_Scope_(\d+)")
_COUNTER_SUFFIX_RE = re.compile(r"_(\d{8,})$")


def member(n: int) -> Iri:
    return Iri(f"{RDF}_{n}")


def _member_index(iri: Iri) -> int | None:
    if iri.value.startswith(RDF + "_"):
        tail = iri.value[len(RDF) + 1:]
        if tail.isdigit():
            return int(tail)
    return None


def local_name(iri: Iri) -> str:
    value = iri.value
    cut = max(value.rfind("#"), value.rfind("/"))
    return value[cut + 1:]


def scope_iri(base: str, scope: Scope) -> Iri:
    return Iri(f"{base}UNL_Scope_{scope.counter:08d}")


def occurrence_iri(base: str, occ: Occurrence) -> Iri:
    return Iri(base + encode_uri_local(occ.expression.without_attributes(), occ.counter))


def lexeme_iri(base: str, expr: UwExpression) -> Iri:
    return Iri(base + encode_uri_local(expr.lexeme_expression()))


def _with_base_prefix(store: QuadStore, base: str) -> QuadStore:
    if base != EXAMPLE:
        store.prefixes["inst"] = base
    return store


# ---------------------------------------------------------------------------
# document -> RDF

def _emit_sentence(store: QuadStore, sentence: Sentence, mode: ScopeMode, base: str) -> Iri:
    s_iri = Iri(base + escape_local(sentence.id))
    store.add_triple(s_iri, RDF_TYPE, UNL_SENTENCE)
    if sentence.text is not None:
        store.add_triple(s_iri, RDFS_LABEL, Literal(sentence.text, lang=sentence.lang))

    nodes: dict = {}
    short: dict = {}
    for scope in sentence.scopes:
        iri = scope_iri(base, scope)
        nodes[ScopeRef(scope.id)] = iri
        short[ScopeRef(scope.id)] = local_name(iri)
        store.add_triple(iri, RDF_TYPE, UNL_SCOPE)
        store.add_triple(iri, RDFS_LABEL, Literal(scope.id))
        store.add_triple(iri, IS_SUBSTRUCTURE_OF, s_iri)
    for occ in sentence.occurrences:
        iri = occurrence_iri(base, occ)
        ref = OccurrenceRef(occ.key)
        nodes[ref] = iri
        short[ref] = f"{escape_local(occ.expression.headword)}_{occ.counter:08d}"
        store.add_triple(iri, RDF_TYPE, UW_OCCURRENCE)
        store.add_triple(iri, RDFS_LABEL, Literal(occ.expression.lexical_form))
        store.add_triple(iri, IS_SUBSTRUCTURE_OF, s_iri)
        for attr in occ.expression.attributes:
            store.add_triple(iri, HAS_ATTRIBUTE, Literal(".@" + attr))

    def scope_node(scope_id: str) -> Iri:
        return s_iri if scope_id == sentence.id else nodes[ScopeRef(scope_id)]

    used_names: set[str] = set()
    for rel in sentence.relations:
        src, tgt = nodes[rel.source], nodes[rel.target]
        if mode is ScopeMode.NAMED_GRAPHS:
            graph = None if rel.scope == sentence.id else scope_node(rel.scope)
            store.add_triple(src, unl(rel.label), tgt, graph)
            continue
        name = f"{short[rel.source]}--{rel.label}--{short[rel.target]}"
        if name in used_names:
            name += "--" + local_name(scope_node(rel.scope))
        used_names.add(name)
        r_iri = Iri(base + name)
        store.add_triple(r_iri, RDF_TYPE, unl(rel.label))
        store.add_triple(r_iri, HAS_SOURCE, src)
        store.add_triple(r_iri, HAS_TARGET, tgt)
        store.add_triple(r_iri, HAS_SCOPE, scope_node(rel.scope))
    return s_iri


def _emit_document(store: QuadStore, doc: UnlDocument, mode: ScopeMode, base: str) -> None:
    if not doc.paragraphs:
        return
    d_iri = Iri(base + escape_local(doc.id))
    store.add_triple(d_iri, RDF_TYPE, UNL_DOCUMENT)
    if doc.label is not None:
        store.add_triple(d_iri, RDFS_LABEL, Literal(doc.label))
    for p_index, paragraph in enumerate(doc.paragraphs, start=1):
        p_iri = Iri(base + escape_local(f"{doc.id}_P{p_index}"))
        store.add_triple(p_iri, RDF_TYPE, UNL_PARAGRAPH)
        store.add_triple(d_iri, IS_SUPERSTRUCTURE_OF, p_iri)
        store.add_triple(p_iri, IS_SUBSTRUCTURE_OF, d_iri)
        store.add_triple(d_iri, member(p_index), p_iri)
        for s_index, sentence in enumerate(paragraph.sentences, start=1):
            s_iri = _emit_sentence(store, sentence, mode, base)
            store.add_triple(p_iri, IS_SUPERSTRUCTURE_OF, s_iri)
            store.add_triple(s_iri, IS_SUBSTRUCTURE_OF, p_iri)
            store.add_triple(p_iri, member(s_index), s_iri)


def to_rdf(
    doc: UnlDocument | list[UnlDocument],
    mode: ScopeMode = ScopeMode.REIFIED,
    base: str = EXAMPLE,
    vocab: Vocabulary | None = None,
    strict: bool = False,
) -> QuadStore:
    """Serialize one document (or several) as RDF-UNL quads."""
    docs = doc if isinstance(doc, list) else [doc]
    store = _with_base_prefix(QuadStore(), base)
    for d in docs:
        report = validate_document(d, vocab, "strict" if strict else "lax")
        if not report.ok:
            raise DocumentError("invalid document: " + "; ".join(str(i) for i in report))
        _emit_document(store, d, mode, base)
    return store


# ---------------------------------------------------------------------------
# RDF -> document

@dataclass
class _SentenceInfo:
    iri: Iri
    id: str
    text: str | None
    lang: str | None
    occurrences: list[Occurrence] = field(default_factory=list)
    scopes: list[Scope] = field(default_factory=list)
    direct: list[tuple] = field(default_factory=list)
    reified: list[tuple] = field(default_factory=list)


def _single_literal(store: QuadStore, s: Iri, p: Iri) -> Literal | None:
    values = [o for o in store.objects(s, p) if isinstance(o, Literal)]
    if len(values) > 1:
        raise SchemaError(f"{s} has several {p} values")
    return values[0] if values else None


def _members(store: QuadStore, container: Iri, expected_type: Iri) -> list[Iri]:
    indexed = []
    for q in store.quads(container, None, None):
        n = _member_index(q.predicate)
        if n is not None:
            if not isinstance(q.object, Iri) or not store.quads(q.object, RDF_TYPE, expected_type):
                raise SchemaError(f"member {q.object} of {container} is not typed {expected_type}")
            indexed.append((n, q.object))
    return [iri for _, iri in sorted(indexed, key=lambda t: t[0])]


def _decode_occurrence(store: QuadStore, iri: Iri) -> tuple[UwExpression, int]:
    local = local_name(iri)
    try:
        expr, counter = decode_uri_local(local)
    except UriDecodeError:
        label = _single_literal(store, iri, RDFS_LABEL)
        m = _COUNTER_SUFFIX_RE.search(local)
        if label is None or m is None:
            raise SchemaError(f"cannot recover the UW of occurrence {iri}") from None
        try:
            expr, counter = parse_uw(label.lexical), int(m.group(1))
        except UnlSyntaxError as exc:
            raise SchemaError(f"bad label on occurrence {iri}: {exc}") from None
    if counter is None:
        raise SchemaError(f"occurrence {iri} has no counter suffix")
    return expr, counter


def _read_sentence(store: QuadStore, s_iri: Iri) -> _SentenceInfo:
    label = _single_literal(store, s_iri, RDFS_LABEL)
    info = _SentenceInfo(
        s_iri, unquote(local_name(s_iri)),
        label.lexical if label else None, label.lang if label else None,
    )
    for part in store.subjects(IS_SUBSTRUCTURE_OF, s_iri):
        if store.quads(part, RDF_TYPE, UNL_SCOPE):
            scope_label = _single_literal(store, part, RDFS_LABEL)
            m = _SCOPE_LOCAL_RE.fullmatch(local_name(part))
            if scope_label is None or m is None:
                raise SchemaError(f"scope {part} lacks a label or counter")
            info.scopes.append(Scope(scope_label.lexical, int(m.group(1))))
        elif store.quads(part, RDF_TYPE, UW_OCCURRENCE):
            expr, counter = _decode_occurrence(store, part)
            attrs = sorted(
                o.lexical[2:] if o.lexical.startswith(".@") else o.lexical
                for o in store.objects(part, HAS_ATTRIBUTE) if isinstance(o, Literal)
            )
            info.occurrences.append(Occurrence(
                UwExpression(expr.headword, expr.restrictions, expr.instance_id, tuple(attrs)), counter
            ))
    info.occurrences.sort(key=lambda o: o.counter)
    info.scopes.sort(key=lambda s: s.counter)
    return info


def _one_object(store: QuadStore, s: Iri, preds: tuple[Iri, ...], what: str) -> Iri:
    values = {o for p in preds for o in store.objects(s, p)}
    if len(values) != 1 or not isinstance(next(iter(values)), Iri):
        raise SchemaError(f"reified relation {s} needs exactly one {what}, found {len(values)}")
    return next(iter(values))


def documents_from_rdf(store: QuadStore) -> list[UnlDocument]:
    """Rebuild every document in ``store``; either scope encoding is accepted."""
    doc_iris = store.subjects(RDF_TYPE, UNL_DOCUMENT)
    sentences_typed = set(store.subjects(RDF_TYPE, UNL_SENTENCE))

    layout = []
    infos: dict[Iri, _SentenceInfo] = {}
    for d_iri in doc_iris:
        doc_label = _single_literal(store, d_iri, RDFS_LABEL)
        paragraphs = []
        for p_iri in _members(store, d_iri, UNL_PARAGRAPH):
            s_iris = _members(store, p_iri, UNL_SENTENCE)
            for s_iri in s_iris:
                infos[s_iri] = _read_sentence(store, s_iri)
            paragraphs.append(s_iris)
        layout.append((doc_label.lexical if doc_label else None, paragraphs))
    orphans = sentences_typed - set(infos)
    if orphans:
        raise SchemaError(f"sentences outside any document: {sorted(o.value for o in orphans)}")

    # node IRI -> (sentence iri, NodeRef); scope IRI -> (sentence iri, scope id)
    nodes: dict[Iri, tuple[Iri, object]] = {}
    scope_owner: dict[Iri, tuple[Iri, str]] = {}
    for s_iri, info in infos.items():
        scope_owner[s_iri] = (s_iri, info.id)
        for scope in info.scopes:
            iri = Iri(_base_of(s_iri, info.id) + f"UNL_Scope_{scope.counter:08d}")
            nodes[iri] = (s_iri, ScopeRef(scope.id))
            scope_owner[iri] = (s_iri, scope.id)
        for occ in info.occurrences:
            iri = occurrence_iri(_base_of(s_iri, info.id), occ)
            nodes[iri] = (s_iri, OccurrenceRef(occ.key))
    # occurrences whose IRI did not follow the encoding are still addressable
    for s_iri, info in infos.items():
        for part in store.subjects(IS_SUBSTRUCTURE_OF, s_iri):
            if part not in nodes and store.quads(part, RDF_TYPE, UW_OCCURRENCE):
                expr, _ = _decode_occurrence(store, part)
                nodes[part] = (s_iri, OccurrenceRef(expr.key))
            elif part not in nodes and store.quads(part, RDF_TYPE, UNL_SCOPE):
                scope_label = _single_literal(store, part, RDFS_LABEL)
                nodes[part] = (s_iri, ScopeRef(scope_label.lexical))
                scope_owner[part] = (s_iri, scope_label.lexical)

    # reified relations
    reified_subjects = {q.subject for p in (HAS_SOURCE, SOURCE_VARIANT) for q in store.quads(None, p, None)}
    for r_iri in sorted(reified_subjects, key=lambda t: t.value):
        types = [o for o in store.objects(r_iri, RDF_TYPE)
                 if isinstance(o, Iri) and o.value.startswith(UNL)]
        if len(types) != 1:
            raise SchemaError(f"reified relation {r_iri} needs exactly one relation type")
        src = _one_object(store, r_iri, (HAS_SOURCE, SOURCE_VARIANT), "source")
        tgt = _one_object(store, r_iri, (HAS_TARGET, TARGET_VARIANT), "target")
        scope = _one_object(store, r_iri, (HAS_SCOPE,), "scope")
        if src not in nodes or tgt not in nodes or scope not in scope_owner:
            raise SchemaError(f"reified relation {r_iri} references unknown nodes")
        owner, scope_id = scope_owner[scope]
        if nodes[src][0] != owner or nodes[tgt][0] != owner:
            raise SchemaError(f"reified relation {r_iri} crosses sentences")
        infos[owner].reified.append(
            (scope_id, RelationInstance(local_name(types[0]), nodes[src][1], nodes[tgt][1], scope_id))
        )

    # direct relation triples (default graph = main scope, named graph = inner scope)
    for q in store:
        if not q.predicate.value.startswith(UNL) or q.predicate in _STRUCTURAL:
            continue
        if q.subject not in nodes or q.object not in nodes:
            continue
        owner = nodes[q.subject][0]
        if nodes[q.object][0] != owner:
            raise SchemaError(f"relation {q.subject} {q.predicate} {q.object} crosses sentences")
        if q.graph is None:
            scope_id = infos[owner].id
        elif q.graph in scope_owner and scope_owner[q.graph][0] == owner:
            scope_id = scope_owner[q.graph][1]
        else:
            raise SchemaError(f"relation triple in unknown graph {q.graph}")
        infos[owner].direct.append(
            (scope_id, RelationInstance(local_name(q.predicate), nodes[q.subject][1], nodes[q.object][1], scope_id))
        )

    docs = []
    for doc_label, paragraphs in layout:
        built = []
        for s_iris in paragraphs:
            built.append(Paragraph(tuple(_build_sentence(infos[s]) for s in s_iris)))
        docs.append(UnlDocument(tuple(built), doc_label))
    return docs


def _base_of(s_iri: Iri, sentence_id: str) -> str:
    return s_iri.value[: len(s_iri.value) - len(escape_local(sentence_id))]


def _build_sentence(info: _SentenceInfo) -> Sentence:
    direct_scopes = {s for s, _ in info.direct}
    reified_scopes = {s for s, _ in info.reified}
    clash = direct_scopes & reified_scopes
    if clash:
        raise AmbiguityError(
            f"sentence {info.id}: scopes {sorted(clash)} hold both direct and reified relations"
        )
    counters = {o.key: o.counter for o in info.occurrences}
    counters.update({("scope", s.id): s.counter for s in info.scopes})
    order = {sid: i for i, sid in enumerate([info.id] + [s.id for s in info.scopes])}

    def node_counter(ref):
        return counters.get(("scope", ref.scope_id), 0) if isinstance(ref, ScopeRef) else counters.get(ref.key, 0)

    relations = sorted(
        {r for _, r in info.direct + info.reified},
        key=lambda r: (order.get(r.scope, len(order)), node_counter(r.source), r.label, node_counter(r.target)),
    )
    return Sentence(info.id, tuple(info.occurrences), tuple(info.scopes), tuple(relations), info.text, info.lang)


def from_rdf(store: QuadStore) -> UnlDocument:
    docs = documents_from_rdf(store)
    if not docs:
        return UnlDocument()
    if len(docs) > 1:
        raise SchemaError(f"store holds {len(docs)} documents; use documents_from_rdf")
    return docs[0]


# ---------------------------------------------------------------------------
# scope-mode conversion

def detect_scope_mode(store: QuadStore) -> ScopeMode | None:
    reified = bool(store.quads(None, HAS_SOURCE, None) or store.quads(None, SOURCE_VARIANT, None))
    if store.has_named_graphs() and not reified:
        return ScopeMode.NAMED_GRAPHS
    if reified:
        return ScopeMode.REIFIED
    # only main-scope relations, or none at all: direct triples mean named graphs
    for q in store:
        if q.predicate.value.startswith(UNL) and q.predicate not in _STRUCTURAL \
                and store.quads(q.subject, RDF_TYPE, UW_OCCURRENCE) and isinstance(q.object, Iri) \
                and (store.quads(q.object, RDF_TYPE, UW_OCCURRENCE) or store.quads(q.object, RDF_TYPE, UNL_SCOPE)):
            return ScopeMode.NAMED_GRAPHS
    return None


def _owned_quads(store: QuadStore, docs: list[UnlDocument]) -> set[Quad]:
    """Quads that encode the documents themselves (as opposed to lexeme links,
    axioms or other data sharing the store)."""
    structure = set()
    for cls in (UNL_DOCUMENT, UNL_PARAGRAPH, UNL_SENTENCE, UNL_SCOPE, UW_OCCURRENCE):
        structure.update(store.subjects(RDF_TYPE, cls))
    scope_graphs = set(store.subjects(RDF_TYPE, UNL_SCOPE))
    reified = {q.subject for p in (HAS_SOURCE, SOURCE_VARIANT) for q in store.quads(None, p, None)}
    keep_predicates = {RDF_TYPE, RDFS_LABEL, HAS_ATTRIBUTE, IS_SUBSTRUCTURE_OF, IS_SUPERSTRUCTURE_OF}
    owned = set()
    for q in store:
        if q.graph in scope_graphs or q.subject in reified:
            owned.add(q)
        elif q.subject in structure:
            if q.predicate in keep_predicates or _member_index(q.predicate) is not None:
                owned.add(q)
            elif q.predicate.value.startswith(UNL) and q.predicate not in _STRUCTURAL and q.object in structure:
                owned.add(q)
    return owned


def _document_base(store: QuadStore, doc: UnlDocument) -> str:
    for d_iri in store.subjects(RDF_TYPE, UNL_DOCUMENT):
        name = escape_local(doc.id)
        if d_iri.value.endswith(name):
            return d_iri.value[: -len(name)]
    return EXAMPLE


def convert_scope_mode(store: QuadStore, target: ScopeMode) -> QuadStore:
    """Re-encode every document of ``store`` in ``target`` mode; unrelated
    quads (lexeme links, axioms, ...) are carried over unchanged."""
    docs = documents_from_rdf(store)
    foreign = set(store) - _owned_quads(store, docs)
    result = QuadStore(prefixes=store.prefixes)
    for doc in docs:
        _emit_document(result, doc, target, _document_base(store, doc))
    result.update(foreign)
    return result


# ---------------------------------------------------------------------------
# UW volumes and lexeme linking

@dataclass
class UwVolume:
    name: str
    lexemes: dict[str, UwLexeme] = field(default_factory=dict)

    def add(self, lexeme: UwLexeme) -> None:
        self.lexemes[lexeme.expression.lexical_form] = lexeme

    def get(self, expr: UwExpression) -> UwLexeme | None:
        return self.lexemes.get(expr.lexical_form)


def parse_volume(text: str, name: str) -> UwVolume:
    """Volume file: one ``expression | master_definition | id`` per line."""
    volume = UwVolume(name)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) > 3:
            raise RdfUnlError(f"volume line {lineno}: too many fields")
        fields += [""] * (3 - len(fields))
        try:
            expr = parse_uw(fields[0])
            if fields[1]:
                parse_master_definition(fields[1])
        except UnlSyntaxError as exc:
            raise RdfUnlError(f"volume line {lineno}: {exc}") from None
        if expr.instance_id is not None or expr.attributes:
            raise RdfUnlError(f"volume line {lineno}: lexemes take no instance id or attributes")
        volume.add(UwLexeme(expr, fields[1] or None, fields[2] or None, name))
    return volume


def load_volume(path: str | Path, name: str | None = None) -> UwVolume:
    path = Path(path)
    return parse_volume(path.read_text(encoding="utf-8"), name or path.stem)


def volume_from_documents(docs: list[UnlDocument], name: str = "Document_UW_Volume") -> UwVolume:
    """A bare volume with one lexeme per distinct UW used in ``docs``."""
    volume = UwVolume(name)
    for doc in docs:
        for sentence in doc.sentences():
            for occ in sentence.occurrences:
                expr = occ.expression.lexeme_expression()
                if volume.get(expr) is None:
                    volume.add(UwLexeme(expr, volume=name))
    return volume


def lexeme_links(lexeme: UwLexeme) -> list[tuple[str, str, UwExpression]]:
    """``(relation, direction, target UW)`` edges of a lexeme, read from its
    master definition when there is one, else from its restrictions."""
    if lexeme.master_definition:
        _, items = parse_master_definition(lexeme.master_definition)
        return list(items)
    return [(r.relation, r.direction, r.target_expression()) for r in lexeme.expression.restrictions]


def _emit_lexeme(store: QuadStore, lexeme: UwLexeme, base: str, volume_class: Iri | None) -> Iri:
    iri = lexeme_iri(base, lexeme.expression)
    store.add_triple(iri, RDF_TYPE, UW_LEXEME)
    if volume_class is not None:
        store.add_triple(iri, RDF_TYPE, volume_class)
    store.add_triple(iri, RDFS_LABEL, Literal(lexeme.expression.lexical_form))
    if lexeme.master_definition:
        store.add_triple(iri, HAS_MASTER_DEFINITION, Literal(lexeme.master_definition))
    if lexeme.uw_id:
        store.add_triple(iri, HAS_ID, Literal(lexeme.uw_id))
    for relation, direction, target in lexeme_links(lexeme):
        t_iri = lexeme_iri(base, target)
        if direction == ">":
            store.add_triple(iri, unl(relation), t_iri)
        else:
            store.add_triple(t_iri, unl(relation), iri)
    return iri


@dataclass
class LinkSummary:
    matched: list[Iri] = field(default_factory=list)
    unmatched: list[Iri] = field(default_factory=list)


def link_volume(store: QuadStore, volume: UwVolume, base: str = EXAMPLE) -> tuple[QuadStore, LinkSummary]:
    """Attach each occurrence to its lexeme in ``volume``.  Returns a new store
    and the lists of linked and unlinked occurrences."""
    result = store.copy()
    summary = LinkSummary()
    volume_class = Iri(base + escape_local(volume.name))
    emitted = False
    for occ in store.subjects(RDF_TYPE, UW_OCCURRENCE):
        try:
            expr, _ = _decode_occurrence(store, occ)
        except SchemaError:
            summary.unmatched.append(occ)
            continue
        lexeme = volume.get(expr)
        if lexeme is None:
            summary.unmatched.append(occ)
            continue
        lex_iri = _emit_lexeme(result, lexeme, base, volume_class)
        result.add_triple(lex_iri, HAS_OCCURRENCE, occ)
        result.add_triple(occ, IS_OCCURRENCE_OF, lex_iri)
        summary.matched.append(occ)
        emitted = True
    if emitted:
        result.add_triple(volume_class, RDFS_SUBCLASS, UW_LEXEME)
    return result, summary


# ---------------------------------------------------------------------------
# UNL knowledge base

@dataclass(frozen=True)
class TopConcept:
    name: str


@dataclass
class Unlkb:
    lexemes: list[UwLexeme] = field(default_factory=list)
    top_concepts: list[TopConcept] = field(default_factory=list)
    edges: list[tuple] = field(default_factory=list)  # (UwExpression | TopConcept, relation, same)

    @classmethod
    def from_volume(cls, volume: UwVolume) -> Unlkb:
        """Build the semantic network spanned by the master definitions; bare
        headword targets outside the volume become top concepts."""
        kb = cls(lexemes=list(volume.lexemes.values()))
        tops: dict[str, TopConcept] = {}
        for lexeme in volume.lexemes.values():
            for relation, direction, target in lexeme_links(lexeme):
                if volume.get(target) is None and not target.restrictions:
                    node = tops.setdefault(target.headword, TopConcept(target.headword))
                else:
                    node = target.lexeme_expression()
                edge = (lexeme.expression, relation, node) if direction == ">" else (node, relation, lexeme.expression)
                kb.edges.append(edge)
        kb.top_concepts = list(tops.values())
        return kb


_KB_PREDICATES = {"icl": RDFS_SUBCLASS, "iof": RDF_TYPE, "equ": OWL_SAME_AS}


def _kb_node(base: str, node) -> Iri:
    if isinstance(node, TopConcept):
        return Iri(base + escape_local(node.name))
    return lexeme_iri(base, node)


def emit_unlkb(kb: Unlkb, base: str = EXAMPLE, vocab: Vocabulary | None = None, strict: bool = False) -> QuadStore:
    store = _with_base_prefix(QuadStore(), base)
    for lexeme in kb.lexemes:
        iri = lexeme_iri(base, lexeme.expression)
        store.add_triple(iri, RDF_TYPE, UW_LEXEME)
        store.add_triple(iri, RDFS_LABEL, Literal(lexeme.expression.lexical_form))
        if lexeme.master_definition:
            store.add_triple(iri, HAS_MASTER_DEFINITION, Literal(lexeme.master_definition))
        if lexeme.uw_id:
            store.add_triple(iri, HAS_ID, Literal(lexeme.uw_id))
    for top in kb.top_concepts:
        iri = _kb_node(base, top)
        store.add_triple(iri, RDF_TYPE, TOP_CONCEPT)
        store.add_triple(iri, RDFS_LABEL, Literal(top.name))
    for source, relation, target in kb.edges:
        if strict and vocab is not None and not vocab.is_relation(relation):
            raise RdfUnlError(f"unknown relation {relation!r} in UNLKB edge")
        predicate = _KB_PREDICATES.get(relation, unl(relation))
        store.add_triple(_kb_node(base, source), predicate, _kb_node(base, target))
    return store


# ---------------------------------------------------------------------------
# schema

def _declare_class(store: QuadStore, cls: Iri, parent: Iri | None = None) -> None:
    store.add_triple(cls, RDF_TYPE, OWL_CLASS)
    if parent is not None:
        store.add_triple(cls, RDFS_SUBCLASS, parent)


def emit_schema(vocab: Vocabulary, include_attributes: bool = True) -> QuadStore:
    store = QuadStore()
    # class skeleton
    for cls, parent in [
        (UNL_NODE, None),
        (unl("UNLKB_Node"), UNL_NODE),
        (unl("UNL_Graph_Node"), UNL_NODE),
        (unl("Universal_Word"), None),
        (UW_LEXEME, unl("UNLKB_Node")),
        (TOP_CONCEPT, unl("UNLKB_Node")),
        (UW_OCCURRENCE, unl("UNL_Graph_Node")),
        (UNL_SCOPE, unl("UNL_Graph_Node")),
        (UNL_DOCUMENT, unl("UNL_Structure")),
        (UNL_PARAGRAPH, unl("UNL_Structure")),
        (UNL_SENTENCE, unl("UNL_Structure")),
        (unl("UNL_Structure"), None),
    ]:
        _declare_class(store, cls, parent)
    for sub in (UW_LEXEME, UW_OCCURRENCE, TOP_CONCEPT):
        store.add_triple(sub, RDFS_SUBCLASS, unl("Universal_Word"))

    for prop, inverse in [(IS_SUBSTRUCTURE_OF, IS_SUPERSTRUCTURE_OF), (HAS_OCCURRENCE, IS_OCCURRENCE_OF)]:
        store.add_triple(prop, RDF_TYPE, OWL_OBJECT_PROPERTY)
        store.add_triple(inverse, RDF_TYPE, OWL_OBJECT_PROPERTY)
        store.add_triple(inverse, OWL_INVERSE_OF, prop)
    store.add_triple(HAS_OCCURRENCE, RDFS_DOMAIN, UW_LEXEME)
    store.add_triple(HAS_OCCURRENCE, RDFS_RANGE, UW_OCCURRENCE)
    for prop, rng in [(HAS_SOURCE, UNL_NODE), (HAS_TARGET, UNL_NODE), (HAS_SCOPE, None)]:
        store.add_triple(prop, RDF_TYPE, OWL_OBJECT_PROPERTY)
        store.add_triple(prop, RDFS_DOMAIN, UNIVERSAL_RELATION)
        if rng is not None:
            store.add_triple(prop, RDFS_RANGE, rng)
    for prop in (HAS_ID, HAS_MASTER_DEFINITION):
        store.add_triple(prop, RDF_TYPE, OWL_ANNOTATION_PROPERTY)
        store.add_triple(prop, RDFS_DOMAIN, UW_LEXEME)

    # relation hierarchy: properties that double as classes for reification
    store.add_triple(UNIVERSAL_RELATION, RDF_TYPE, OWL_CLASS)
    store.add_triple(UNIVERSAL_RELATION, RDF_TYPE, OWL_OBJECT_PROPERTY)
    store.add_triple(UNIVERSAL_RELATION, RDFS_LABEL, Literal(ROOT_RELATION))
    store.add_triple(UNIVERSAL_RELATION, RDFS_SUBPROPERTY, SKOS_SEMANTIC_RELATION)
    store.add_triple(UNIVERSAL_RELATION, RDFS_DOMAIN, UNL_NODE)
    store.add_triple(UNIVERSAL_RELATION, RDFS_RANGE, UNL_NODE)
    for label, info in vocab.relations.items():
        iri = unl(label)
        store.add_triple(iri, RDF_TYPE, OWL_CLASS)
        store.add_triple(iri, RDF_TYPE, OWL_OBJECT_PROPERTY)
        store.add_triple(iri, RDFS_LABEL, Literal(label))
        for parent in info.parents:
            store.add_triple(iri, RDFS_SUBPROPERTY, unl(parent))
            store.add_triple(iri, RDFS_SUBCLASS, unl(parent))
        store.add_triple(iri, RDFS_DOMAIN, UNL_NODE)
        store.add_triple(iri, RDFS_RANGE, UNL_NODE)
        if info.alt_label:
            store.add_triple(iri, SKOS_ALT_LABEL, Literal(info.alt_label, lang="en"))
        if info.definition:
            store.add_triple(iri, SKOS_DEFINITION, Literal(info.definition, lang="en"))
        if info.example:
            store.add_triple(iri, SKOS_EXAMPLE, Literal(info.example, lang="en"))

    if include_attributes:
        values = Iri(SKOLEM + "attribute_values")
        store.add_triple(ATTRIBUTE_DATATYPE, RDF_TYPE, RDFS_DATATYPE)
        store.add_triple(ATTRIBUTE_DATATYPE, RDFS_LABEL, Literal("Universal Attribute"))
        store.add_triple(ATTRIBUTE_DATATYPE, OWL_EQUIVALENT_CLASS, values)
        store.add_triple(values, RDF_TYPE, RDFS_DATATYPE)
        store.add_triple(values, OWL_ONE_OF, ListNode(tuple(Literal(".@" + a) for a in vocab.attributes)))
        store.add_triple(HAS_ATTRIBUTE, RDF_TYPE, OWL_DATATYPE_PROPERTY)
        store.add_triple(HAS_ATTRIBUTE, RDFS_DOMAIN, UNL_NODE)
        store.add_triple(HAS_ATTRIBUTE, RDFS_RANGE, ATTRIBUTE_DATATYPE)
        for name, info in vocab.attributes.items():
            iri = Iri(UNL + "@" + name)
            store.add_triple(iri, RDF_TYPE, OWL_CLASS)
            store.add_triple(iri, RDFS_LABEL, Literal(name))
            if info.parent:
                store.add_triple(iri, RDFS_SUBCLASS, unl(info.parent))
            if info.definition:
                store.add_triple(iri, SKOS_DEFINITION, Literal(info.definition, lang="en"))
    return store
