"""Extraction of OWL axioms from reified RDF-UNL graphs.

Each rule is a conjunctive pattern over the store followed by a construct
step.  Rules return ``ExtractedAxiom`` values; ``materialize`` turns them into
triples.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Union

from .core import UnlError
from .quadstore import (
    OWL,
    RDF,
    RDFS,
    SKOLEM,
    UNL,
    Iri,
    ListNode,
    Literal,
    QuadStore,
    Var,
    compact_iri,
    integer,
)

log = logging.getLogger(__name__)

RDF_TYPE = Iri(RDF + "type")
RDFS_LABEL = Iri(RDFS + "label")
RDFS_DOMAIN = Iri(RDFS + "domain")
RDFS_RANGE = Iri(RDFS + "range")
RDFS_DATATYPE = Iri(RDFS + "Datatype")
OWL_CLASS = Iri(OWL + "Class")
OWL_DATATYPE_PROPERTY = Iri(OWL + "DatatypeProperty")
OWL_CARDINALITY = Iri(OWL + "cardinality")
OWL_EQUIVALENT_CLASS = Iri(OWL + "equivalentClass")
OWL_ONE_OF = Iri(OWL + "oneOf")
IS_OCCURRENCE_OF = Iri(UNL + "is_occurrence_of")
HAS_SCOPE = Iri(UNL + "has_scope")
_SOURCE_PREDICATES = (Iri(UNL + "has_source"), Iri(UNL + "source"))
_TARGET_PREDICATES = (Iri(UNL + "has_target"), Iri(UNL + "target"))

_INTEGER_RE = re.compile(r"[+-]?\d+")
_COPULA_RE = re.compile(r"icl>be(?![A-Za-z0-9_])")


class RuleError(UnlError):
    pass


@dataclass(frozen=True)
class Cardinality:
    subject: str
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("cardinality must be non-negative")


@dataclass(frozen=True)
class Enumeration:
    subject: str
    members: tuple[str, ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("enumeration needs at least one member")
        if len(set(self.members)) != len(self.members):
            raise ValueError("enumeration members must be distinct")


@dataclass(frozen=True)
class DatatypePropertyDecl:
    property: str
    domain: str
    range: str


@dataclass(frozen=True)
class ClassDecl:
    iri: str


@dataclass(frozen=True)
class DatatypeDecl:
    iri: str


@dataclass(frozen=True)
class Assertion:
    instance: str
    cls: str
    property: str | None = None
    value: str | None = None


ExtractedAxiom = Union[Cardinality, Enumeration, DatatypePropertyDecl, ClassDecl, DatatypeDecl, Assertion]


@dataclass(frozen=True)
class _Rel:
    node: Iri
    source: Iri
    target: Iri
    scope: Iri | None


def _relations(store: QuadStore, label: str) -> list[_Rel]:
    found = []
    for node in store.subjects(RDF_TYPE, Iri(UNL + label)):
        sources = {o for p in _SOURCE_PREDICATES for o in store.objects(node, p)}
        targets = {o for p in _TARGET_PREDICATES for o in store.objects(node, p)}
        if len(sources) != 1 or len(targets) != 1:
            continue
        found.append(_Rel(node, sources.pop(), targets.pop(), store.value(node, HAS_SCOPE)))
    return sorted(found, key=lambda r: r.node.value)


def _lexeme(store: QuadStore, occurrence: Iri) -> Iri | None:
    lexemes = sorted(store.objects(occurrence, IS_OCCURRENCE_OF), key=lambda t: t.value)
    return lexemes[0] if lexemes else None


def _label(store: QuadStore, node: Iri) -> str | None:
    labels = sorted(o.lexical for o in store.objects(node, RDFS_LABEL) if isinstance(o, Literal))
    return labels[0] if labels else None


def rule_cardinality(store: QuadStore) -> list[ExtractedAxiom]:
    out = []
    for rel in _relations(store, "qua"):
        lex = _lexeme(store, rel.source)
        label = _label(store, rel.target)
        if lex is None or label is None:
            continue
        if not _INTEGER_RE.fullmatch(label.strip()):
            log.warning("qua target %s has non-integer label %r; skipped", rel.target.value, label)
            continue
        out.append(Cardinality(lex.value, int(label)))
    return out


def and_chain(store: QuadStore, start: Iri) -> list[Iri] | None:
    """Nodes reached from ``start`` along ``and`` edges (source to target).
    Returns None when the chain branches; raises RuleError on a cycle."""
    successors: dict[Iri, list[Iri]] = {}
    for rel in _relations(store, "and"):
        successors.setdefault(rel.source, []).append(rel.target)
    chain = [start]
    seen = {start}
    node = start
    while node in successors:
        nexts = sorted(set(successors[node]), key=lambda t: t.value)
        if len(nexts) > 1:
            return None
        node = nexts[0]
        if node in seen:
            cycle = chain[chain.index(node):] + [node]
            raise RuleError("cyclic and-chain: " + " -> ".join(n.value for n in cycle))
        seen.add(node)
        chain.append(node)
    return chain


def rule_enumeration(store: QuadStore) -> list[ExtractedAxiom]:
    out = []
    for rel in _relations(store, "cnt"):
        lex = _lexeme(store, rel.source)
        if lex is None:
            continue
        lex_label = _label(store, lex)
        if lex_label is None or "icl>attribute" not in lex_label:
            continue
        chain = and_chain(store, rel.target)
        if chain is None:
            log.warning("and-chain from %s branches; enumeration skipped", rel.target.value)
            continue
        if len(chain) < 2:
            continue
        labels = [_label(store, n) for n in chain]
        if None in labels:
            log.warning("unlabelled member in enumeration of %s; skipped", lex.value)
            continue
        if len(set(labels)) != len(labels):
            log.warning("repeated member in enumeration of %s; skipped", lex.value)
            continue
        out.append(Enumeration(lex.value, tuple(labels)))
        out.append(DatatypeDecl(lex.value))
    return out


def _property_matches(store: QuadStore) -> list[tuple[Iri, Iri, Iri, Iri | None]]:
    """(X, Y, Z, scope) with aoj X->Y and obj X->Z sharing a scope and X copular."""
    aoj = _relations(store, "aoj")
    obj = _relations(store, "obj")
    matches = []
    for a in aoj:
        for o in obj:
            if a.source != o.source or a.scope != o.scope:
                continue
            xlex = _lexeme(store, a.source)
            if xlex is None or _lexeme(store, a.target) is None or _lexeme(store, o.target) is None:
                continue
            if not _COPULA_RE.search(_label(store, xlex) or ""):
                continue
            matches.append((a.source, a.target, o.target, a.scope))
    return matches


def rule_datatype_property(store: QuadStore) -> list[ExtractedAxiom]:
    out = []
    for x, y, z, _ in _property_matches(store):
        xlex, ylex, zlex = (_lexeme(store, n).value for n in (x, y, z))
        out += [
            DatatypePropertyDecl(xlex, ylex, zlex),
            ClassDecl(ylex),
            DatatypeDecl(zlex),
            Assertion(y.value, ylex),
        ]
    return out


def rule_instantiate_property(store: QuadStore) -> list[ExtractedAxiom]:
    out = []
    mods = _relations(store, "mod")
    for x, y, z, scope in _property_matches(store):
        for m in mods:
            if m.source != z or m.scope != scope:
                continue
            value = _label(store, m.target)
            if value is None:
                continue
            out.append(Assertion(y.value, _lexeme(store, y).value, _lexeme(store, x).value, value))
    return out


RULES = (rule_cardinality, rule_enumeration, rule_datatype_property, rule_instantiate_property)


def run_all(store: QuadStore) -> tuple[list[ExtractedAxiom], QuadStore]:
    axioms: list[ExtractedAxiom] = []
    seen = set()
    for rule in RULES:
        for axiom in rule(store):
            if axiom not in seen:
                seen.add(axiom)
                axioms.append(axiom)
    return axioms, materialize(axioms)


def materialize(axioms: list[ExtractedAxiom]) -> QuadStore:
    out = QuadStore()
    enum_count = 0
    for ax in axioms:
        if isinstance(ax, Cardinality):
            out.add_triple(Iri(ax.subject), OWL_CARDINALITY, integer(ax.n))
        elif isinstance(ax, Enumeration):
            enum_count += 1
            node = Iri(f"{SKOLEM}enumeration_{enum_count:04d}")
            out.add_triple(Iri(ax.subject), OWL_EQUIVALENT_CLASS, node)
            out.add_triple(node, RDF_TYPE, RDFS_DATATYPE)
            out.add_triple(node, OWL_ONE_OF, ListNode(tuple(Literal(m) for m in ax.members)))
        elif isinstance(ax, DatatypePropertyDecl):
            p = Iri(ax.property)
            out.add_triple(p, RDF_TYPE, OWL_DATATYPE_PROPERTY)
            out.add_triple(p, RDFS_DOMAIN, Iri(ax.domain))
            out.add_triple(p, RDFS_RANGE, Iri(ax.range))
        elif isinstance(ax, ClassDecl):
            out.add_triple(Iri(ax.iri), RDF_TYPE, OWL_CLASS)
        elif isinstance(ax, DatatypeDecl):
            out.add_triple(Iri(ax.iri), RDF_TYPE, RDFS_DATATYPE)
        elif isinstance(ax, Assertion):
            out.add_triple(Iri(ax.instance), RDF_TYPE, Iri(ax.cls))
            if ax.property is not None and ax.value is not None:
                out.add_triple(Iri(ax.instance), Iri(ax.property), Literal(ax.value))
    return out


def axioms_from_rdf(store: QuadStore) -> list[ExtractedAxiom]:
    """Read back axioms written by ``materialize`` (or hand-written in the
    same shapes)."""
    axioms: list[ExtractedAxiom] = []
    for b in store.match_all([(Var("s"), OWL_CARDINALITY, Var("n"))]):
        n = b["n"]
        if isinstance(n, Literal) and _INTEGER_RE.fullmatch(n.lexical):
            axioms.append(Cardinality(b["s"].value, int(n.lexical)))
    for b in store.match_all([(Var("s"), OWL_EQUIVALENT_CLASS, Var("d")), (Var("d"), OWL_ONE_OF, Var("l"))]):
        if isinstance(b["l"], ListNode) and b["l"].items:
            axioms.append(Enumeration(b["s"].value, tuple(
                t.lexical if isinstance(t, Literal) else t.value for t in b["l"].items
            )))
    properties = []
    for b in store.match_all([
        (Var("p"), RDF_TYPE, OWL_DATATYPE_PROPERTY), (Var("p"), RDFS_DOMAIN, Var("d")), (Var("p"), RDFS_RANGE, Var("r")),
    ]):
        if b["p"].value.startswith(UNL):
            continue
        properties.append(b["p"])
        axioms.append(DatatypePropertyDecl(b["p"].value, b["d"].value, b["r"].value))
    classes = store.subjects(RDF_TYPE, OWL_CLASS)
    for c in sorted(classes, key=lambda t: t.value):
        if not c.value.startswith(UNL):
            axioms.append(ClassDecl(c.value))
    for d in sorted(store.subjects(RDF_TYPE, RDFS_DATATYPE), key=lambda t: t.value):
        if not d.value.startswith((SKOLEM, UNL)):
            axioms.append(DatatypeDecl(d.value))
    for c in sorted(classes, key=lambda t: t.value):
        if c.value.startswith(UNL):
            continue
        for inst in sorted(store.subjects(RDF_TYPE, c), key=lambda t: t.value):
            axioms.append(Assertion(inst.value, c.value))
            for p in properties:
                for v in sorted(store.objects(inst, p), key=lambda t: t.sort_key()):
                    if isinstance(v, Literal):
                        axioms.append(Assertion(inst.value, c.value, p.value, v.lexical))
    return list(dict.fromkeys(axioms))


def format_axiom(ax: ExtractedAxiom, prefixes: dict[str, str] | None = None) -> str:
    def c(iri: str) -> str:
        return compact_iri(Iri(iri), prefixes)

    if isinstance(ax, Cardinality):
        return f"CARD {c(ax.subject)} {ax.n}"
    if isinstance(ax, Enumeration):
        return f"ENUM {c(ax.subject)} [" + ",".join(ax.members) + "]"
    if isinstance(ax, DatatypePropertyDecl):
        return f"DTPROP {c(ax.property)} {c(ax.domain)} {c(ax.range)}"
    if isinstance(ax, ClassDecl):
        return f"CLASS {c(ax.iri)}"
    if isinstance(ax, DatatypeDecl):
        return f"DATATYPE {c(ax.iri)}"
    if ax.property is None:
        return f"ASSERT {c(ax.instance)} {c(ax.cls)}"
    return f'ASSERT {c(ax.instance)} {c(ax.cls)} {c(ax.property)} "{ax.value}"'


def format_axioms(axioms: list[ExtractedAxiom], prefixes: dict[str, str] | None = None) -> str:
    return "".join(format_axiom(ax, prefixes) + "\n" for ax in axioms)
