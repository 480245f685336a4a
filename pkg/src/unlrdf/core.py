"""Typed model of UNL documents, the relation/attribute vocabulary and the
URI local-name convention used when UNL nodes become RDF resources.

A sentence is a hypergraph: occurrences of Universal Words (UWs) are linked by
labelled binary relations, and every relation belongs to a scope.  The main
scope of a sentence is never declared explicitly; it shares the sentence id.
"""

from __future__ import annotations

import functools
import re
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Union
from urllib.parse import unquote

ROOT_RELATION = "Universal_Relation"
ENTRY = "entry"

# characters that may never appear in a headword or restriction target
_FORBIDDEN_WORD_CHARS = set("()<>,:{}[]\"") | {" ", "\t", "\n", "\r"}
RELATION_LABEL_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
ATTRIBUTE_RE = re.compile(r"[A-Za-z0-9_-]+")
INSTANCE_RE = re.compile(r"[A-Za-z0-9_]+")


class UnlError(Exception):
    """Base class for every error raised by this package."""


class VocabularyError(UnlError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UriDecodeError(UnlError):
    pass


class DocumentError(UnlError):
    pass


def is_valid_word(text: str) -> bool:
    """True when ``text`` can stand as a headword or restriction target."""
    if not text or ".@" in text:
        return False
    return not any(ch in _FORBIDDEN_WORD_CHARS or ch.isspace() or unicodedata.category(ch) == "Cc" for ch in text)


@dataclass(frozen=True, order=True)
class Restriction:
    relation: str
    direction: str  # ">" (outgoing) or "<" (incoming)
    targets: tuple[str, ...]

    def __post_init__(self):
        if self.direction not in (">", "<"):
            raise ValueError(f"bad restriction direction {self.direction!r}")
        if not self.targets:
            raise ValueError("restriction target chain is empty")

    def __str__(self) -> str:
        return f"{self.relation}{self.direction}{'>'.join(self.targets)}"

    def target_expression(self) -> UwExpression:
        """The UW a restriction points at; ``icl>show>thing`` abbreviates
        ``show(icl>thing)``."""
        head, rest = self.targets[0], self.targets[1:]
        if not rest:
            return UwExpression(head)
        return UwExpression(head, (Restriction(self.relation, ">", rest),))


@dataclass(frozen=True)
class UwExpression:
    headword: str
    restrictions: tuple[Restriction, ...] = ()
    instance_id: str | None = None
    attributes: tuple[str, ...] = ()

    def __post_init__(self):
        if not is_valid_word(self.headword):
            raise ValueError(f"invalid headword {self.headword!r}")

    def __str__(self) -> str:
        text = self.headword
        if self.restrictions:
            text += "(" + ",".join(str(r) for r in self.restrictions) + ")"
        if self.instance_id is not None:
            text += ":" + self.instance_id
        return text + "".join(".@" + a for a in self.attributes)

    @property
    def key(self) -> str:
        """Identity of an occurrence inside a sentence: attributes excluded."""
        return str(self.without_attributes())

    @property
    def lexical_form(self) -> str:
        """The lexeme text, as stored in ``rdfs:label``."""
        return str(self.lexeme_expression())

    def without_attributes(self) -> UwExpression:
        return replace(self, attributes=())

    def lexeme_expression(self) -> UwExpression:
        return replace(self, instance_id=None, attributes=())

    def has_attribute(self, name: str) -> bool:
        return name in self.attributes


@dataclass(frozen=True)
class UwLexeme:
    expression: UwExpression
    master_definition: str | None = None
    uw_id: str | None = None
    volume: str | None = None

    def __post_init__(self):
        if self.expression.instance_id is not None or self.expression.attributes:
            raise ValueError("a lexeme carries neither instance id nor attributes")


@dataclass(frozen=True, order=True)
class OccurrenceRef:
    key: str


@dataclass(frozen=True, order=True)
class ScopeRef:
    scope_id: str


NodeRef = Union[OccurrenceRef, ScopeRef]


@dataclass(frozen=True)
class RelationInstance:
    label: str
    source: NodeRef
    target: NodeRef
    scope: str


@dataclass(frozen=True)
class Occurrence:
    expression: UwExpression
    counter: int

    @property
    def key(self) -> str:
        return self.expression.key


@dataclass(frozen=True)
class Scope:
    id: str
    counter: int

    @property
    def label(self) -> str:
        return self.id


def _ref_signature(ref: NodeRef) -> tuple[str, str]:
    if isinstance(ref, ScopeRef):
        return ("scope", ref.scope_id)
    return ("occ", ref.key)


@dataclass(frozen=True)
class Sentence:
    id: str
    occurrences: tuple[Occurrence, ...] = ()
    scopes: tuple[Scope, ...] = ()
    relations: tuple[RelationInstance, ...] = ()
    text: str | None = None
    lang: str | None = None

    @property
    def main_scope(self) -> str:
        return self.id

    @functools.cached_property
    def _occurrence_index(self) -> dict[str, Occurrence]:
        return {o.key: o for o in self.occurrences}

    @functools.cached_property
    def _scope_index(self) -> dict[str, Scope]:
        return {s.id: s for s in self.scopes}

    def occurrence(self, key: str) -> Occurrence:
        return self._occurrence_index[key]

    def has_occurrence(self, key: str) -> bool:
        return key in self._occurrence_index

    def scope(self, scope_id: str) -> Scope:
        return self._scope_index[scope_id]

    def scope_ids(self) -> list[str]:
        return [self.id] + [s.id for s in self.scopes]

    def canonical(self) -> tuple:
        occurrences = frozenset(
            (o.key, frozenset(o.expression.attributes)) for o in self.occurrences
        )
        relations = tuple(sorted(
            (r.label, _ref_signature(r.source), _ref_signature(r.target), r.scope)
            for r in self.relations
        ))
        return (self.id, self.text, self.lang, occurrences,
                frozenset(s.id for s in self.scopes), relations)


@dataclass(frozen=True)
class Paragraph:
    sentences: tuple[Sentence, ...] = ()


@dataclass(frozen=True)
class UnlDocument:
    paragraphs: tuple[Paragraph, ...] = ()
    label: str | None = None

    def sentences(self) -> Iterator[Sentence]:
        for paragraph in self.paragraphs:
            yield from paragraph.sentences

    @property
    def id(self) -> str:
        """Resource name of the document; derived when no label was given."""
        if self.label is not None:
            return self.label
        first = next(self.sentences(), None)
        return f"D_{first.id}" if first is not None else "D"

    def canonical(self) -> tuple:
        """Structural identity: ignores occurrence counters, relation order and
        attribute order."""
        return (self.label, tuple(
            tuple(s.canonical() for s in p.sentences) for p in self.paragraphs
        ))

    def structurally_equal(self, other: UnlDocument) -> bool:
        return self.canonical() == other.canonical()

    def next_counter(self, default: int = 1) -> int:
        counters = [o.counter for s in self.sentences() for o in s.occurrences]
        counters += [sc.counter for s in self.sentences() for sc in s.scopes]
        return max(counters) + 1 if counters else default


def build_sentence(
    sentence_id: str,
    relations: Iterable[tuple[str, UwExpression | ScopeRef, UwExpression | ScopeRef, str | None]] = (),
    isolated: Iterable[UwExpression] = (),
    *,
    text: str | None = None,
    lang: str | None = None,
    counter_start: int = 1,
) -> Sentence:
    """Assemble a sentence from relation tuples ``(label, source, target, scope)``.

    ``scope`` None means the main scope.  Identical expressions (same key) fold
    into one occurrence whose attributes are the ordered union of all mentions.
    Counters go to occurrences in first-appearance order, then to scopes.
    Duplicate relations collapse to one.
    """
    attrs: dict[str, list[str]] = {}
    exprs: dict[str, UwExpression] = {}
    scope_order: list[str] = []

    def node(value) -> NodeRef:
        if isinstance(value, ScopeRef):
            if value.scope_id not in scope_order:
                scope_order.append(value.scope_id)
            return value
        key = value.key
        if key not in exprs:
            exprs[key] = value.without_attributes()
            attrs[key] = []
        for a in value.attributes:
            if a not in attrs[key]:
                attrs[key].append(a)
        return OccurrenceRef(key)

    built: list[RelationInstance] = []
    seen = set()
    for label, source, target, scope in relations:
        src = node(source)
        tgt = node(target)
        scope_id = sentence_id if scope is None else scope
        if scope is not None and scope not in scope_order:
            scope_order.append(scope)
        rel = RelationInstance(label, src, tgt, scope_id)
        if rel not in seen:
            seen.add(rel)
            built.append(rel)
    for expr in isolated:
        node(expr)

    counter = counter_start
    occurrences = []
    for key, expr in exprs.items():
        occurrences.append(Occurrence(replace(expr, attributes=tuple(attrs[key])), counter))
        counter += 1
    scopes = []
    for scope_id in scope_order:
        scopes.append(Scope(scope_id, counter))
        counter += 1
    return Sentence(sentence_id, tuple(occurrences), tuple(scopes), tuple(built), text, lang)


# ---------------------------------------------------------------------------
# vocabulary

@dataclass(frozen=True)
class RelationInfo:
    label: str
    parents: tuple[str, ...] = (ROOT_RELATION,)
    alt_label: str | None = None
    definition: str | None = None
    example: str | None = None


@dataclass(frozen=True)
class AttributeInfo:
    name: str
    parent: str | None = None
    definition: str | None = None


@dataclass
class Vocabulary:
    relations: dict[str, RelationInfo] = field(default_factory=dict)
    attributes: dict[str, AttributeInfo] = field(default_factory=dict)

    def is_relation(self, label: str) -> bool:
        return label in self.relations

    def is_attribute(self, name: str) -> bool:
        return name in self.attributes

    def ancestors(self, label: str) -> set[str]:
        seen: set[str] = set()
        stack = list(self.relations[label].parents) if label in self.relations else []
        while stack:
            parent = stack.pop()
            if parent in seen:
                continue
            seen.add(parent)
            if parent in self.relations:
                stack.extend(self.relations[parent].parents)
        return seen


def _find_cycle(parents: dict[str, tuple[str, ...]]) -> list[str] | None:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(parents, WHITE)
    path: list[str] = []

    def visit(node: str) -> list[str] | None:
        colour[node] = GREY
        path.append(node)
        for parent in parents[node]:
            if parent not in parents:
                continue
            if colour[parent] == GREY:
                return path[path.index(parent):] + [parent]
            if colour[parent] == WHITE:
                found = visit(parent)
                if found:
                    return found
        path.pop()
        colour[node] = BLACK
        return None

    for node in parents:
        if colour[node] == WHITE:
            found = visit(node)
            if found:
                return found
    return None


def parse_vocabulary(text: str, mode: str = "strict") -> Vocabulary:
    vocab = Vocabulary()
    section = None
    parent_lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in ("relations", "attributes"):
                raise VocabularyError(f"unknown section [{section}]", lineno)
            continue
        if section is None:
            raise VocabularyError("entry outside of a section", lineno)
        fields = [f.strip() for f in line.split("|")]
        if section == "relations":
            if len(fields) > 5:
                raise VocabularyError("too many fields in relation entry", lineno)
            fields += [""] * (5 - len(fields))
            label, parents, alt, definition, example = fields
            if not RELATION_LABEL_RE.fullmatch(label):
                raise VocabularyError(f"invalid relation label {label!r}", lineno)
            if label in vocab.relations or label == ROOT_RELATION:
                raise VocabularyError(f"duplicate relation {label!r}", lineno)
            parent_tuple = tuple(p.strip() for p in parents.split(",") if p.strip())
            vocab.relations[label] = RelationInfo(
                label, parent_tuple or (ROOT_RELATION,),
                alt or None, definition or None, example or None,
            )
            parent_lines[label] = lineno
        else:
            if len(fields) > 3:
                raise VocabularyError("too many fields in attribute entry", lineno)
            fields += [""] * (3 - len(fields))
            name, parent, definition = fields
            if name.startswith(".@"):
                name = name[2:]
            if not ATTRIBUTE_RE.fullmatch(name):
                raise VocabularyError(f"invalid attribute name {name!r}", lineno)
            if name in vocab.attributes:
                raise VocabularyError(f"duplicate attribute {name!r}", lineno)
            vocab.attributes[name] = AttributeInfo(name, parent or None, definition or None)

    cycle = _find_cycle({k: v.parents for k, v in vocab.relations.items()})
    if cycle:
        raise VocabularyError(
            "cycle in relation hierarchy: " + " -> ".join(cycle), parent_lines[cycle[0]]
        )
    if mode == "strict":
        if not vocab.relations:
            raise VocabularyError("vocabulary declares no relations")
        for label, info in vocab.relations.items():
            for parent in info.parents:
                if parent != ROOT_RELATION and parent not in vocab.relations:
                    raise VocabularyError(
                        f"relation {label!r} has unknown parent {parent!r}", parent_lines[label]
                    )
    return vocab


def load_vocabulary(path: str | Path, mode: str = "strict") -> Vocabulary:
    return parse_vocabulary(Path(path).read_text(encoding="utf-8"), mode)


@functools.lru_cache(maxsize=None)
def _default_vocabulary_text() -> str:
    return resources.files("unlrdf.data").joinpath("unl2010.vocab").read_text(encoding="utf-8")


def default_vocabulary() -> Vocabulary:
    """The packaged UNL2010 relation list with a partial attribute list."""
    return parse_vocabulary(_default_vocabulary_text())


# ---------------------------------------------------------------------------
# URI local names

_SAFE = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-")
_COUNTER_RE = re.compile(r"(.*)_(\d{8,})", re.S)
_TRAILING_COUNTER_RE = re.compile(r"_(\d{8,})$")
_BAD_ESCAPE_RE = re.compile(r"%(?![0-9A-Fa-f]{2})")


def escape_local(text: str, escape_dash: bool = False) -> str:
    out = []
    for ch in text:
        if ch in _SAFE and not (escape_dash and ch == "-"):
            out.append(ch)
        else:
            out.append("".join(f"%{b:02X}" for b in ch.encode("utf-8")))
    return "".join(out)


def _encode_restriction(r: Restriction) -> str:
    sep = "--" if r.direction == ">" else "%3C"
    return escape_local(r.relation, True) + sep + "--".join(escape_local(t, True) for t in r.targets)


def encode_uri_local(expr: UwExpression, occurrence_counter: int | None = None) -> str:
    """Local name for a UW resource: ``>`` becomes ``--``; parentheses and
    commas stay; an occurrence counter appends ``_`` plus 8 zero-padded digits.

    >>> encode_uri_local(UwExpression("channel", (Restriction("icl", ">", ("radiowave",)),)), 14)
    'channel(icl--radiowave)_00000014'
    """
    name = escape_local(expr.headword)
    if expr.restrictions:
        name += "(" + ",".join(_encode_restriction(r) for r in expr.restrictions) + ")"
    if expr.instance_id is not None:
        name += "%3A" + escape_local(expr.instance_id, True)
    for attr in expr.attributes:
        name += "%2E%40" + escape_local(attr, True)
    if occurrence_counter is None:
        m = _TRAILING_COUNTER_RE.search(name)
        if m:
            # keep a counter-free name from reading back as one with a counter
            name = name[:m.start()] + "%5F" + m.group(1)
        return name
    if occurrence_counter < 0:
        raise ValueError("occurrence counter must be non-negative")
    return f"{name}_{occurrence_counter:08d}"


def decode_uri_local(name: str) -> tuple[UwExpression, int | None]:
    from .parser import UnlSyntaxError, parse_uw

    if _BAD_ESCAPE_RE.search(name):
        raise UriDecodeError(f"malformed percent escape in {name!r}")
    counter = None
    m = _COUNTER_RE.fullmatch(name)
    if m:
        name, counter = m.group(1), int(m.group(2))
    if "(" in name:
        head, rest = name.split("(", 1)
        text = unquote(head, errors="strict") + "(" + unquote(rest.replace("--", ">"), errors="strict")
    else:
        text = unquote(name, errors="strict")
    try:
        return parse_uw(text), counter
    except (UnlSyntaxError, ValueError) as exc:
        raise UriDecodeError(f"malformed UW local name {name!r}: {exc}") from None


# ---------------------------------------------------------------------------
# validation

MISSING_ENTRY = "missing_entry"
MULTIPLE_ENTRY = "multiple_entry"
UNKNOWN_RELATION = "unknown_relation"
UNKNOWN_ATTRIBUTE = "unknown_attribute"
DANGLING_REF = "dangling_ref"
SCOPE_CYCLE = "scope_cycle"
DUPLICATE_ID = "duplicate_id"


@dataclass(frozen=True)
class ValidationIssue:
    kind: str
    sentence: str
    scope: str | None
    message: str

    def __str__(self) -> str:
        where = self.sentence if self.scope is None else f"{self.sentence}/{self.scope}"
        return f"{self.kind} [{where}]: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def __iter__(self):
        return iter(self.issues)

    def __len__(self) -> int:
        return len(self.issues)

    def of_kind(self, *kinds: str) -> list[ValidationIssue]:
        return [i for i in self.issues if i.kind in kinds]


def scope_members(sentence: Sentence) -> dict[str, list[str]]:
    """Occurrence keys per scope id.  An occurrence belongs to a scope when it
    is incident to a relation of that scope; occurrences incident to no
    relation belong to the main scope."""
    members: dict[str, list[str]] = {sid: [] for sid in sentence.scope_ids()}
    touched = set()
    for rel in sentence.relations:
        bucket = members.setdefault(rel.scope, [])
        for ref in (rel.source, rel.target):
            if isinstance(ref, OccurrenceRef):
                touched.add(ref.key)
                if ref.key not in bucket:
                    bucket.append(ref.key)
    for occ in sentence.occurrences:
        if occ.key not in touched:
            members[sentence.id].append(occ.key)
    return members


def _entry_keys(sentence: Sentence, keys: list[str]) -> list[str]:
    return [k for k in keys
            if sentence.has_occurrence(k) and sentence.occurrence(k).expression.has_attribute(ENTRY)]


def _validate_sentence(sentence: Sentence, vocab: Vocabulary | None, strict: bool) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []

    def add(kind, scope, message):
        issues.append(ValidationIssue(kind, sentence.id, scope, message))

    scope_ids = set(sentence.scope_ids())
    if sentence.id in {s.id for s in sentence.scopes}:
        add(DUPLICATE_ID, sentence.id, f"scope id {sentence.id!r} collides with the sentence id")

    for rel in sentence.relations:
        if rel.scope not in scope_ids:
            add(DANGLING_REF, rel.scope, f"relation {rel.label} belongs to undeclared scope {rel.scope!r}")
        for ref in (rel.source, rel.target):
            if isinstance(ref, OccurrenceRef) and not sentence.has_occurrence(ref.key):
                add(DANGLING_REF, rel.scope, f"relation {rel.label} points at unknown occurrence {ref.key!r}")
            elif isinstance(ref, ScopeRef) and ref.scope_id not in {s.id for s in sentence.scopes}:
                add(DANGLING_REF, rel.scope, f"relation {rel.label} points at unknown scope {ref.scope_id!r}")
        if strict and vocab is not None and not vocab.is_relation(rel.label):
            add(UNKNOWN_RELATION, rel.scope, f"unknown relation label {rel.label!r}")

    if strict and vocab is not None:
        for occ in sentence.occurrences:
            for r in occ.expression.restrictions:
                if not vocab.is_relation(r.relation):
                    add(UNKNOWN_RELATION, None, f"restriction of {occ.key!r} uses unknown relation {r.relation!r}")
            for a in occ.expression.attributes:
                if not vocab.is_attribute(a):
                    add(UNKNOWN_ATTRIBUTE, None, f"{occ.key!r} carries unknown attribute .@{a}")

    members = scope_members(sentence)
    for scope_id in sentence.scope_ids():
        keys = members.get(scope_id, [])
        if scope_id == sentence.id and not sentence.occurrences:
            continue  # an empty sentence has nothing to enter
        entries = _entry_keys(sentence, keys)
        if not entries:
            add(MISSING_ENTRY, scope_id, f"scope {scope_id!r} has no .@entry occurrence")
        elif len(entries) > 1:
            add(MULTIPLE_ENTRY, scope_id,
                f"scope {scope_id!r} has {len(entries)} .@entry occurrences: {', '.join(entries)}")

    # scope containment graph: scope -> scopes used as nodes by its relations
    contains = defaultdict(set)
    for rel in sentence.relations:
        for ref in (rel.source, rel.target):
            if isinstance(ref, ScopeRef):
                contains[rel.scope].add(ref.scope_id)
    cycle = _find_cycle({sid: tuple(sorted(contains[sid])) for sid in sentence.scope_ids()})
    if cycle:
        add(SCOPE_CYCLE, cycle[0], "scope contains itself: " + " -> ".join(cycle))
    return issues


def validate_document(doc: UnlDocument, vocab: Vocabulary | None = None, mode: str = "lax") -> ValidationReport:
    """Collect every violation; never raises."""
    strict = mode == "strict"
    issues: list[ValidationIssue] = []
    seen = set()
    structural = {doc.id} | {f"{doc.id}_P{n}" for n in range(1, len(doc.paragraphs) + 1)}
    for sentence in doc.sentences():
        if sentence.id in seen:
            issues.append(ValidationIssue(DUPLICATE_ID, sentence.id, None, f"sentence id {sentence.id!r} used twice"))
        seen.add(sentence.id)
        if sentence.id in structural or _TRAILING_COUNTER_RE.search(sentence.id):
            # the sentence resource would share its IRI with another resource
            issues.append(ValidationIssue(DUPLICATE_ID, sentence.id, None,
                                          f"sentence id {sentence.id!r} clashes with a generated resource name"))
        issues.extend(_validate_sentence(sentence, vocab, strict))
    return ValidationReport(tuple(issues))


def entry_node(doc: UnlDocument, scope: str, sentence: str | None = None) -> OccurrenceRef:
    """The unique ``.@entry`` occurrence of ``scope``.

    ``sentence`` disambiguates inner scope ids repeated across sentences; a
    main scope is addressed by its sentence id.
    """
    candidates = [
        s for s in doc.sentences()
        if (sentence is None or s.id == sentence) and scope in s.scope_ids()
    ]
    if not candidates:
        raise DocumentError(f"unknown scope {scope!r}")
    if len(candidates) > 1:
        raise DocumentError(f"scope {scope!r} exists in several sentences; pass sentence=")
    target = candidates[0]
    entries = _entry_keys(target, scope_members(target).get(scope, []))
    if len(entries) != 1:
        raise DocumentError(f"scope {scope!r} has {len(entries)} entry occurrences, expected 1")
    return OccurrenceRef(entries[0])
