"""Small in-memory quad store.

Terms are IRIs, literals and RDF collections (kept as a single ``ListNode``
value rather than rdf:first/rdf:rest chains).  The store matches basic graph
patterns and reads back the Turtle/TriG subset it writes.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"
SKOS = "http://www.w3.org/2004/02/skos/core#"
UNL = "https://unl.tetras-libre.fr/rdf/schema#"
EXAMPLE = "https://unl.tetras-libre.fr/rdf/example#"
SKOLEM = "https://unl.tetras-libre.fr/rdf/skolem#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
RDF_LANGSTRING = RDF + "langString"

DEFAULT_PREFIXES = {
    "example": EXAMPLE,
    "owl": OWL,
    "rdf": RDF,
    "rdfs": RDFS,
    "skolem": SKOLEM,
    "skos": SKOS,
    "unl": UNL,
    "xsd": XSD,
}


class StoreError(Exception):
    pass


class ModeError(StoreError):
    pass


class TurtleSyntaxError(StoreError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnsupportedConstruct(TurtleSyntaxError):
    def __init__(self, construct: str, line: int):
        self.construct = construct
        super().__init__(f"unsupported construct: {construct}", line)


@dataclass(frozen=True)
class Iri:
    value: str

    def sort_key(self) -> tuple:
        return (0, self.value)

    def __str__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    lang: str | None = None

    def __post_init__(self):
        if self.lang is not None and self.datatype == XSD_STRING:
            object.__setattr__(self, "datatype", RDF_LANGSTRING)

    def sort_key(self) -> tuple:
        return (1, self.lexical, self.datatype, self.lang or "")

    def __str__(self) -> str:
        if self.lang:
            return f'"{self.lexical}"@{self.lang}'
        return f'"{self.lexical}"'


@dataclass(frozen=True)
class ListNode:
    items: tuple

    def sort_key(self) -> tuple:
        return (2, tuple(t.sort_key() for t in self.items))


Term = Union[Iri, Literal, ListNode]


def integer(value: int) -> Literal:
    return Literal(str(value), XSD_INTEGER)


@dataclass(frozen=True)
class Quad:
    subject: Iri
    predicate: Iri
    object: Term
    graph: Iri | None = None

    def sort_key(self) -> tuple:
        g = ("",) if self.graph is None else (self.graph.value,)
        return (g, self.subject.value, self.predicate.value, self.object.sort_key())


@dataclass(frozen=True)
class Var:
    name: str


class _Any:
    def __repr__(self) -> str:
        return "ANY"


ANY = _Any()  # graph wildcard: match every graph without binding
DEFAULT = None  # the default graph in a pattern's graph position


def _binding_key(term) -> tuple:
    return (-1,) if term is None else term.sort_key()


class QuadStore:
    """Set of quads with subject/predicate/object/graph indexes.

    Reads may run concurrently; mutation needs exclusive access.
    """

    def __init__(self, quads: Iterable[Quad] = (), prefixes: dict[str, str] | None = None):
        self.prefixes = dict(DEFAULT_PREFIXES)
        if prefixes:
            self.prefixes.update(prefixes)
        self._quads: set[Quad] = set()
        self._index = [defaultdict(set) for _ in range(4)]
        for q in quads:
            self.add(q)

    def add(self, quad: Quad) -> bool:
        if quad in self._quads:
            return False
        self._quads.add(quad)
        for i, key in enumerate((quad.subject, quad.predicate, quad.object, quad.graph)):
            self._index[i][key].add(quad)
        return True

    def add_triple(self, s: Iri, p: Iri, o: Term, g: Iri | None = None) -> bool:
        return self.add(Quad(s, p, o, g))

    def update(self, quads: Iterable[Quad]) -> None:
        for q in quads:
            self.add(q)

    def remove(self, quad: Quad) -> None:
        if quad in self._quads:
            self._quads.discard(quad)
            for i, key in enumerate((quad.subject, quad.predicate, quad.object, quad.graph)):
                self._index[i][key].discard(quad)

    def __contains__(self, quad: Quad) -> bool:
        return quad in self._quads

    def __len__(self) -> int:
        return len(self._quads)

    def __iter__(self) -> Iterator[Quad]:
        return iter(self._quads)

    def sorted_quads(self) -> list[Quad]:
        return sorted(self._quads, key=Quad.sort_key)

    def copy(self) -> QuadStore:
        return QuadStore(self._quads, self.prefixes)

    def union(self, *others: QuadStore) -> QuadStore:
        result = self.copy()
        for other in others:
            result.prefixes.update(other.prefixes)
            result.update(other)
        return result

    def graphs(self) -> set[Iri | None]:
        return {g for g, quads in self._index[3].items() if quads}

    def has_named_graphs(self) -> bool:
        return any(g is not None for g in self.graphs())

    # -- lookups -----------------------------------------------------------

    def quads(self, s=None, p=None, o=None, g=ANY) -> list[Quad]:
        """Quads with the given bound positions (None = unbound for s/p/o)."""
        keys = [(0, s), (1, p), (2, o)]
        if g is not ANY:
            keys.append((3, g))
        bound = [(i, k) for i, k in keys if k is not None or i == 3]
        if not bound:
            return list(self._quads)
        candidates = min((self._index[i].get(k, set()) for i, k in bound), key=len)
        out = []
        for q in candidates:
            if s is not None and q.subject != s:
                continue
            if p is not None and q.predicate != p:
                continue
            if o is not None and q.object != o:
                continue
            if g is not ANY and q.graph != g:
                continue
            out.append(q)
        return out

    def objects(self, s: Iri, p: Iri, g=ANY) -> list[Term]:
        return sorted({q.object for q in self.quads(s, p, None, g)}, key=lambda t: t.sort_key())

    def value(self, s: Iri, p: Iri, g=ANY) -> Term | None:
        objs = self.objects(s, p, g)
        return objs[0] if objs else None

    def subjects(self, p: Iri, o: Term, g=ANY) -> list[Iri]:
        return sorted({q.subject for q in self.quads(None, p, o, g)}, key=lambda t: t.value)

    # -- pattern matching --------------------------------------------------

    def match(self, pattern: tuple) -> list[dict]:
        return self.match_all([pattern])

    def match_all(self, patterns: list[tuple], bindings: dict | None = None) -> list[dict]:
        """Conjunctive match.  A pattern is ``(s, p, o)`` or ``(s, p, o, g)``;
        any position may be a ``Var``.  Graph position: ``ANY`` (default when
        omitted), ``DEFAULT`` for the default graph, an ``Iri`` or a ``Var``.
        Results are distinct and sorted by the text of the bound terms."""
        results = [dict(bindings or {})]
        for pattern in patterns:
            if len(pattern) == 3:
                pattern = (*pattern, ANY)
            next_results = []
            for binding in results:
                resolved = [binding.get(t.name, t) if isinstance(t, Var) else t for t in pattern]
                lookup = [None if isinstance(t, Var) else t for t in resolved[:3]]
                g = resolved[3]
                graph_var = g if isinstance(g, Var) else None
                for q in self.quads(*lookup, ANY if graph_var else g):
                    extended = dict(binding)
                    ok = True
                    for term, value in zip(resolved, (q.subject, q.predicate, q.object, q.graph)):
                        if isinstance(term, Var):
                            if term.name in extended and extended[term.name] != value:
                                ok = False
                                break
                            extended[term.name] = value
                    if ok:
                        next_results.append(extended)
            # a triple repeated across graphs must not duplicate a binding
            unique = {tuple(sorted(b.items(), key=lambda kv: kv[0])): b for b in next_results}
            results = list(unique.values())
            if not results:
                break
        names = sorted({k for b in results for k in b})
        results.sort(key=lambda b: tuple(_binding_key(b.get(n)) for n in names))
        return results


def canonical_equal(a: QuadStore, b: QuadStore) -> bool:
    """Same quad set; prefixes are presentation only."""
    return set(a) == set(b)


# ---------------------------------------------------------------------------
# emission

_LOCAL_CHARS = re.compile(r"[A-Za-z0-9_\-(),%]*")


def _safe_local(local: str) -> bool:
    if not _LOCAL_CHARS.fullmatch(local):
        return False
    depth = 0
    for i, ch in enumerate(local):
        if ch == "(":
            depth += 1
        elif ch == ")":
            if depth == 0:
                return False
            depth -= 1
        elif ch == "," and depth == 0:
            return False
        elif ch == "%" and not re.fullmatch(r"[0-9A-Fa-f]{2}", local[i + 1:i + 3]):
            return False
    return depth == 0


def _escape_string(text: str) -> str:
    return (text.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t"))


class _Writer:
    def __init__(self, prefixes: dict[str, str]):
        self.prefixes = prefixes
        self._by_length = sorted(prefixes.items(), key=lambda kv: -len(kv[1]))

    def iri(self, iri: Iri) -> str:
        for prefix, ns in self._by_length:
            if iri.value.startswith(ns):
                local = iri.value[len(ns):]
                if _safe_local(local):
                    return f"{prefix}:{local}"
        return f"<{iri.value}>"

    def term(self, term: Term) -> str:
        if isinstance(term, Iri):
            return self.iri(term)
        if isinstance(term, ListNode):
            if not term.items:
                return "()"
            return "( " + " ".join(self.term(t) for t in term.items) + " )"
        if term.datatype == XSD_INTEGER and re.fullmatch(r"[+-]?\d+", term.lexical):
            return term.lexical
        text = f'"{_escape_string(term.lexical)}"'
        if term.lang:
            return f"{text}@{term.lang}"
        if term.datatype not in (XSD_STRING, RDF_LANGSTRING):
            return f"{text}^^{self.iri(Iri(term.datatype))}"
        return text

    def header(self) -> list[str]:
        return [f"@prefix {p}: <{ns}> ." for p, ns in sorted(self.prefixes.items())]

    def block(self, quads: list[Quad], indent: str) -> list[str]:
        by_subject: dict[Iri, dict[Iri, list[Term]]] = defaultdict(lambda: defaultdict(list))
        for q in quads:
            by_subject[q.subject][q.predicate].append(q.object)
        lines: list[str] = []
        rdf_type = Iri(RDF + "type")
        for subject in sorted(by_subject, key=lambda t: t.value):
            preds = by_subject[subject]
            order = sorted(preds, key=lambda p: (p != rdf_type, p.value))
            if lines:
                lines.append("")
            lines.append(indent + self.iri(subject))
            for i, pred in enumerate(order):
                objects = sorted(preds[pred], key=lambda t: t.sort_key())
                name = "a" if pred == rdf_type else self.iri(pred)
                end = " ." if i == len(order) - 1 else " ;"
                lines.append(f"{indent}  {name} " + ", ".join(self.term(o) for o in objects) + end)
        return lines


def compact_iri(iri: Iri, prefixes: dict[str, str] | None = None) -> str:
    """Prefixed form of ``iri`` when one applies, else ``<iri>``."""
    return _Writer(DEFAULT_PREFIXES if prefixes is None else prefixes).iri(iri)


def emit_turtle(store: QuadStore) -> str:
    if store.has_named_graphs():
        raise ModeError("store holds named graphs; emit TriG instead")
    return emit_trig(store)


def emit_trig(store: QuadStore) -> str:
    writer = _Writer(store.prefixes)
    lines = writer.header()
    by_graph: dict[Iri | None, list[Quad]] = defaultdict(list)
    for q in store:
        by_graph[q.graph].append(q)
    if by_graph.get(None):
        lines.append("")
        lines.extend(writer.block(by_graph[None], ""))
    for graph in sorted((g for g in by_graph if g is not None), key=lambda t: t.value):
        lines.append("")
        lines.append(f"{writer.iri(graph)} {{")
        lines.extend(writer.block(by_graph[graph], "  "))
        lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reading

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<iri><[^<>"{}|^`\\\s]*>)
  | (?P<long_string>\"\"\"|''')
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<squote>')
  | (?P<langtag>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
  | (?P<dtype>\^\^)
  | (?P<decimal>[+-]?\d*\.\d+(?:[eE][+-]?\d+)?|[+-]?\d+[eE][+-]?\d+)
  | (?P<integer>[+-]?\d+)
  | (?P<blank>_:)
  | (?P<pname>(?:[A-Za-z][A-Za-z0-9_\-]*)?:)
  | (?P<word>[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<punct>[.;,(){}\[\]])
  | (?P<other>.)
""", re.X)

_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "'": "'", "\\": "\\", "b": "\b", "f": "\f"}


def _unescape(body: str, line: int) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt in "uU":
            width = 4 if nxt == "u" else 8
            out.append(chr(int(body[i + 2:i + 2 + width], 16)))
            i += 2 + width
        else:
            raise TurtleSyntaxError(f"bad escape \\{nxt}", line)
    return "".join(out)


def _scan_local(text: str, pos: int) -> int:
    """End of a prefixed-name local part; ``,`` and ``)`` belong to it only
    inside parentheses it opened."""
    depth = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isalnum() or ch in "_-%":
            pos += 1
        elif ch == "(":
            depth += 1
            pos += 1
        elif ch == ")" and depth > 0:
            depth -= 1
            pos += 1
        elif ch == "," and depth > 0:
            pos += 1
        else:
            break
    return pos


@dataclass
class _Tok:
    kind: str
    value: str
    line: int


def _tokenize(text: str) -> list[_Tok]:
    tokens = []
    pos = 0
    line = 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        kind = m.lastgroup
        value = m.group(0)
        if kind == "nl":
            line += 1
        elif kind in ("ws", "comment"):
            pass
        elif kind == "long_string":
            raise UnsupportedConstruct("long string literal", line)
        elif kind == "squote":
            raise UnsupportedConstruct("single-quoted string literal", line)
        elif kind == "decimal":
            raise UnsupportedConstruct(f"decimal/double literal {value}", line)
        elif kind == "pname":
            end = _scan_local(text, m.end())
            tokens.append(_Tok("pname", text[pos:end], line))
            pos = end
            continue
        elif kind == "blank":
            raise UnsupportedConstruct("blank node label", line)
        elif kind == "other":
            raise TurtleSyntaxError(f"unexpected character {value!r}", line)
        else:
            tokens.append(_Tok(kind, value, line))
        pos = m.end()
    return tokens


class _Reader:
    def __init__(self, text: str, allow_graphs: bool):
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_graphs = allow_graphs
        self.store = QuadStore()
        self.store.prefixes = {}  # only what the document declares

    def peek(self) -> _Tok | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def line(self) -> int:
        tok = self.peek()
        if tok is not None:
            return tok.line
        return self.tokens[-1].line if self.tokens else 1

    def next(self, what: str) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise TurtleSyntaxError(f"unexpected end of input, expected {what}", self.line())
        self.i += 1
        return tok

    def expect_punct(self, value: str) -> None:
        tok = self.next(repr(value))
        if tok.kind != "punct" or tok.value != value:
            raise TurtleSyntaxError(f"expected {value!r}, found {tok.value!r}", tok.line)

    def is_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "punct" and tok.value == value

    def parse(self) -> QuadStore:
        while self.peek() is not None:
            tok = self.peek()
            if tok.kind == "langtag" and tok.value == "@prefix":
                self.prefix_decl()
            elif tok.kind == "langtag" and tok.value == "@base":
                raise UnsupportedConstruct("@base directive", tok.line)
            elif tok.kind == "word" and tok.value.upper() in ("PREFIX", "BASE", "GRAPH"):
                raise UnsupportedConstruct(f"{tok.value} keyword", tok.line)
            elif tok.kind == "punct" and tok.value == "{":
                raise UnsupportedConstruct("anonymous default-graph block", tok.line)
            else:
                subject = self.iri_term("subject")
                if self.is_punct("{"):
                    if not self.allow_graphs:
                        raise UnsupportedConstruct("graph block in Turtle input", self.line())
                    self.i += 1
                    while not self.is_punct("}"):
                        if self.peek() is None:
                            raise TurtleSyntaxError("unterminated graph block", self.line())
                        self.triples(self.iri_term("subject"), subject)
                    self.i += 1
                else:
                    self.triples(subject, None)
        return self.store

    def prefix_decl(self) -> None:
        self.i += 1
        name = self.next("prefix name")
        if name.kind != "pname" or not name.value.endswith(":"):
            raise TurtleSyntaxError(f"bad prefix name {name.value!r}", name.line)
        iri = self.next("namespace IRI")
        if iri.kind != "iri":
            raise TurtleSyntaxError("expected <namespace>", iri.line)
        self.store.prefixes[name.value[:-1]] = iri.value[1:-1]
        self.expect_punct(".")

    def iri_term(self, what: str) -> Iri:
        tok = self.next(what)
        if tok.kind == "iri":
            return Iri(tok.value[1:-1])
        if tok.kind == "pname":
            prefix, local = tok.value.split(":", 1)
            if prefix not in self.store.prefixes:
                raise TurtleSyntaxError(f"undeclared prefix {prefix!r}", tok.line)
            return Iri(self.store.prefixes[prefix] + local)
        if tok.kind == "punct" and tok.value == "[":
            raise UnsupportedConstruct("blank node property list", tok.line)
        raise TurtleSyntaxError(f"expected {what}, found {tok.value!r}", tok.line)

    def object_term(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise TurtleSyntaxError("expected object", self.line())
        if tok.kind == "string":
            self.i += 1
            lexical = _unescape(tok.value[1:-1], tok.line)
            nxt = self.peek()
            if nxt is not None and nxt.kind == "langtag":
                self.i += 1
                return Literal(lexical, lang=nxt.value[1:])
            if nxt is not None and nxt.kind == "dtype":
                self.i += 1
                return Literal(lexical, self.iri_term("datatype").value)
            return Literal(lexical)
        if tok.kind == "integer":
            self.i += 1
            return Literal(tok.value, XSD_INTEGER)
        if tok.kind == "word" and tok.value in ("true", "false"):
            raise UnsupportedConstruct("boolean literal", tok.line)
        if tok.kind == "punct" and tok.value == "(":
            self.i += 1
            items = []
            while not self.is_punct(")"):
                if self.peek() is None:
                    raise TurtleSyntaxError("unterminated collection", self.line())
                items.append(self.object_term())
            self.i += 1
            return ListNode(tuple(items))
        return self.iri_term("object")

    def triples(self, subject: Iri, graph: Iri | None) -> None:
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == "word" and tok.value == "a":
                self.i += 1
                predicate = Iri(RDF + "type")
            else:
                predicate = self.iri_term("predicate")
            while True:
                self.store.add(Quad(subject, predicate, self.object_term(), graph))
                if self.is_punct(","):
                    self.i += 1
                    continue
                break
            if self.is_punct(";"):
                self.i += 1
                if self.is_punct("."):
                    break
                continue
            break
        self.expect_punct(".")


def load_turtle(text: str) -> QuadStore:
    return _Reader(text, allow_graphs=False).parse()


def load_trig(text: str) -> QuadStore:
    return _Reader(text, allow_graphs=True).parse()
