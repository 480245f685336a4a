"""Reader and writer for the UNL relation-list interchange format.

    [D]
    [P]
    [S:R2]
    {org:en}The system displays a channel ...{/org}
    {unl}
    agt(display(icl>show,agt>thing,obj>thing).@entry, system(icl>group).@def)
    aoj:01(be_in_a_state(aoj>thing,icl>be,obj>state).@entry, channel(icl>radiowave))
    obj(when(icl>how,com>always,tim>uw,obj>uw), :01)
    {/unl}
    [/S]
    [/P]
    [/D]

The ``[D]``/``[P]`` wrappers are optional: a bare run of sentences forms a single
paragraph.  A ``{unl}`` line holding a lone UW declares an occurrence that
takes part in no relation.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass

from .core import (
    ATTRIBUTE_RE,
    INSTANCE_RE,
    RELATION_LABEL_RE,
    Paragraph,
    Restriction,
    ScopeRef,
    Sentence,
    UnlDocument,
    UnlError,
    UwExpression,
    build_sentence,
)

_WORD_STOP = set("()<>,:{}[]\"") | {" ", "\t", "\n", "\r"}
_LABEL_RE = re.compile(r"[^\]\s\[]+")
_TAG_RE = re.compile(r"[A-Za-z0-9_-]+")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class UnlSyntaxError(UnlError):
    def __init__(self, message: str, span: SourceSpan):
        self.message = message
        self.span = span
        super().__init__(f"{span.line}:{span.column}: {message}")


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def span(self, start: int, end: int | None = None) -> SourceSpan:
        start = min(start, len(self.text))
        end = start if end is None else max(start, min(end, len(self.text)))
        line = bisect.bisect_right(self._line_starts, start)
        return SourceSpan(line, start - self._line_starts[line - 1] + 1, end - start)

    def error(self, message: str, start: int | None = None, length: int = 1) -> UnlSyntaxError:
        start = self.pos if start is None else start
        return UnlSyntaxError(message, self.span(start, start + length))

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self, n: int = 1) -> str:
        return self.text[self.pos:self.pos + n]

    def startswith(self, literal: str) -> bool:
        return self.text.startswith(literal, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, literal: str, what: str | None = None) -> None:
        if not self.startswith(literal):
            found = self.peek() or "end of input"
            raise self.error(f"expected {what or repr(literal)}, found {found!r}")
        self.pos += len(literal)

    def match(self, pattern: re.Pattern) -> str | None:
        m = pattern.match(self.text, self.pos)
        if not m or not m.group(0):
            return None
        self.pos = m.end()
        return m.group(0)


# ---------------------------------------------------------------------------
# UW expressions

def _word(c: _Cursor, what: str) -> str:
    start = c.pos
    text = c.text
    while c.pos < len(text) and text[c.pos] not in _WORD_STOP and not text.startswith(".@", c.pos):
        c.pos += 1
    if c.pos == start:
        raise c.error(f"empty {what}")
    return text[start:c.pos]


def _restriction(c: _Cursor) -> Restriction:
    start = c.pos
    label = c.match(RELATION_LABEL_RE)
    if label is None:
        raise c.error("expected a relation label in restriction")
    direction = c.peek()
    if direction not in (">", "<"):
        raise c.error(f"expected '>' or '<' after {label!r}", start, c.pos - start + 1)
    c.pos += 1
    targets = [_word(c, "restriction target")]
    while c.peek() == ">":
        c.pos += 1
        targets.append(_word(c, "restriction target"))
    return Restriction(label, direction, tuple(targets))


def _uw(c: _Cursor) -> UwExpression:
    start = c.pos
    headword = _word(c, "headword")
    restrictions = []
    if c.peek() == "(":
        open_pos = c.pos
        c.pos += 1
        while True:
            c.skip_ws()
            restrictions.append(_restriction(c))
            c.skip_ws()
            if c.at_end():
                raise c.error("unbalanced parenthesis", open_pos)
            if c.peek() == ",":
                c.pos += 1
                continue
            if c.peek() == ")":
                c.pos += 1
                break
            raise c.error(f"expected ',' or ')' in restriction list, found {c.peek()!r}")
    instance = None
    if c.peek() == ":" and INSTANCE_RE.match(c.text, c.pos + 1):
        c.pos += 1
        instance = c.match(INSTANCE_RE)
    attributes = []
    while c.startswith(".@"):
        c.pos += 2
        attr = c.match(ATTRIBUTE_RE)
        if attr is None:
            raise c.error("empty attribute name after '.@'")
        attributes.append(attr)
    try:
        return UwExpression(headword, tuple(restrictions), instance, tuple(attributes))
    except ValueError as exc:
        raise c.error(str(exc), start, c.pos - start) from None


def parse_uw(text: str) -> UwExpression:
    """Parse one UW such as ``state(icl>attribute):01.@pl.@entry``."""
    c = _Cursor(text)
    c.skip_ws()
    expr = _uw(c)
    c.skip_ws()
    if not c.at_end():
        raise c.error(f"unexpected {c.peek()!r} after UW expression")
    return expr


def parse_master_definition(text: str) -> tuple[str, tuple[tuple[str, str, UwExpression], ...]]:
    """Split ``broadcast{icl>message(icl>thing)}`` into the headword and its
    ``(relation, direction, target UW)`` items."""
    c = _Cursor(text)
    c.skip_ws()
    headword = _word(c, "headword")
    items = []
    if c.peek() == "{":
        open_pos = c.pos
        c.pos += 1
        while True:
            c.skip_ws()
            label = c.match(RELATION_LABEL_RE)
            if label is None:
                raise c.error("expected a relation label in master definition")
            direction = c.peek()
            if direction not in (">", "<"):
                raise c.error("expected '>' or '<'")
            c.pos += 1
            items.append((label, direction, _uw(c)))
            c.skip_ws()
            if c.at_end():
                raise c.error("unbalanced brace", open_pos)
            if c.peek() == ",":
                c.pos += 1
            elif c.peek() == "}":
                c.pos += 1
                break
            else:
                raise c.error(f"expected ',' or '}}', found {c.peek()!r}")
    c.skip_ws()
    if not c.at_end():
        raise c.error(f"unexpected {c.peek()!r} after master definition")
    return headword, tuple(items)


# ---------------------------------------------------------------------------
# relation lines and documents

def _node(c: _Cursor, scope_uses: list | None = None):
    c.skip_ws()
    if c.peek() == ":":
        start = c.pos
        c.pos += 1
        scope_id = c.match(INSTANCE_RE)
        if scope_id is None:
            raise c.error("expected a scope id after ':'")
        if scope_uses is not None:
            scope_uses.append((scope_id, c.span(start, c.pos)))
        return ScopeRef(scope_id)
    return _uw(c)


def _relation_line(c: _Cursor, scope_uses: list | None = None):
    label = c.match(RELATION_LABEL_RE)
    if label is None:
        raise c.error("expected a relation label")
    scope = None
    if c.peek() == ":":
        c.pos += 1
        scope = c.match(INSTANCE_RE)
        if scope is None:
            raise c.error("expected a scope id after ':'")
    c.skip_ws()
    open_pos = c.pos
    c.expect("(")
    source = _node(c, scope_uses)
    c.skip_ws()
    if c.at_end():
        raise c.error("unbalanced parenthesis", open_pos)
    c.expect(",", "',' between relation arguments")
    target = _node(c, scope_uses)
    c.skip_ws()
    if c.at_end() or c.startswith("{/unl}"):
        raise c.error("unbalanced parenthesis", open_pos)
    c.expect(")", "')' closing the relation")
    return label, scope, source, target


def parse_relation_line(text: str):
    """Parse ``rel:scope(node, node)`` into ``(label, scope, source, target)``;
    ``scope`` is None for the main scope, nodes are UwExpression or ScopeRef."""
    c = _Cursor(text)
    c.skip_ws()
    result = _relation_line(c)
    c.skip_ws()
    if not c.at_end():
        raise c.error(f"unexpected {c.peek()!r} after relation")
    return result


def _tag_label(c: _Cursor, tag: str) -> str | None:
    start = c.pos
    c.expect("[" + tag)
    label = None
    if c.peek() == ":":
        c.pos += 1
        label = c.match(_LABEL_RE)
        if label is None:
            raise c.error(f"empty label in [{tag}:...]")
    if c.peek() != "]":
        raise c.error(f"malformed [{tag}] tag", start, c.pos - start + 1)
    c.pos += 1
    return label


class _DocumentParser:
    def __init__(self, text: str, counter_base: int):
        self.c = _Cursor(text)
        self.counter = counter_base
        self.sentence_index = 0

    def parse(self) -> UnlDocument:
        c = self.c
        c.skip_ws()
        if c.at_end():
            return UnlDocument()
        if c.startswith("[D"):
            label = _tag_label(c, "D")
            paragraphs = []
            while True:
                c.skip_ws()
                if c.startswith("[/D]"):
                    c.pos += 4
                    break
                if c.startswith("[P"):
                    paragraphs.append(self.paragraph())
                elif c.at_end():
                    raise c.error("missing [/D]")
                else:
                    raise c.error(f"expected [P] or [/D], found {c.peek(4)!r}", length=len(c.peek(4)))
            document = UnlDocument(tuple(paragraphs), label)
        else:
            sentences = []
            while True:
                c.skip_ws()
                if c.at_end():
                    break
                if not c.startswith("[S"):
                    raise c.error(f"expected [S] or [D], found {c.peek(4)!r}", length=len(c.peek(4)))
                sentences.append(self.sentence())
            document = UnlDocument((Paragraph(tuple(sentences)),))
        c.skip_ws()
        if not c.at_end():
            raise c.error(f"trailing content {c.peek(10)!r}", length=len(c.peek(10)))
        return document

    def paragraph(self) -> Paragraph:
        c = self.c
        start = c.pos
        c.expect("[P]")
        sentences = []
        while True:
            c.skip_ws()
            if c.startswith("[/P]"):
                c.pos += 4
                return Paragraph(tuple(sentences))
            if c.startswith("[S"):
                sentences.append(self.sentence())
            elif c.at_end():
                raise c.error("missing [/P]", start, 3)
            else:
                raise c.error(f"expected [S] or [/P], found {c.peek(4)!r}", length=len(c.peek(4)))

    def sentence(self) -> Sentence:
        c = self.c
        start = c.pos
        self.sentence_index += 1
        label = _tag_label(c, "S") or f"S{self.sentence_index}"
        c.skip_ws()
        text = lang = None
        if c.startswith("{org"):
            c.pos += 4
            if c.peek() == ":":
                c.pos += 1
                lang = c.match(_TAG_RE)
                if lang is None:
                    raise c.error("empty tag in {org:...}")
            c.expect("}")
            end = c.text.find("{/org}", c.pos)
            if end < 0:
                raise c.error("missing {/org}")
            text = c.text[c.pos:end].strip()
            c.pos = end + len("{/org}")
            c.skip_ws()
        unl_start = c.pos
        c.expect("{unl}")
        relations = []
        isolated = []
        scope_uses: list = []
        while True:
            c.skip_ws()
            if c.startswith("{/unl}"):
                c.pos += len("{/unl}")
                break
            if c.at_end():
                raise c.error("unterminated {unl} section", unl_start, len("{unl}"))
            line_start = c.pos
            uses: list = []
            try:
                label_, scope, source, target = _relation_line(c, uses)
                relations.append((label_, source, target, scope))
                scope_uses.extend(uses)
            except UnlSyntaxError as rel_error:
                c.pos = line_start
                try:
                    expr = _uw(c)
                except UnlSyntaxError:
                    raise rel_error from None
                if not (c.at_end() or c.peek().isspace() or c.startswith("{/unl}")):
                    raise rel_error from None
                isolated.append(expr)
        c.skip_ws()
        if not c.startswith("[/S]"):
            raise c.error("missing [/S]", start, 2)
        c.pos += 4

        qualified = {scope for _, _, _, scope in relations if scope is not None}
        for scope_id, span in scope_uses:
            if scope_id not in qualified:
                raise UnlSyntaxError(f"scope :{scope_id} labels no relation line", span)
        sentence = build_sentence(
            label, relations, isolated, text=text, lang=lang, counter_start=self.counter
        )
        self.counter += len(sentence.occurrences) + len(sentence.scopes)
        return sentence


def parse_unl_document(text: str, counter_base: int = 1) -> UnlDocument:
    """Parse UNL text.  Occurrence counters run through the whole document in
    first-appearance order starting at ``counter_base``; each sentence's scopes
    are numbered right after its occurrences."""
    return _DocumentParser(text, counter_base).parse()


# ---------------------------------------------------------------------------
# formatting

def _format_node(sentence: Sentence, ref) -> str:
    if isinstance(ref, ScopeRef):
        return ":" + ref.scope_id
    return str(sentence.occurrence(ref.key).expression)


def format_sentence(sentence: Sentence) -> str:
    lines = [f"[S:{sentence.id}]"]
    if sentence.text is not None:
        tag = f"{{org:{sentence.lang}}}" if sentence.lang else "{org}"
        lines.append(f"{tag}{sentence.text}{{/org}}")
    lines.append("{unl}")
    for rel in sentence.relations:
        qualifier = "" if rel.scope == sentence.id else ":" + rel.scope
        lines.append(
            f"{rel.label}{qualifier}({_format_node(sentence, rel.source)}, "
            f"{_format_node(sentence, rel.target)})"
        )
    linked = {ref.key for rel in sentence.relations for ref in (rel.source, rel.target)
              if not isinstance(ref, ScopeRef)}
    for occ in sentence.occurrences:
        if occ.key not in linked:
            lines.append(str(occ.expression))
    lines.append("{/unl}")
    lines.append("[/S]")
    return "\n".join(lines)


def format_unl_document(doc: UnlDocument) -> str:
    """Canonical UNL text; bare ``[S]`` blocks when the document is one
    unlabelled, non-empty paragraph."""
    if not doc.paragraphs:
        return ""
    if doc.label is None and len(doc.paragraphs) == 1 and doc.paragraphs[0].sentences:
        return "\n".join(format_sentence(s) for s in doc.paragraphs[0].sentences) + "\n"
    lines = ["[D]" if doc.label is None else f"[D:{doc.label}]"]
    for paragraph in doc.paragraphs:
        lines.append("[P]")
        lines.extend(format_sentence(s) for s in paragraph.sentences)
        lines.append("[/P]")
    lines.append("[/D]")
    return "\n".join(lines) + "\n"

