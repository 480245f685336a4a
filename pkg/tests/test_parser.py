import pytest

from unlrdf.core import OccurrenceRef, ScopeRef, UwExpression, Restriction, validate_document, default_vocabulary
from unlrdf.parser import (
    UnlSyntaxError,
    format_unl_document,
    parse_master_definition,
    parse_relation_line,
    parse_unl_document,
    parse_uw,
)
from conftest import fixture_text


def test_parse_uw_parts():
    e = parse_uw(" be_in_a_state(aoj>thing, icl>be, obj>state):7.@entry.@present ")
    assert e.headword == "be_in_a_state"
    assert [str(r) for r in e.restrictions] == ["aoj>thing", "icl>be", "obj>state"]
    assert e.instance_id == "7"
    assert e.attributes == ("entry", "present")


def test_parse_uw_chain_and_incoming():
    e = parse_uw("play(icl>show>thing,agt<actor)")
    assert e.restrictions == (Restriction("icl", ">", ("show", "thing")), Restriction("agt", "<", ("actor",)))


@pytest.mark.parametrize("bad", ["", "a(", "a(icl)", "a(icl>)", "a(icl>b", "a.@", "a b", "(x)"])
def test_parse_uw_errors(bad):
    with pytest.raises(UnlSyntaxError):
        parse_uw(bad)


def test_master_definition():
    head, items = parse_master_definition("broadcast{icl>message(icl>thing)}")
    assert head == "broadcast"
    assert items == (("icl", ">", UwExpression("message", (Restriction("icl", ">", ("thing",)),))),)
    assert parse_master_definition("always") == ("always", ())
    with pytest.raises(UnlSyntaxError):
        parse_master_definition("x{icl>y")


def test_relation_line():
    label, scope, src, tgt = parse_relation_line("obj:01(be(icl>x).@entry, :02)")
    assert (label, scope) == ("obj", "01")
    assert src == parse_uw("be(icl>x).@entry")
    assert tgt == ScopeRef("02")
    assert parse_relation_line("agt(a, b)")[1] is None


def test_r1_fixture():
    doc = parse_unl_document(fixture_text("R1.unl"))
    (s,) = list(doc.sentences())
    assert s.id == "R1" and s.lang == "en"
    assert s.text.startswith("The system allows a radio channel")
    assert len(s.occurrences) == 8 and s.scopes == ()
    assert [o.counter for o in s.occurrences] == list(range(1, 9))
    labels = sorted(r.label for r in s.relations)
    assert labels == ["agt", "agt", "and", "cnt", "obj", "obj", "qua"]
    assert s.occurrence("state(icl>attribute)").expression.attributes == ("pl",)


def test_r2_fixture_scope():
    doc = parse_unl_document(fixture_text("R2.unl"), counter_base=9)
    (s,) = list(doc.sentences())
    assert [sc.id for sc in s.scopes] == ["01"] and s.scopes[0].counter == 17
    inner = sorted(r.label for r in s.relations if r.scope == "01")
    assert inner == ["aoj", "mod", "obj"]
    link = [r for r in s.relations if r.target == ScopeRef("01")]
    assert len(link) == 1 and link[0].label == "obj" and link[0].source.key.startswith("when(")
    counters = {o.expression.headword: o.counter for o in s.occurrences}
    assert counters["when"] == 12 and counters["broadcast"] == 16
    # the channel mentioned in both scopes is one occurrence
    assert counters["channel"] == 14
    assert s.occurrence("channel(icl>radiowave)").expression.attributes == ("indef",)
    assert validate_document(doc, default_vocabulary(), "strict").ok


def test_document_structure_and_ids():
    text = """[D:doc]
[P]
[S]{unl}a.@entry{/unl}[/S]
[S:x]{org}plain{/org}{unl}agt(b.@entry, c){/unl}[/S]
[/P]
[P]
[S]{unl}{/unl}[/S]
[/P]
[/D]"""
    doc = parse_unl_document(text, counter_base=3)
    assert doc.label == "doc" and len(doc.paragraphs) == 2
    ids = [s.id for s in doc.sentences()]
    assert ids == ["S1", "x", "S3"]
    first, second, third = doc.sentences()
    assert first.occurrences[0].counter == 3 and second.occurrences[0].counter == 4
    assert second.text == "plain" and second.lang is None
    assert third.occurrences == () and third.relations == ()


def test_isolated_occurrence_line():
    doc = parse_unl_document("[S:A]{unl}lonely(icl>thing).@entry{/unl}[/S]")
    (s,) = doc.sentences()
    assert s.relations == () and s.occurrences[0].expression.attributes == ("entry",)


def test_empty_input():
    assert parse_unl_document("") == parse_unl_document("  \n ")
    assert format_unl_document(parse_unl_document("")) == ""


@pytest.mark.parametrize("text, line, column", [
    ("[S:A]\n{unl}\nagt(a, b\n", 3, 4),
    ("[S:A]\n{unl}\nagt(a.@entry, :01)\n{/unl}\n[/S]", 3, 15),
    ("[S:A]{unl}agt(a, b){/unl}", 1, 1),
    ("junk", 1, 1),
    ("[D][P][S:A]{unl}{/unl}[/S][/P]", 1, 1),
])
def test_syntax_errors_have_positions(text, line, column):
    with pytest.raises(UnlSyntaxError) as info:
        parse_unl_document(text)
    span = info.value.span
    assert span.line == line
    assert span.column >= 1
    if line == 3:
        assert span.column == column


def test_truncated_unl_section_reports_location():
    with pytest.raises(UnlSyntaxError) as info:
        parse_unl_document("[S:A]\n{unl}\nagt(a.@entry, b)\n")
    assert "unterminated" in str(info.value)
    assert str(info.value).startswith(f"{info.value.span.line}:{info.value.span.column}:")


def test_format_round_trip_fixtures():
    for name in ("R1.unl", "R2.unl"):
        doc = parse_unl_document(fixture_text(name))
        text = format_unl_document(doc)
        again = parse_unl_document(text)
        assert again == doc
        assert format_unl_document(again) == text


def test_format_keeps_document_wrappers():
    doc = parse_unl_document("[D:z][P][S:A]{unl}a.@entry{/unl}[/S][/P][/D]")
    text = format_unl_document(doc)
    assert text.startswith("[D:z]\n[P]\n") and text.rstrip().endswith("[/P]\n[/D]")
    assert parse_unl_document(text) == doc


def test_relations_reference_occurrences():
    doc = parse_unl_document(fixture_text("R1.unl"))
    (s,) = doc.sentences()
    for rel in s.relations:
        for ref in (rel.source, rel.target):
            assert isinstance(ref, OccurrenceRef) and s.has_occurrence(ref.key)
