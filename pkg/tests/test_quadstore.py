import pytest

from unlrdf.quadstore import (
    ANY,
    DEFAULT,
    EXAMPLE,
    RDF,
    XSD,
    Iri,
    ListNode,
    Literal,
    ModeError,
    Quad,
    QuadStore,
    TurtleSyntaxError,
    UnsupportedConstruct,
    Var,
    canonical_equal,
    compact_iri,
    emit_trig,
    emit_turtle,
    integer,
    load_trig,
    load_turtle,
)

A, B, C = (Iri(EXAMPLE + n) for n in "abc")
P, Q = Iri(EXAMPLE + "p"), Iri(EXAMPLE + "q")
G = Iri(EXAMPLE + "g")
TYPE = Iri(RDF + "type")


def small_store():
    s = QuadStore()
    s.add_triple(A, P, B)
    s.add_triple(B, P, C)
    s.add_triple(A, Q, Literal("x"))
    s.add_triple(C, P, A, G)
    return s


def test_add_is_set_like():
    s = QuadStore()
    assert s.add(Quad(A, P, B)) is True
    assert s.add(Quad(A, P, B)) is False
    assert len(s) == 1 and Quad(A, P, B) in s
    s.remove(Quad(A, P, B))
    assert len(s) == 0 and s.quads(A) == []
    s.remove(Quad(A, P, B))  # absent: no error


def test_quads_agrees_with_linear_filter():
    s = small_store()
    for subj in (None, A, B, C):
        for pred in (None, P, Q):
            for graph in (ANY, DEFAULT, G):
                got = set(s.quads(subj, pred, None, graph))
                oracle = {q for q in s if (subj is None or q.subject == subj)
                          and (pred is None or q.predicate == pred)
                          and (graph is ANY or q.graph == graph)}
                assert got == oracle


def test_match_all_join_and_graph_variable():
    s = small_store()
    rows = s.match_all([(Var("x"), P, Var("y")), (Var("y"), P, Var("z"))])
    assert {(r["x"], r["y"], r["z"]) for r in rows} == {(A, B, C), (B, C, A), (C, A, B)}
    rows = s.match_all([(Var("x"), P, Var("y"), Var("g"))])
    assert {r["g"] for r in rows} == {None, G}
    rows = s.match_all([(Var("x"), P, Var("y"), DEFAULT)])
    assert len(rows) == 2
    assert s.match_all([(Var("x"), P, Var("x"))]) == []
    assert s.match_all([(A, P, Var("y"))], {"y": C}) == []


def test_objects_value_subjects():
    s = small_store()
    assert s.objects(A, P) == [B]
    assert s.value(A, Q) == Literal("x")
    assert s.value(A, TYPE) is None
    assert set(s.subjects(P, A)) == {C}


def test_union_and_copy_are_independent():
    s = small_store()
    t = s.copy()
    t.add_triple(A, TYPE, B)
    assert len(t) == len(s) + 1
    u = s.union(t)
    assert canonical_equal(u, t) and not canonical_equal(u, s)


def test_literal_forms():
    assert Literal("x", lang="en").datatype == RDF + "langString"
    assert integer(2) == Literal("2", XSD + "integer")


def test_emit_and_load_round_trip():
    s = small_store()
    s.add_triple(B, Q, Literal('tricky "quote" \\ back\nline\tTab é', lang="fr"))
    s.add_triple(B, Q, integer(-3))
    s.add_triple(B, Q, Literal("5", XSD + "decimal"))
    s.add_triple(C, Q, ListNode((Literal("l1"), Literal("l2"))))
    s.add_triple(Iri(EXAMPLE + "state(icl--attribute)_00000015"), TYPE, Iri("http://other.example/x#y"))
    s.add_triple(Iri(EXAMPLE + "odd,name"), P, A)
    text = emit_trig(s)
    assert "example:state(icl--attribute)_00000015" in text
    assert "<https://unl.tetras-libre.fr/rdf/example#odd,name>" in text
    assert canonical_equal(load_trig(text), s)
    assert emit_trig(load_trig(text)) == text


def test_emit_layout():
    s = QuadStore()
    s.add_triple(A, TYPE, B)
    s.add_triple(A, P, C)
    s.add_triple(A, P, B)
    s.add_triple(B, P, C, G)
    text = emit_trig(s)
    assert "example:a\n  a example:b ;\n  example:p example:b, example:c .\n" in text
    assert "example:g {\n  example:b\n    example:p example:c .\n}\n" in text
    assert text.splitlines()[0].startswith("@prefix ")


def test_turtle_refuses_named_graphs():
    with pytest.raises(ModeError):
        emit_turtle(small_store())
    with pytest.raises(UnsupportedConstruct):
        load_turtle(emit_trig(small_store()))


def test_empty_store_emits_prefixes_only():
    text = emit_turtle(QuadStore())
    assert text.strip() and all(line.startswith("@prefix") for line in text.strip().splitlines())
    assert len(load_turtle(text)) == 0


def test_reads_hand_written_turtle():
    text = """@prefix ex: <http://e.org/> .
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
# comment
ex:s rdf:type ex:C ;
     ex:p "a", "b"@en , 42 , <http://e.org/full> ;
     ex:q ( "x" 1 ) .
"""
    s = load_turtle(text)
    assert len(s) == 6
    assert Quad(Iri("http://e.org/s"), Iri("http://e.org/p"), integer(42)) in s
    assert s.value(Iri("http://e.org/s"), Iri("http://e.org/q")) == ListNode((Literal("x"), integer(1)))
    assert s.prefixes == {"ex": "http://e.org/", "rdf": RDF}


@pytest.mark.parametrize("text, construct", [
    ("@prefix ex: <http://e.org/> .\nex:s ex:p [ ex:q ex:r ] .", "["),
    ("@prefix ex: <http://e.org/> .\nex:s ex:p _:b .", "blank"),
    ("@prefix ex: <http://e.org/> .\nex:s ex:p 1.5 .", "decimal"),
    ("@prefix ex: <http://e.org/> .\nex:s ex:p true .", "boolean"),
    ("@base <http://e.org/> .", "@base"),
    ("PREFIX ex: <http://e.org/>", "PREFIX"),
    ("@prefix ex: <http://e.org/> .\nex:s ex:p '''long''' .", "long"),
])
def test_unsupported_constructs(text, construct):
    with pytest.raises(UnsupportedConstruct) as info:
        load_trig(text)
    assert info.value.line >= 1


@pytest.mark.parametrize("text, line", [
    ("@prefix ex: <http://e.org/> .\nex:s ex:p ex:o", 2),
    ("@prefix ex: <http://e.org/> .\n\nnope:s ex:p ex:o .", 3),
    ('@prefix ex: <http://e.org/> .\nex:s ex:p "open .', 2),
    ("@prefix ex: <http://e.org/> .\nex:g { ex:s ex:p ex:o .", 2),
])
def test_syntax_errors_report_line(text, line):
    with pytest.raises(TurtleSyntaxError) as info:
        load_trig(text)
    assert info.value.line == line


def test_compact_iri():
    assert compact_iri(A) == "example:a"
    assert compact_iri(Iri("http://nowhere.org/x")) == "<http://nowhere.org/x>"
    assert compact_iri(A, {"e": EXAMPLE}) == "e:a"
