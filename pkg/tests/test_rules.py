import logging

import pytest

from unlrdf.parser import parse_unl_document
from unlrdf.quadstore import EXAMPLE, UNL, Iri, QuadStore, load_turtle
from unlrdf.rdf_unl import HAS_SOURCE, RDF_TYPE
from unlrdf.rules import (
    Assertion,
    Cardinality,
    ClassDecl,
    DatatypeDecl,
    DatatypePropertyDecl,
    Enumeration,
    RuleError,
    axioms_from_rdf,
    format_axioms,
    materialize,
    rule_cardinality,
    rule_datatype_property,
    rule_enumeration,
    rule_instantiate_property,
    run_all,
)
from conftest import GOLDEN, linked_store, r1_r2_docs, without_skolems

E = EXAMPLE
STATE = E + "state(icl--attribute)"


def store_of(body: str) -> QuadStore:
    return linked_store([parse_unl_document("[S:T]{unl}\n" + body + "\n{/unl}[/S]")])


# -- rule 1 -------------------------------------------------------------------------

def test_cardinality_from_r1(r1_doc):
    assert rule_cardinality(linked_store([r1_doc])) == [Cardinality(STATE, 2)]


@pytest.mark.parametrize("number, expected", [("7", 7), ("+3", 3), ("0", 0)])
def test_cardinality_integer_forms(number, expected):
    store = store_of(f"qua(kind(icl>attribute).@entry, {number})")
    assert rule_cardinality(store) == [Cardinality(E + "kind(icl--attribute)", expected)]


def test_cardinality_needs_integer(caplog):
    with caplog.at_level(logging.WARNING):
        assert rule_cardinality(store_of("qua(kind(icl>attribute).@entry, two)")) == []
    assert "non-integer" in caplog.text


# -- rule 2 -------------------------------------------------------------------------

def test_enumeration_from_r1(r1_doc):
    got = rule_enumeration(linked_store([r1_doc]))
    assert got == [
        Enumeration(STATE, ("listening(icl>sensing)", "traffic(icl>communication)")),
        DatatypeDecl(STATE),
    ]


def test_enumeration_needs_attribute_guard():
    store = store_of("cnt(kind(icl>thing).@entry, a)\nand(a, b)")
    assert rule_enumeration(store) == []


def test_enumeration_needs_two_members():
    assert rule_enumeration(store_of("cnt(kind(icl>attribute).@entry, a)")) == []


def dfs_chain(doc, start_key):
    """Follow ``and`` edges over the parsed document, independent of RDF."""
    (sentence,) = doc.sentences()
    succ = {}
    for rel in sentence.relations:
        if rel.label == "and":
            succ.setdefault(rel.source.key, []).append(rel.target.key)
    out, node = [start_key], start_key
    while node in succ:
        (node,) = succ[node]
        out.append(node)
    return out


def test_long_chain_matches_dfs_oracle():
    members = ["m4(icl>thing)", "m1(icl>thing)", "m3(icl>thing)", "m2(icl>thing)"]
    lines = [f"cnt(kind(icl>attribute).@entry, {members[0]})"]
    lines += [f"and({a}, {b})" for a, b in zip(members, members[1:])]
    text = "[S:T]{unl}\n" + "\n".join(reversed(lines)) + "\n{/unl}[/S]"
    doc = parse_unl_document(text)
    (ax, _) = rule_enumeration(linked_store([doc]))
    assert ax.members == tuple(dfs_chain(doc, members[0]))
    assert ax.members == tuple(members)


def test_cyclic_chain_raises():
    with pytest.raises(RuleError, match="cyclic"):
        rule_enumeration(store_of("cnt(kind(icl>attribute).@entry, a)\nand(a, b)\nand(b, a)"))


def test_branching_chain_skipped(caplog):
    store = store_of("cnt(kind(icl>attribute).@entry, a)\nand(a, b)\nand(a, c)")
    with caplog.at_level(logging.WARNING):
        assert rule_enumeration(store) == []
    assert "branches" in caplog.text


# -- rules 3 and 4 ------------------------------------------------------------------

def prop_body(copula="be(aoj>thing,icl>be,obj>thing)", mods=("bright(icl>light)",), same_scope=True):
    obj_scope = ":01" if same_scope else ":02"
    lines = [
        "tim(when(icl>how).@entry, :01)",
        f"aoj:01({copula}.@entry, lamp(icl>device))",
        f"obj{obj_scope}({copula}{'' if same_scope else '.@entry'}, mode(icl>attribute))",
    ]
    if not same_scope:
        lines.append("agt(when(icl>how).@entry, :02)")
    lines += [f"mod:01(mode(icl>attribute), {m})" for m in mods]
    return "\n".join(lines)


def test_datatype_property_declaration():
    got = rule_datatype_property(store_of(prop_body()))
    prop, lamp, mode = E + "be(aoj--thing,icl--be,obj--thing)", E + "lamp(icl--device)", E + "mode(icl--attribute)"
    assert got == [
        DatatypePropertyDecl(prop, lamp, mode),
        ClassDecl(lamp),
        DatatypeDecl(mode),
        Assertion(lamp + "_00000003", lamp),
    ]


@pytest.mark.parametrize("copula, fires", [
    ("be(aoj>thing,icl>be,obj>thing)", True),
    ("seem(icl>be,aoj>thing,obj>thing)", True),
    ("is(icl>be>state,aoj>thing,obj>thing)", True),
    ("become(icl>become,aoj>thing,obj>thing)", False),
    ("stay(icl>being,aoj>thing,obj>thing)", False),
    ("have(icl>possess,aoj>thing,obj>thing)", False),
])
def test_copula_guard(copula, fires):
    assert bool(rule_datatype_property(store_of(prop_body(copula)))) is fires


def test_aoj_and_obj_must_share_scope():
    assert rule_datatype_property(store_of(prop_body(same_scope=False))) == []


def test_each_mod_gives_an_assertion():
    store = store_of(prop_body(mods=("bright(icl>light)", "dim(icl>light)")))
    got = rule_instantiate_property(store)
    assert sorted(a.value for a in got) == ["bright(icl>light)", "dim(icl>light)"]
    assert all(a.instance == E + "lamp(icl--device)_00000003" for a in got)


def test_no_mod_no_assertion():
    assert rule_instantiate_property(store_of(prop_body(mods=()))) == []


def test_r2_property_assertion(rules_store):
    (got,) = rule_instantiate_property(rules_store)
    assert got == Assertion(
        E + "channel(icl--radiowave)_00000014", E + "channel(icl--radiowave)",
        E + "be_in_a_state(aoj--thing,icl--be,obj--state)", "broadcast(icl>message)",
    )


# -- whole rule set ----------------------------------------------------------------

def test_empty_store():
    axioms, store = run_all(QuadStore())
    assert axioms == [] and len(store) == 0


def test_r1_r2_report_matches_golden(rules_store):
    axioms, _ = run_all(rules_store)
    expected = (GOLDEN / "report_R1_R2.txt").read_text().split("\n\n# violations")[0]
    assert "# axioms\n" + format_axioms(axioms) == expected + "\n"


def test_materialized_facts_match_listing(rules_store):
    _, store = run_all(rules_store)
    listing = load_turtle((GOLDEN / "facts_R1_R2.ttl").read_text())
    assert without_skolems(store) == without_skolems(listing)


def test_run_all_is_a_fixpoint(rules_store):
    axioms, facts = run_all(rules_store)
    again, facts_again = run_all(rules_store.union(facts))
    assert again == axioms
    assert set(facts_again) == set(facts)


def test_rules_are_independent(rules_store):
    full = run_all(rules_store)[0]
    pruned = rules_store.copy()
    for node in pruned.subjects(RDF_TYPE, Iri(UNL + "qua")):
        for q in pruned.quads(node, None, None):
            pruned.remove(q)
    assert not pruned.subjects(RDF_TYPE, Iri(UNL + "qua"))
    assert run_all(pruned)[0] == [a for a in full if not isinstance(a, Cardinality)]
    assert pruned.quads(None, HAS_SOURCE, None)


def test_axioms_read_back_from_rdf(rules_store):
    axioms, facts = run_all(rules_store)
    assert set(axioms_from_rdf(facts)) == set(axioms)
    assert set(axioms_from_rdf(materialize(axioms))) == set(axioms)


def test_axiom_invariants():
    with pytest.raises(ValueError):
        Cardinality("x", -1)
    with pytest.raises(ValueError):
        Enumeration("x", ())
    with pytest.raises(ValueError):
        Enumeration("x", ("a", "a"))


def test_two_documents_match_one():
    r1, r2 = r1_r2_docs()
    separate = run_all(linked_store([r1]).union(linked_store([r2])))[0]
    assert set(separate) == set(run_all(linked_store([r1, r2]))[0])
