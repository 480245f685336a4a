"""Consistency checks over extracted axioms.

Covers the fragment that the rules can produce: values asserted for a
datatype property whose range is a closed enumeration, and cardinalities
that disagree with the size of an enumeration on the same subject.
"""

from __future__ import annotations

from dataclasses import dataclass

from .quadstore import Iri, compact_iri
from .rules import Assertion, Cardinality, DatatypePropertyDecl, Enumeration, ExtractedAxiom, format_axiom

ENUMERATION_VIOLATION = "EnumerationViolation"
CARDINALITY_MISMATCH = "CardinalityMismatch"


@dataclass(frozen=True)
class InconsistencyReport:
    kind: str
    subject: str
    conflicting_value: str | None
    cited_axioms: tuple[ExtractedAxiom, ...]
    message: str

    def __post_init__(self):
        if not self.cited_axioms:
            raise ValueError("a report must cite at least one axiom")


def check(axioms: list[ExtractedAxiom]) -> list[InconsistencyReport]:
    enumerations: dict[str, list[Enumeration]] = {}
    for ax in axioms:
        if isinstance(ax, Enumeration):
            enumerations.setdefault(ax.subject, []).append(ax)
    ranges: dict[str, list[DatatypePropertyDecl]] = {}
    for ax in axioms:
        if isinstance(ax, DatatypePropertyDecl):
            ranges.setdefault(ax.property, []).append(ax)

    reports: list[InconsistencyReport] = []
    seen = set()
    for ax in axioms:
        if not isinstance(ax, Assertion) or ax.property is None or ax.value is None:
            continue
        for decl in ranges.get(ax.property, []):
            for enum in enumerations.get(decl.range, []):
                key = (ax, decl, enum)
                if ax.value in enum.members or key in seen:
                    continue
                seen.add(key)
                reports.append(InconsistencyReport(
                    ENUMERATION_VIOLATION, ax.instance, ax.value, (enum, decl, ax),
                    f"{_short(ax.instance)} has {_short(ax.property)} = \"{ax.value}\", but the range "
                    f"{_short(decl.range)} only admits " + ", ".join(f'"{m}"' for m in enum.members),
                ))

    for ax in axioms:
        if not isinstance(ax, Cardinality):
            continue
        for enum in enumerations.get(ax.subject, []):
            if ax.n != len(enum.members) and (ax, enum) not in seen:
                seen.add((ax, enum))
                reports.append(InconsistencyReport(
                    CARDINALITY_MISMATCH, ax.subject, str(ax.n), (enum, ax),
                    f"{_short(ax.subject)} has cardinality {ax.n} but enumerates "
                    f"{len(enum.members)} members",
                ))
    return reports


def _short(iri: str) -> str:
    return compact_iri(Iri(iri))


def format_lines(reports: list[InconsistencyReport]) -> str:
    out = []
    for r in reports:
        value = "" if r.conflicting_value is None else f' "{r.conflicting_value}"'
        out.append(f"VIOLATION {r.kind} {_short(r.subject)}{value}\n")
    return "".join(out)


def format_text(reports: list[InconsistencyReport]) -> str:
    if not reports:
        return "No inconsistency found.\n"
    blocks = []
    for i, r in enumerate(reports, start=1):
        lines = [f"[{i}] {r.kind}: {r.message}", "  conflicting axioms:"]
        lines += ["    " + format_axiom(ax) for ax in r.cited_axioms]
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)
