"""Proof-to-diagram compilation, wiring substitution and serialization."""
from __future__ import annotations

import pytest
from conftest import DONKEY, find_proofs, sentence_diagram

from lamsem import (
    Diagram,
    DiagramError,
    diagram_from_json,
    export,
    proof_to_diagram,
    substitute_wirings,
    swap_erased_key,
    typecheck,
    typecheck_report,
)
from lamsem.diagram import (
    Cup,
    Edge,
    Id,
    NWire,
    State,
    SWire,
    formula_wires,
)
from lamsem.formula import Atom, parse_formula

ATOMS = ("np", "n", "s")


def non_lexical(d: Diagram) -> dict[str, int]:
    return d.non_lexical_multiset()


# ------------------------------------------------------------ wire algebra


def test_formula_wires_shapes():
    f = parse_formula("np\\s/np", ATOMS)
    assert formula_wires(f) == (NWire(), SWire(), NWire())
    assert formula_wires(parse_formula("np", ATOMS)) == (NWire(),)
    assert formula_wires(parse_formula("s.s", ATOMS)) == (SWire(), SWire())
    # modalities leave a single wire, with ! lifting to a Fock-space wire
    assert len(formula_wires(parse_formula("!@np/n", ATOMS))) == 2


# ------------------------------------------------------ basic compilation


def test_transitive_sentence_shape(lexicon):
    d = sentence_diagram(lexicon, "dogs eat snacks")
    states = [g for g in d.nodes if isinstance(g, State)]
    cups = [g for g in d.nodes if isinstance(g, Cup)]
    assert len(states) == 3
    assert len(cups) == 2
    assert d.output_types() == (SWire(),)
    assert not d.inputs
    assert typecheck(d)


def test_relative_clause_shape(lexicon):
    d = sentence_diagram(lexicon, "dogs who eat snacks", goal="np")
    assert non_lexical(d) == {"Cup": 1, "Mult": 1}
    assert d.output_types() == (NWire(),)
    assert typecheck(d)


def test_pronoun_discourse_raw_and_substituted(lexicon):
    words, proofs = find_proofs(lexicon, "john sleeps he snores", goal="s.s")
    raw = proof_to_diagram(proofs[0], lexicon, words=words)
    raw_counts = non_lexical(raw)
    assert raw_counts.get("Proj(2)") == 1
    assert raw_counts.get("Swap", 0) >= 1
    assert typecheck(raw)
    sub = substitute_wirings(raw, lexicon)
    assert non_lexical(sub) == {"Cup": 2, "Proj(2)": 1}
    assert sub.output_types() == (SWire(), SWire())
    assert typecheck(sub)


# --------------------------------------------------------- donkey diagram


def test_donkey_substituted_multiset(lexicon):
    d = sentence_diagram(lexicon, DONKEY)
    assert non_lexical(d) == {"Mult": 1, "Proj(2)": 1, "Swap": 1, "Cup": 3}
    assert d.output_types() == (SWire(),)
    assert typecheck(d)


def test_donkey_perm_placement_invariance(lexicon):
    """Every derivation of the donkey sentence yields the same diagram up
    to planar crossings: all readings collapse to one swap-erased key."""
    words, proofs = find_proofs(lexicon, DONKEY)
    assert len(proofs) == 8
    keys = set()
    for p in proofs:
        d = substitute_wirings(proof_to_diagram(p, lexicon, words=words), lexicon)
        keys.add(swap_erased_key(d))
    assert len(keys) == 1


# ---------------------------------------------------------- serialization


def test_json_round_trip(lexicon):
    d = sentence_diagram(lexicon, DONKEY)
    text = export(d, "json")
    back = diagram_from_json(text)
    assert back == d
    assert export(back, "json") == text


def test_json_round_trip_preserves_discards(lexicon):
    words, proofs = find_proofs(lexicon, "john sleeps he snores", goal="s.s")
    raw = proof_to_diagram(proofs[0], lexicon, words=words)
    assert diagram_from_json(export(raw, "json")) == raw


def test_dot_export_mentions_words_and_wires(lexicon):
    d = sentence_diagram(lexicon, "dogs eat snacks")
    dot = export(d, "dot")
    assert dot.startswith("digraph")
    for word in ("dogs", "eat", "snacks"):
        assert word in dot
    assert "N" in dot and "S" in dot


def test_export_rejects_unknown_format(lexicon):
    d = sentence_diagram(lexicon, "dogs eat snacks")
    with pytest.raises(ValueError):
        export(d, "svg")


def test_export_is_deterministic(lexicon):
    a = sentence_diagram(lexicon, DONKEY)
    b = sentence_diagram(lexicon, DONKEY)
    assert export(a, "json") == export(b, "json")
    assert export(a, "dot") == export(b, "dot")


# ------------------------------------------------------- typecheck errors


def test_typecheck_reports_type_clash():
    s = State("x", Atom("np"))
    cup = Cup(SWire())
    bad = Diagram(
        nodes=(s, cup, s),
        edges=(Edge(0, 0, 1, 0), Edge(2, 0, 1, 1)),
    )
    report = typecheck_report(bad)
    assert report is not None and "N" in report and "S" in report
    assert not typecheck(bad)


def test_typecheck_reports_dangling_port():
    s = State("x", Atom("np"))
    bad = Diagram(nodes=(s, Id(NWire())), edges=(Edge(0, 0, 1, 0),))
    report = typecheck_report(bad)
    assert report is not None
    assert not typecheck(bad)


def test_typecheck_reports_double_use():
    s = State("x", Atom("np"))
    bad = Diagram(
        nodes=(s, Id(NWire()), Id(NWire())),
        edges=(Edge(0, 0, 1, 0), Edge(0, 0, 2, 0)),
        outputs=((1, 0), (2, 0)),
    )
    assert typecheck_report(bad) is not None


def test_substitute_requires_well_typed_input(lexicon):
    s = State("x", Atom("np"))
    bad = Diagram(nodes=(s, Id(SWire())), edges=(Edge(0, 0, 1, 0),))
    with pytest.raises(DiagramError):
        substitute_wirings(bad, lexicon)
