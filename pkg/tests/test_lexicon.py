"""Lexicon loading, wiring tags, and sentence-to-sequent expansion."""
import pytest

from lamsem.formula import Atom, parse_formula
from lamsem.lexicon import (
    Lexicon,
    LexiconError,
    UnknownWordError,
    WIRING_DETBOX,
    WIRING_PLAIN,
    WIRING_PRONOUN,
    WIRING_RELPRO,
    sentence_to_sequents,
)


def test_bundled_lexicon_words(lexicon):
    assert lexicon.formulas("dogs") == (Atom("np"),)
    assert lexicon.formulas("eats") == (parse_formula("np\\s/np"),)
    assert lexicon.formulas("a") == (parse_formula("!@((!@np)/n)"),)
    assert lexicon.formulas("it") == (parse_formula("@np\\np"),)


def test_bundled_wiring_tags(lexicon):
    assert lexicon.wiring("who") == WIRING_RELPRO
    assert lexicon.wiring("it") == WIRING_PRONOUN
    assert lexicon.wiring("every") == WIRING_DETBOX
    assert lexicon.wiring("dogs") == WIRING_PLAIN


def test_unknown_word(lexicon):
    with pytest.raises(UnknownWordError):
        lexicon.formulas("zebra")


def test_unknown_wiring_tag_rejected():
    with pytest.raises(LexiconError):
        Lexicon.from_dict(
            {"atoms": ["n", "np", "s"], "words": {"x": ["n"]}, "wirings": {"x": "bogus"}}
        )


def test_wiring_must_match_a_formula_shape():
    with pytest.raises(LexiconError):
        Lexicon.from_dict(
            {
                "atoms": ["n", "np", "s"],
                "words": {"x": ["n"]},
                "wirings": {"x": WIRING_RELPRO},
            }
        )


def test_sentence_to_sequents_product(lexicon):
    seqs = sentence_to_sequents(["dogs", "eat", "snacks"], lexicon, Atom("s"))
    assert len(seqs) == 1
    assert seqs[0].succedent == Atom("s")
    assert [f for f in seqs[0].antecedent] == [
        Atom("np"),
        parse_formula("np\\s/np"),
        Atom("np"),
    ]


def test_round_trip_to_dict(lexicon):
    again = Lexicon.from_dict(lexicon.to_dict())
    assert again.entries == lexicon.entries
    assert again.wirings == lexicon.wirings
