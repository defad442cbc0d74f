"""Shared fixtures: bundled lexicon/models and pipeline helpers."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from lamsem import (
    Lexicon,
    Model,
    SearchConfig,
    proof_to_diagram,
    prove,
    sentence_to_sequents,
    substitute_wirings,
)
from lamsem.formula import parse_formula


def data_path(name: str) -> Path:
    return Path(str(resources.files("lamsem").joinpath("data", name)))


@pytest.fixture(scope="session")
def lexicon() -> Lexicon:
    return Lexicon.from_path(data_path("lexicon.json"))


@pytest.fixture(scope="session")
def model_dogs() -> Model:
    return Model.from_path(data_path("model_dogs.json"))


@pytest.fixture(scope="session")
def model_donkey_true() -> Model:
    return Model.from_path(data_path("model_donkey_true.json"))


@pytest.fixture(scope="session")
def model_donkey_false() -> Model:
    return Model.from_path(data_path("model_donkey_false.json"))


def find_proofs(lexicon: Lexicon, sentence: str, goal: str = "s", k: int = 2):
    """All proofs of the first provable sequent reading of the sentence."""
    words = sentence.split()
    goal_f = parse_formula(goal, lexicon.atoms)
    for seq in sentence_to_sequents(words, lexicon, goal_f):
        result = prove(seq, SearchConfig(k=k))
        if result.proofs:
            return words, result.proofs
    return words, ()


def sentence_diagram(lexicon: Lexicon, sentence: str, goal: str = "s", k: int = 2):
    """Compiled, wiring-substituted diagram of the first proof."""
    words, proofs = find_proofs(lexicon, sentence, goal, k)
    assert proofs, f"no proof for {sentence!r}"
    raw = proof_to_diagram(proofs[0], lexicon, words=words)
    return substitute_wirings(raw, lexicon)


DONKEY = "every farmer who owns a donkey beats it"


def donkey_oracle(m: Model) -> bool:
    """Brute-force weak-reading truth condition for the donkey sentence.

    True iff there are F1 containing all farmers and D1, D2 each
    intersecting the donkeys with F1 cut down by owns(D1) equal to
    beats(D2).
    """
    farmer = m.unary_set("farmer")
    donkey = m.unary_set("donkey")
    for f1 in m.subsets():
        if farmer & ~f1:
            continue
        for d1 in m.subsets():
            if not d1 & donkey:
                continue
            owns = f1 & m.forward_image("owns", d1)
            for d2 in m.subsets():
                if not d2 & donkey:
                    continue
                if owns == m.forward_image("beats", d2):
                    return True
    return False
