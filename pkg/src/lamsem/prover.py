"""Cut-free backward proof search with bounded copying.

The permutation rule is never taken as a free search step.  Instead, each
movable (``@``-rooted) antecedent formula is treated as relocatable: before
matching any other rule the searcher may move movable formulas to arbitrary
positions, and every such move is recorded as an explicit Perm node so the
emitted tree remains checkable against the rule schemas.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .formula import (
    Atom,
    Bang,
    Formula,
    Nabla,
    Over,
    Sequent,
    Tensor,
    Under,
    atom_balance,
    format_formula,
    format_sequent,
    is_nabla_rooted,
    parse_formula,
    parse_sequent,
)

AXIOM = "Axiom"
UNDER_L = "\\L"
OVER_L = "/L"
TENSOR_L = "*L"
UNDER_R = "\\R"
OVER_R = "/R"
TENSOR_R = "*R"
BANG_L = "!L"
BANG_R = "!R"
NABLA_L = "@L"
NABLA_R = "@R"
PERM = "Perm"

RULES = frozenset(
    {
        AXIOM,
        UNDER_L,
        OVER_L,
        TENSOR_L,
        UNDER_R,
        OVER_R,
        TENSOR_R,
        BANG_L,
        BANG_R,
        NABLA_L,
        NABLA_R,
        PERM,
    }
)


@dataclass(frozen=True)
class ProofTree:
    rule: str
    conclusion: Sequent
    premises: tuple["ProofTree", ...] = ()
    data: tuple[tuple[str, int], ...] = ()

    def get(self, key: str) -> int:
        for k, v in self.data:
            if k == key:
                return v
        raise KeyError(key)

    def rule_multiset(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        stack = [self]
        while stack:
            node = stack.pop()
            counts[node.rule] = counts.get(node.rule, 0) + 1
            stack.extend(node.premises)
        return counts


@dataclass(frozen=True)
class SearchConfig:
    k: int = 2
    depth_limit: int = 64
    max_proofs: int = 8
    enumerate_all: bool = False

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("copy bound k must be >= 1")
        if self.depth_limit < 1 or self.max_proofs < 1:
            raise ValueError("depth_limit and max_proofs must be >= 1")


@dataclass(frozen=True)
class SearchResult:
    """Found proofs, plus whether the search space was fully explored.

    ``exhaustive`` distinguishes "definitively unprovable" (empty and
    exhaustive) from "nothing found before the depth limit cut the search".
    """

    proofs: tuple[ProofTree, ...]
    exhaustive: bool

    def __iter__(self) -> Iterator[ProofTree]:
        return iter(self.proofs)

    def __len__(self) -> int:
        return len(self.proofs)

    def __bool__(self) -> bool:
        return bool(self.proofs)

    def __getitem__(self, i: int) -> ProofTree:
        return self.proofs[i]


def perm_normalize(s: Sequent) -> Sequent:
    """Canonical placement: movable formulas sorted to the leftmost positions."""
    movable = [f for f in s.antecedent if is_nabla_rooted(f)]
    rest = [f for f in s.antecedent if not is_nabla_rooted(f)]
    movable.sort(key=format_formula)
    return Sequent(tuple(movable + rest), s.succedent)


def _movable_arrangements(
    ant: tuple[Formula, ...]
) -> Iterator[tuple[tuple[Formula, ...], list[tuple[int, int, tuple[Formula, ...]]]]]:
    """All antecedent rearrangements reachable by moving movable formulas.

    Yields (arrangement, moves); each move is (src, dst, resulting antecedent)
    where the formula at position dst in the previous arrangement is read as
    having been moved there from position src in the next one up the proof.
    """
    idx = [i for i, f in enumerate(ant) if is_nabla_rooted(f)]
    if not idx:
        yield ant, []
        return
    tagged = list(enumerate(ant))
    base = [t for t in tagged if t[0] not in idx]
    movers = [tagged[i] for i in idx]
    n = len(ant)
    seen: set[tuple[Formula, ...]] = set()
    for mperm in itertools.permutations(movers):
        for slots in itertools.combinations(range(n), len(movers)):
            arrangement: list[Optional[tuple[int, Formula]]] = [None] * n
            for slot, mover in zip(slots, mperm):
                arrangement[slot] = mover
            it = iter(base)
            for i in range(n):
                if arrangement[i] is None:
                    arrangement[i] = next(it)
            formulas = tuple(t[1] for t in arrangement)  # type: ignore[index]
            if formulas in seen:
                continue
            seen.add(formulas)
            # Recover a chain of single-formula moves taking `ant` to
            # `formulas` where only movable formulas ever move: place each
            # mover at its target slot in ascending target order.  Original
            # indices keep equal formulas distinct.
            cur = list(tagged)
            target = list(arrangement)  # type: ignore[arg-type]
            mover_ids = {t[0] for t in movers}
            moves: list[tuple[int, int, tuple[Formula, ...]]] = []
            for tpos in range(n):
                tid = target[tpos][0]
                if tid not in mover_ids:
                    continue
                cpos = next(p for p in range(n) if cur[p][0] == tid)
                if cpos == tpos:
                    continue
                item = cur.pop(cpos)
                cur.insert(tpos, item)
                moves.append((tpos, cpos, tuple(t[1] for t in cur)))
            yield formulas, moves


def _wrap_perms(
    tree: ProofTree,
    conclusion_ant: tuple[Formula, ...],
    succ: Formula,
    moves: list[tuple[int, int, tuple[Formula, ...]]],
) -> ProofTree:
    """Wrap `tree` (proving the rearranged sequent) in explicit Perm nodes."""
    for i in range(len(moves) - 1, -1, -1):
        src, dst, _premise_ant = moves[i]
        ant = moves[i - 1][2] if i > 0 else conclusion_ant
        tree = ProofTree(
            rule=PERM,
            conclusion=Sequent(ant, succ),
            premises=(tree,),
            data=(("src", src), ("dst", dst)),
        )
    return tree


class _Searcher:
    _NODE_CAP = 64

    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        # sequent -> (proofs, exhaustive, depth budget the entry was computed at)
        self.memo: dict[Sequent, tuple[tuple[ProofTree, ...], bool, int]] = {}

    def search(self, seq: Sequent, depth: int) -> tuple[tuple[ProofTree, ...], bool]:
        balance = atom_balance(seq)
        if balance is not None and any(v != 0 for v in balance.values()):
            return (), True
        hit = self.memo.get(seq)
        if hit is not None:
            proofs, exhaustive, at_depth = hit
            if exhaustive or at_depth >= depth:
                return proofs, exhaustive
        if depth <= 0:
            return (), False
        proofs: list[ProofTree] = []
        exhaustive = True
        for ant, moves in _movable_arrangements(seq.antecedent):
            vseq = Sequent(ant, seq.succedent)
            for rule, data, premise_seqs in self._applications(vseq):
                sub: list[tuple[ProofTree, ...]] = []
                ok = True
                for p in premise_seqs:
                    found, exh = self.search(p, depth - 1)
                    if not exh:
                        exhaustive = False
                    if not found:
                        ok = False
                        break
                    sub.append(found)
                if not ok:
                    continue
                for combo in itertools.product(*sub):
                    node = ProofTree(rule, vseq, tuple(combo), data)
                    proofs.append(_wrap_perms(node, seq.antecedent, seq.succedent, moves))
                    if len(proofs) >= self._NODE_CAP:
                        break
                if len(proofs) >= self._NODE_CAP:
                    break
            if len(proofs) >= self._NODE_CAP:
                break
        result = tuple(proofs)
        self.memo[seq] = (result, exhaustive, depth)
        return result, exhaustive

    def _applications(
        self, seq: Sequent
    ) -> Iterator[tuple[str, tuple[tuple[str, int], ...], list[Sequent]]]:
        ant, succ = seq.antecedent, seq.succedent
        n = len(ant)
        if n == 1 and ant[0] == succ:
            yield AXIOM, (), []
        for pos, f in enumerate(ant):
            if isinstance(f, Bang):
                for copies in range(1, self.cfg.k + 1):
                    premise = ant[:pos] + (f.inner,) * copies + ant[pos + 1 :]
                    yield BANG_L, (("pos", pos), ("n", copies)), [Sequent(premise, succ)]
            elif isinstance(f, Nabla):
                premise = ant[:pos] + (f.inner,) + ant[pos + 1 :]
                yield NABLA_L, (("pos", pos),), [Sequent(premise, succ)]
            elif isinstance(f, Tensor):
                premise = ant[:pos] + (f.left, f.right) + ant[pos + 1 :]
                yield TENSOR_L, (("pos", pos),), [Sequent(premise, succ)]
        for pos, f in enumerate(ant):
            if isinstance(f, Under):
                for sigma_len in range(1, pos + 1):
                    sigma = ant[pos - sigma_len : pos]
                    rest = ant[: pos - sigma_len] + (f.right,) + ant[pos + 1 :]
                    yield UNDER_L, (("pos", pos), ("sigma_len", sigma_len)), [
                        Sequent(sigma, f.left),
                        Sequent(rest, succ),
                    ]
            elif isinstance(f, Over):
                for sigma_len in range(1, n - pos):
                    sigma = ant[pos + 1 : pos + 1 + sigma_len]
                    rest = ant[:pos] + (f.left,) + ant[pos + 1 + sigma_len :]
                    yield OVER_L, (("pos", pos), ("sigma_len", sigma_len)), [
                        Sequent(sigma, f.right),
                        Sequent(rest, succ),
                    ]
        if isinstance(succ, Tensor):
            for split in range(1, n):
                yield TENSOR_R, (("split", split),), [
                    Sequent(ant[:split], succ.left),
                    Sequent(ant[split:], succ.right),
                ]
        elif isinstance(succ, Under):
            yield UNDER_R, (), [Sequent((succ.left,) + ant, succ.right)]
        elif isinstance(succ, Over):
            yield OVER_R, (), [Sequent(ant + (succ.right,), succ.left)]
        elif isinstance(succ, Bang) and n == 1 and isinstance(ant[0], Bang):
            yield BANG_R, (), [Sequent((ant[0].inner,), succ.inner)]
        elif isinstance(succ, Nabla) and n == 1 and isinstance(ant[0], Nabla):
            yield NABLA_R, (), [Sequent((ant[0].inner,), succ.inner)]


def _canonical_key(t: ProofTree):
    """Proof identity up to Perm-node placement."""
    if t.rule == PERM:
        return _canonical_key(t.premises[0])
    norm = perm_normalize(t.conclusion)
    extra = tuple(v for k, v in t.data if k == "n")
    return (
        t.rule,
        format_sequent(norm),
        extra,
        tuple(_canonical_key(p) for p in t.premises),
    )


def prove(seq: Sequent, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Backward search for cut-free proofs of `seq`.

    Returns up to ``cfg.max_proofs`` proofs, deduplicated up to Perm-node
    placement and sorted canonically (all of them under ``enumerate_all``).
    """
    searcher = _Searcher(cfg)
    raw, exhaustive = searcher.search(seq, cfg.depth_limit)
    seen = set()
    unique: list[ProofTree] = []
    for t in raw:
        key = _canonical_key(t)
        if key not in seen:
            seen.add(key)
            unique.append(t)
    unique.sort(key=proof_to_text)
    if not cfg.enumerate_all:
        unique = unique[: cfg.max_proofs]
    return SearchResult(tuple(unique), exhaustive)


# -------------------------------------------------------------- rendering


def proof_to_text(t: ProofTree) -> str:
    lines: list[str] = []

    def walk(node: ProofTree, indent: int) -> None:
        lines.append("  " * indent + f"{node.rule}: {format_sequent(node.conclusion)}")
        for p in node.premises:
            walk(p, indent + 1)

    walk(t, 0)
    return "\n".join(lines)


# ------------------------------------------------------------ JSON export


def proof_to_json_dict(t: ProofTree) -> dict:
    return {
        "rule": t.rule,
        "sequent": {
            "antecedent": [format_formula(f) for f in t.conclusion.antecedent],
            "succedent": format_formula(t.conclusion.succedent),
        },
        "data": {k: v for k, v in t.data},
        "premises": [proof_to_json_dict(p) for p in t.premises],
    }


def proof_to_json(t: ProofTree) -> str:
    return json.dumps(proof_to_json_dict(t), sort_keys=True, indent=2)


def proof_from_json_dict(d: dict, atoms=None) -> ProofTree:
    from .formula import DEFAULT_ATOMS

    atoms = atoms or DEFAULT_ATOMS
    ant = tuple(parse_formula(t, atoms) for t in d["sequent"]["antecedent"])
    seq = Sequent(ant, parse_formula(d["sequent"]["succedent"], atoms))
    premises = tuple(proof_from_json_dict(p, atoms) for p in d["premises"])
    data = tuple(sorted(d["data"].items()))
    return ProofTree(d["rule"], seq, premises, data)


def proof_from_json(text: str, atoms=None) -> ProofTree:
    return proof_from_json_dict(json.loads(text), atoms)
