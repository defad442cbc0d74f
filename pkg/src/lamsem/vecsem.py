"""Vector-space semantics on the free subset-indexed basis.

Every word and generator denotes the indicator tensor of its finite
relation (entry 1 at each related tuple).  A sentence diagram contracts to
a single scalar; with exact integer arithmetic that scalar counts the
relational witnesses, so it is non-zero exactly when the relational
evaluation is non-empty.
"""
from __future__ import annotations

from dataclasses import dataclass

from .diagram import Diagram, DiagramError, Generator, WireType, typecheck_report
from .formula import Formula
from .model import Model
from .planner import (
    DEFAULT_CELL_BUDGET,
    INT_SEMIRING,
    Semiring,
    TensorNode,
    contract_network,
    extract_network,
)
from .relsem import (
    DEFAULT_K,
    MAX_K,
    SemanticsError,
    carrier_size,
    eval_diagram_rel,
    generator_entries,
    word_entries,
)

FLOAT_SEMIRING = Semiring(0.0, 1.0, lambda a, b: a + b, lambda a, b: a * b)


@dataclass(frozen=True)
class SparseTensor:
    """Sparse indicator-style tensor: axis wire types plus non-zero entries."""

    shape: tuple[WireType, ...]
    entries: dict  # multi-index tuple -> scalar

    def __post_init__(self) -> None:
        for tup, v in self.entries.items():
            if v == 0:
                raise SemanticsError("sparse tensors must not store zeros")
            if len(tup) != len(self.shape):
                raise SemanticsError("entry index does not match tensor rank")


def _indicator(entries: set[tuple], shape: tuple[WireType, ...]) -> SparseTensor:
    return SparseTensor(shape, {tup: 1 for tup in entries})


def interp_word_vec(
    word: str, f: Formula, m: Model, k: int = DEFAULT_K
) -> SparseTensor:
    from .diagram import formula_wires

    return _indicator(word_entries(word, f, m, k), formula_wires(f))


def generator_vec(g: Generator, m: Model, k: int = DEFAULT_K) -> SparseTensor:
    return _indicator(generator_entries(g, m, k), g.ins + g.outs)


def eval_diagram_vec(
    d: Diagram,
    m: Model,
    k: int = DEFAULT_K,
    budget: int = DEFAULT_CELL_BUDGET,
    use_float: bool = False,
) -> int | float:
    """Contract the full tensor network of a closed sentence diagram.

    Returns the witness count as an exact non-negative integer (or a float
    when `use_float` is set — the default is exact because the truth
    criterion is "non-zero").
    """
    if k < 1 or k > MAX_K:
        raise SemanticsError(f"copy bound k must be in 1..{MAX_K}")
    report = typecheck_report(d)
    if report is not None:
        raise DiagramError(f"cannot evaluate an ill-typed diagram: {report}")
    if d.inputs:
        raise SemanticsError("scalar evaluation needs a closed diagram")
    semiring = FLOAT_SEMIRING if use_float else INT_SEMIRING
    one = semiring.one

    def make(tn: TensorNode) -> dict[tuple, object]:
        return {t: one for t in generator_entries(tn.gen, m, k)}

    net = extract_network(d)
    result = contract_network(
        net, make, semiring, lambda w: carrier_size(w, m, k), budget
    )
    # remaining free axes are output wires; sum them out to a scalar
    total = semiring.zero
    for v in result.entries.values():
        total = semiring.add(total, v)
    return total


def check_equivalence(
    d: Diagram, m: Model, k: int = DEFAULT_K, budget: int = DEFAULT_CELL_BUDGET
) -> bool:
    """True iff vector scalar != 0 exactly when the Rel evaluation is true."""
    scalar = eval_diagram_vec(d, m, k, budget)
    rel = eval_diagram_rel(d, m, k, budget)
    return (scalar != 0) == rel.nonempty
