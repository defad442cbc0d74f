"""lamsem: a Lambek-with-subexponentials grammar and semantics toolkit.

Pipeline: parse a lexicon, prove a sentence sequent with bounded copying
(!) and permutation (@) modalities, compile the proof to a typed string
diagram, substitute lexical internal wirings, and evaluate the diagram in
finite relational or free vector-space semantics.
"""
from .checker import ProofCheckError, check_proof, check_proof_report, verify_proof
from .diagram import (
    Diagram,
    DiagramError,
    export,
    diagram_from_json,
    proof_to_diagram,
    substitute_wirings,
    swap_erased_key,
    typecheck,
    typecheck_report,
)
from .formula import (
    Atom,
    Bang,
    Formula,
    FormulaSyntaxError,
    Nabla,
    Over,
    Sequent,
    Tensor,
    Under,
    format_formula,
    format_sequent,
    parse_formula,
    parse_sequent,
)
from .lexicon import Lexicon, LexiconError, sentence_to_sequents
from .model import Model, ModelError
from .prover import (
    ProofTree,
    SearchConfig,
    SearchResult,
    proof_from_json,
    proof_to_json,
    proof_to_text,
    prove,
)
from .relsem import (
    FinRel,
    SemanticsError,
    eval_diagram_rel,
    generator_rel,
    interp_object,
    interp_word_rel,
)
from .vecsem import (
    SparseTensor,
    check_equivalence,
    eval_diagram_vec,
    generator_vec,
    interp_word_vec,
)

__version__ = "0.1.0"
