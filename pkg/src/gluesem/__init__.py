"""Glue semantics deduction engine.

Derives the readings of a sentence by linear-logic proof search over the
meaning constructors its words contribute against an LFG f-structure.
"""

from .errors import (
    AtomicValueOnPath,
    AtomTypeMismatch,
    CyclicStructure,
    DuplicateAttribute,
    DuplicateLabel,
    ExtensionOfNonIntension,
    FStructureError,
    FStructureSyntaxError,
    GlueError,
    GlueFormulaError,
    GlueSyntaxError,
    InvalidStep,
    LexiconError,
    MissingAttribute,
    NonPatternUnification,
    NotProvable,
    OpenVariable,
    PredMismatch,
    ProverError,
    TensorInConclusion,
    TermError,
    TermSyntaxError,
    TypeMismatch,
    UnboundVariable,
    UnknownLabel,
)
from .fstructure import FStructure, SemProjectionRef, parse_fstructure
from .glue import (
    Forall,
    Formula,
    GlueAtom,
    Impl,
    Tensor,
    alpha_equal_formulas,
    curry,
    format_glue,
    parse_glue,
)
from .lexicon import (
    LexicalEntry,
    Lexicon,
    Premise,
    Scenario,
    load_lexicon,
    load_scenario,
    parse_lexicon,
    parse_scenario,
    premises,
)
from .oracle import oracle_enumerate
from .proofcheck import check_proof
from .prover import (
    Proof,
    Reading,
    SearchLimits,
    SearchStats,
    Sequent,
    derive_readings,
    format_proof,
    proof_json,
    prove,
    prove_theorem,
)
from .terms import (
    App,
    Const,
    Down,
    Lam,
    Term,
    Up,
    Var,
    alpha_equal,
    canonical_key,
    format_term,
    infer_type,
    normalize,
    parse_term,
    typecheck,
)
from .types import ArrowType, BaseType, SimpleType, parse_type

__version__ = "0.1.0"

__all__ = [
    "App",
    "ArrowType",
    "AtomTypeMismatch",
    "AtomicValueOnPath",
    "BaseType",
    "Const",
    "CyclicStructure",
    "Down",
    "DuplicateAttribute",
    "DuplicateLabel",
    "ExtensionOfNonIntension",
    "FStructure",
    "FStructureError",
    "FStructureSyntaxError",
    "Forall",
    "Formula",
    "GlueAtom",
    "GlueError",
    "GlueFormulaError",
    "GlueSyntaxError",
    "Impl",
    "InvalidStep",
    "Lam",
    "LexicalEntry",
    "Lexicon",
    "LexiconError",
    "MissingAttribute",
    "NonPatternUnification",
    "NotProvable",
    "OpenVariable",
    "PredMismatch",
    "Premise",
    "Proof",
    "ProverError",
    "Reading",
    "Scenario",
    "SearchLimits",
    "SearchStats",
    "SemProjectionRef",
    "Sequent",
    "SimpleType",
    "Tensor",
    "TensorInConclusion",
    "Term",
    "TermError",
    "TermSyntaxError",
    "TypeMismatch",
    "UnboundVariable",
    "UnknownLabel",
    "Up",
    "Var",
    "alpha_equal",
    "alpha_equal_formulas",
    "canonical_key",
    "check_proof",
    "curry",
    "derive_readings",
    "format_glue",
    "format_proof",
    "format_term",
    "infer_type",
    "load_lexicon",
    "load_scenario",
    "normalize",
    "oracle_enumerate",
    "parse_fstructure",
    "parse_glue",
    "parse_lexicon",
    "parse_scenario",
    "parse_term",
    "parse_type",
    "premises",
    "proof_json",
    "prove",
    "prove_theorem",
    "typecheck",
]
