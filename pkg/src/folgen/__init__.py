"""folgen: neural conjecturing for first-order logic at desk scale.

Parse TPTP, build training corpora (concatenated article text, tokenized
proofs, conjecture-first prefix premise files), train a small decoder-only
transformer over them, generate premise predictions by sampling or beam
search, and evaluate the generated conjectures with an automated theorem
prover.

The heavyweight pieces (`folgen.lm`, `folgen.service`) are imported lazily
by the CLI; this top-level module only pulls in the logic core.
"""

__version__ = "0.1.0"

from . import datasets, library, prefix, tptp
from .library import FormulaLibrary
from .prefix import SignatureMap, decode_tokens, encode_formula, build_signature
from .tptp import (
    alpha_equal,
    parse_problem,
    print_problem,
    tokenize_tptp,
    Problem,
    AnnotatedFormula,
)

__all__ = [
    "__version__",
    "datasets",
    "library",
    "prefix",
    "tptp",
    "FormulaLibrary",
    "SignatureMap",
    "decode_tokens",
    "encode_formula",
    "build_signature",
    "alpha_equal",
    "parse_problem",
    "print_problem",
    "tokenize_tptp",
    "Problem",
    "AnnotatedFormula",
]
