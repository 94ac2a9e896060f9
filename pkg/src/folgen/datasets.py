"""Builders for the three training corpus formats.

1. concatenated_text: article sources with ``::`` line comments stripped,
   blank runs collapsed, files joined by one blank line.
3. tokenized_proofs: derivation statements re-emitted one per line with a
   single space between every token.
4. prefix_premises: one file per proved conjecture; the first line is the
   prefix-encoded conjecture, the remaining lines its premises in the order
   the prover used them.

(The numbering gap is deliberate: the second corpus kind is plain text that
is ingested as-is, nothing to build.)
"""

from __future__ import annotations

from dataclasses import dataclass

from . import prefix, tptp
from .library import FormulaLibrary, UnknownName

DATASET_KINDS = ("concatenated_text", "tokenized_proofs", "prefix_premises")


class NoConjecture(ValueError):
    pass


@dataclass(frozen=True)
class CorpusSpec:
    dataset_kind: str
    input_paths: tuple[str, ...]
    output_path: str

    def __post_init__(self):
        if self.dataset_kind not in DATASET_KINDS:
            raise ValueError(f"unknown dataset kind {self.dataset_kind!r}")


@dataclass(frozen=True)
class ProofManifest:
    conjecture_name: str
    ordered_premises: tuple[str, ...]

    def __post_init__(self):
        if self.conjecture_name in self.ordered_premises:
            raise ValueError("conjecture listed among its own premises")
        if len(set(self.ordered_premises)) != len(self.ordered_premises):
            raise ValueError("duplicate premise names")


def build_corpus(spec: CorpusSpec) -> str:
    """Run the text-corpus builder the corpus spec names and write its output.

    Covers the two self-contained kinds; prefix premise files additionally
    need a formula library and a signature, see build_prefix_premise_file.
    Returns the built text.
    """
    texts = []
    for path in spec.input_paths:
        with open(path, encoding="utf-8") as fh:
            texts.append(fh.read())
    if spec.dataset_kind == "concatenated_text":
        out = build_concatenated(texts)
    elif spec.dataset_kind == "tokenized_proofs":
        out = build_tokenized_proofs(texts)
    else:
        raise ValueError(
            "prefix_premises needs a library and signature; use "
            "build_prefix_premise_file"
        )
    with open(spec.output_path, "w", encoding="utf-8") as fh:
        fh.write(out)
    return out


def _strip_block(text: str) -> str:
    lines = []
    for line in text.split("\n"):
        cut = line.find("::")
        if cut != -1:
            line = line[:cut]
        lines.append(line.rstrip())
    # drop leading/trailing blanks, collapse interior runs to one
    while lines and not lines[0]:
        lines.pop(0)
    while lines and not lines[-1]:
        lines.pop()
    out: list[str] = []
    for line in lines:
        if not line and out and not out[-1]:
            continue
        out.append(line)
    return "\n".join(out)


def build_concatenated(files: list[str]) -> str:
    """Comment-stripped article texts joined in order by one blank line.

    Idempotent: feeding the output back as a single file reproduces it.
    """
    blocks = [b for b in (_strip_block(f) for f in files) if b]
    return "\n\n".join(blocks)


def build_tokenized_proofs(derivations: list[str]) -> str:
    """Each derivation re-tokenized, one statement per line, space-joined.

    Statements end at a ``.`` token.  Derivations are separated by a blank
    line.  ``%``/``#`` comment lines are dropped before tokenizing.
    """
    blocks = []
    for derivation in derivations:
        kept = [
            line
            for line in derivation.split("\n")
            if not line.lstrip().startswith(("%", "#"))
        ]
        tokens = tptp.tokenize_tptp("\n".join(kept))
        statements: list[list[str]] = []
        current: list[str] = []
        for tok in tokens:
            current.append(tok)
            if tok == ".":
                statements.append(current)
                current = []
        if current:
            statements.append(current)
        if statements:
            blocks.append("\n".join(" ".join(s) for s in statements))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def extract_premise_order(derivation: str) -> ProofManifest:
    """Conjecture name plus axiom names in order of first appearance.

    The conjecture is the first statement with role ``conjecture`` or
    ``negated_conjecture``; repeated axiom names keep their first position
    and the conjecture's own name never counts as a premise.
    """
    kept = [
        line
        for line in derivation.split("\n")
        if not line.lstrip().startswith(("%", "#"))
    ]
    problem = tptp.parse_problem("\n".join(kept))
    conjecture_name = None
    for af in problem.formulas:
        if af.role in ("conjecture", "negated_conjecture"):
            conjecture_name = af.name
            break
    if conjecture_name is None:
        raise NoConjecture("derivation has no (negated_)conjecture statement")
    seen = set()
    ordered: list[str] = []
    for af in problem.formulas:
        if af.role != "axiom" or af.name == conjecture_name or af.name in seen:
            continue
        seen.add(af.name)
        ordered.append(af.name)
    return ProofManifest(conjecture_name, tuple(ordered))


def build_prefix_premise_file(
    manifest: ProofManifest, library: FormulaLibrary, sig: prefix.SignatureMap
) -> str:
    """Conjecture-first prefix file: line 1 the conjecture, then premises."""
    lines = [prefix.encode_line(library.get(manifest.conjecture_name).formula, sig)]
    for name in manifest.ordered_premises:
        lines.append(prefix.encode_line(library.get(name).formula, sig))
    return "\n".join(lines) + "\n"
