"""Tiny built-in prover for hermetic tests.

Coverage is deliberately narrow and documented:

- conjecture alpha-equal to some axiom          -> Theorem (that axiom used)
- conjecture a propositional tautology          -> Theorem (no premises)
- conjecture a propositional contradiction      -> CounterSatisfiable
- anything else                                 -> GaveUp

"Propositional" means: quantifiers are stripped, each distinct atomic
subformula becomes one boolean variable, and the formula is evaluated under
every assignment (up to 16 atoms).  Run as a script it mimics the SZS
conventions of a real first-order prover, including ``file(...)`` source
annotations on the used axioms, so the subprocess harness can drive it
exactly like an external prover.
"""

from __future__ import annotations

import sys
from itertools import product

from . import tptp
from .tptp import Atom, Binary, Equality, Formula, Negation, Problem, Quantified

_MAX_ATOMS = 16


def _strip_quantifiers(f: Formula) -> Formula:
    while isinstance(f, Quantified):
        f = f.body
    return f


def _collect_atoms(f: Formula, atoms: dict) -> None:
    f = _strip_quantifiers(f)
    if isinstance(f, Binary):
        _collect_atoms(f.left, atoms)
        _collect_atoms(f.right, atoms)
    elif isinstance(f, Negation):
        _collect_atoms(f.body, atoms)
    else:
        key = tptp.print_formula(
            Equality(f.left, f.right) if isinstance(f, Equality) else f
        )
        atoms.setdefault(key, len(atoms))


def _truth(f: Formula, atoms: dict, row: tuple[bool, ...]) -> bool:
    f = _strip_quantifiers(f)
    if isinstance(f, Binary):
        a, b = _truth(f.left, atoms, row), _truth(f.right, atoms, row)
        if f.connective == "&":
            return a and b
        if f.connective == "|":
            return a or b
        if f.connective == "=>":
            return (not a) or b
        return a == b  # <=>
    if isinstance(f, Negation):
        return not _truth(f.body, atoms, row)
    if isinstance(f, Equality):
        value = row[atoms[tptp.print_formula(Equality(f.left, f.right))]]
        return not value if f.negated else value
    return row[atoms[tptp.print_formula(f)]]


def _propositional_status(f: Formula) -> str:
    """'valid', 'unsat', or 'open' by brute-force truth table."""
    atoms: dict = {}
    _collect_atoms(f, atoms)
    if len(atoms) > _MAX_ATOMS:
        return "open"
    any_true = any_false = False
    for row in product((False, True), repeat=len(atoms)):
        if _truth(f, atoms, row):
            any_true = True
        else:
            any_false = True
        if any_true and any_false:
            return "open"
    return "valid" if any_true else "unsat"


def stub_verdict(problem: Problem):
    from .harness import CounterSatisfiable, Proved, Unknown

    conjecture = None
    for af in problem.formulas:
        if af.role == "conjecture":
            conjecture = af
            break
    if conjecture is None:
        return Unknown("error")
    conj_key = tptp.alpha_key(conjecture.formula)
    for af in problem.formulas:
        if af.role == "axiom" and tptp.alpha_key(af.formula) == conj_key:
            return Proved((af.name,))
    status = _propositional_status(conjecture.formula)
    if status == "valid":
        return Proved(())
    if status == "unsat":
        return CounterSatisfiable()
    return Unknown("gaveup")


def main(argv: list[str] | None = None) -> int:
    from .harness import CounterSatisfiable, Proved

    args = [a for a in (argv if argv is not None else sys.argv[1:]) if not a.startswith("-")]
    if not args:
        print("usage: folgen-stubprover [prover-style flags] PROBLEM_FILE")
        return 2
    path = args[0]
    with open(path, encoding="utf-8") as fh:
        problem = tptp.parse_problem(fh.read())
    verdict = stub_verdict(problem)
    if isinstance(verdict, Proved):
        print(f"# SZS status Theorem for {path}")
        print("# SZS output start Proof object")
        for af in problem.formulas:
            if af.name in verdict.used_premise_names:
                body = tptp.print_formula(af.formula)
                print(f"fof({af.name}, axiom, {body}, file('{path}', {af.name})).")
        print("# SZS output end Proof object")
    elif isinstance(verdict, CounterSatisfiable):
        print(f"# SZS status CounterSatisfiable for {path}")
    else:
        print(f"# SZS status GaveUp for {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
