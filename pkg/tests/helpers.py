"""Shared test machinery: random AST generation and independent oracles.

The random generator draws from a fixed symbol pool with fixed arities so
any generated formula can be prefix-encoded without arity conflicts.  The
alpha-equivalence oracle is a separate code path from the library's
(canonical renaming by rewrite + structural equality, rather than
environment-indexed comparison).
"""

from __future__ import annotations

import random
from dataclasses import replace

from folgen.tptp import (
    AnnotatedFormula,
    App,
    Atom,
    Binary,
    Equality,
    Formula,
    Negation,
    Problem,
    Quantified,
    Term,
    Var,
)

PREDICATES = [("p0", 0), ("p1", 1), ("p2", 2), ("q1", 1), ("q2", 2), ("r3", 3)]
FUNCTIONS = [("f1", 1), ("f2", 2), ("g1", 1)]
CONSTANTS = ["c0", "c1", "c2", "k3_xboole_0_c"]
CONNECTIVES = ["&", "|", "=>", "<=>"]


def random_term(rng: random.Random, bound: list[str], depth: int) -> Term:
    choices = ["const"]
    if bound:
        choices += ["var", "var"]
    if depth > 0:
        choices += ["fun", "fun"]
    kind = rng.choice(choices)
    if kind == "var":
        return Var(rng.choice(bound))
    if kind == "fun":
        name, arity = rng.choice(FUNCTIONS)
        return App(name, tuple(random_term(rng, bound, depth - 1) for _ in range(arity)))
    return App(rng.choice(CONSTANTS))


def random_formula(rng: random.Random, depth: int = 4, bound: list[str] | None = None) -> Formula:
    """A random closed formula (every variable bound by an enclosing quantifier)."""
    bound = list(bound or [])
    if depth <= 0:
        kind = rng.choice(["atom", "atom", "eq"])
    else:
        kind = rng.choice(
            ["quant", "quant", "binary", "binary", "neg", "atom", "eq"]
        )
    if kind == "quant":
        var = f"X{len(bound)}" if rng.random() < 0.7 else f"Y{len(bound)}"
        return Quantified(
            rng.choice(["!", "?"]), var, random_formula(rng, depth - 1, bound + [var])
        )
    if kind == "binary":
        return Binary(
            rng.choice(CONNECTIVES),
            random_formula(rng, depth - 1, bound),
            random_formula(rng, depth - 1, bound),
        )
    if kind == "neg":
        return Negation(random_formula(rng, depth - 1, bound))
    if kind == "eq":
        return Equality(
            random_term(rng, bound, 2),
            random_term(rng, bound, 2),
            negated=rng.random() < 0.3,
        )
    name, arity = rng.choice(PREDICATES)
    return Atom(name, tuple(random_term(rng, bound, 2) for _ in range(arity)))


def random_problem(rng: random.Random, max_formulas: int = 6) -> Problem:
    n = rng.randint(0, max_formulas)
    formulas = []
    for i in range(n):
        role = rng.choice(["axiom", "axiom", "plain", "negated_conjecture"])
        formulas.append(AnnotatedFormula(f"st_{i}", role, random_formula(rng, 3)))
    if n and rng.random() < 0.5:
        formulas[-1] = replace(formulas[-1], role="conjecture")
    return Problem(tuple(formulas))


def rename_bound(f: Formula, prefix: str = "Z") -> Formula:
    """Alpha-rename every binder to fresh names (same structure, new names)."""
    counter = [0]

    def term(t: Term, env: dict[str, str]) -> Term:
        if isinstance(t, Var):
            return Var(env[t.name])
        return App(t.symbol, tuple(term(a, env) for a in t.args))

    def walk(g: Formula, env: dict[str, str]) -> Formula:
        if isinstance(g, Quantified):
            fresh = f"{prefix}{counter[0]}"
            counter[0] += 1
            inner = dict(env)
            inner[g.variable] = fresh
            return Quantified(g.kind, fresh, walk(g.body, inner))
        if isinstance(g, Binary):
            return Binary(g.connective, walk(g.left, env), walk(g.right, env))
        if isinstance(g, Negation):
            return Negation(walk(g.body, env))
        if isinstance(g, Equality):
            return Equality(term(g.left, env), term(g.right, env), g.negated)
        return Atom(g.predicate, tuple(term(a, env) for a in g.args))

    return walk(f, {})


def canonical_oracle(f: Formula) -> Formula:
    """Independent canonical form: desugar ``!=``, then rename binders in
    pre-order traversal to V0, V1, ...  Two closed formulas are
    alpha-equivalent iff their canonical forms are structurally equal."""

    def desugar(g: Formula) -> Formula:
        if isinstance(g, Quantified):
            return Quantified(g.kind, g.variable, desugar(g.body))
        if isinstance(g, Binary):
            return Binary(g.connective, desugar(g.left), desugar(g.right))
        if isinstance(g, Negation):
            return Negation(desugar(g.body))
        if isinstance(g, Equality):
            plain = Equality(g.left, g.right, negated=False)
            return Negation(plain) if g.negated else plain
        return g

    return rename_bound(desugar(f), prefix="V")


def oracle_alpha_equal(a: Formula, b: Formula) -> bool:
    return canonical_oracle(a) == canonical_oracle(b)


def synthetic_library(rng: random.Random, n: int):
    """A library of n random closed formulas plus its frozen signature."""
    from folgen import prefix
    from folgen.library import FormulaLibrary

    pairs = [(f"th_{i}", random_formula(rng, depth=3)) for i in range(n)]
    library = FormulaLibrary(pairs)
    sig = prefix.SignatureMap()
    for _, f in pairs:
        prefix.register_formula_symbols(f, sig)
    # make sure every pool symbol is registered so new formulas decode
    probe = Problem(
        tuple(
            AnnotatedFormula(f"probe_{i}", "axiom", random_formula(random.Random(i), 4))
            for i in range(30)
        )
    )
    for af in probe.formulas:
        prefix.register_formula_symbols(af.formula, sig)
    return library, sig.freeze()


def random_predictions(rng: random.Random, library, sig, n: int):
    """Predictions mixing known premises, new conjectures, garbage, and
    self-premises, with occasional exact duplicates."""
    from folgen import prefix
    from folgen.harness import Prediction

    preds = []
    names = [e.name for e in library.entries]
    per_conj_counter: dict[str, int] = {}
    while len(preds) < n:
        conj = rng.choice(names)
        lines = []
        for _ in range(rng.randint(0, 4)):
            roll = rng.random()
            if roll < 0.35:
                entry = library.entries[rng.randrange(len(library.entries))]
                lines.append(tuple(prefix.encode_formula(rename_bound(entry.formula), sig)))
            elif roll < 0.55:
                lines.append(tuple(prefix.encode_formula(random_formula(rng, 3), sig)))
            elif roll < 0.7:
                entry = library.get(conj)
                lines.append(tuple(prefix.encode_formula(entry.formula, sig)))
            elif roll < 0.85:
                good = prefix.encode_formula(random_formula(rng, 2), sig)
                lines.append(tuple(good[: max(1, len(good) - 2)]))  # truncated
            else:
                lines.append(("cunregistered_sym",))
        idx = per_conj_counter.get(conj, 0)
        per_conj_counter[conj] = idx + 1
        preds.append(Prediction(conj, idx, tuple(lines)))
        if preds and rng.random() < 0.15:
            dup = preds[rng.randrange(len(preds))]
            idx = per_conj_counter.get(dup.conjecture_name, 0)
            per_conj_counter[dup.conjecture_name] = idx + 1
            preds.append(Prediction(dup.conjecture_name, idx, dup.lines))
    return preds[:n]


def brute_force_report(predictions, library, sig, opts=None):
    """Independent re-computation of the evaluation report.

    Uses list-scan dedup, oracle alpha-equivalence for classification, its
    own assembly of axiom lists, and a direct stub-prover call per problem.
    Returns (report_dict, per_problem list) for comparison with evaluate().
    """
    from folgen import prefix as prefix_mod
    from folgen.harness import EvalOptions
    from folgen.stubprover import stub_verdict
    from folgen.tptp import AnnotatedFormula as AF
    from folgen.tptp import Problem as Prob

    opts = opts or EvalOptions()
    seen_keys = []
    unique = []
    for p in predictions:
        key = (p.conjecture_name, p.lines)
        if key not in seen_keys:
            seen_keys.append(key)
            unique.append(p)

    counts = {
        "predictions": len(predictions),
        "unique_after_dedup": len(unique),
        "problems_no_new_conjecture": 0,
        "problems_with_new_conjecture": 0,
        "proved": 0,
        "countersatisfiable": 0,
        "unknown": 0,
        "proved_theorems": 0,
        "single_premise_proofs": 0,
        "self_premise_proofs": 0,
        "unparsable_lines": 0,
        "new_formula_count": 0,
        "new_formula_unique": 0,
        "verdicts_no_new": {"proved": 0, "countersatisfiable": 0, "unknown": 0},
        "verdicts_with_new": {"proved": 0, "countersatisfiable": 0, "unknown": 0},
    }
    per_problem = []
    new_canonicals = []
    proved_names = set()
    for p in unique:
        decoded = []
        for line in p.lines:
            try:
                decoded.append(prefix_mod.decode_tokens(list(line), sig))
            except Exception:
                decoded.append(None)
        counts["unparsable_lines"] += sum(1 for d in decoded if d is None)
        known, new = [], []
        for d in decoded:
            if d is None:
                continue
            hit = None
            for entry in library.entries:
                if oracle_alpha_equal(entry.formula, d):
                    hit = entry
                    break
            if hit is not None:
                known.append(hit)
            else:
                new.append(d)
        for d in new:
            counts["new_formula_count"] += 1
            new_canonicals.append(canonical_oracle(d))
        try:
            conj = library.get(p.conjecture_name)
        except Exception:
            conj = None
        if conj is None:
            self_premise = False
            has_new = bool(new)
            verdict_kind, used = "unknown", ()
        else:
            self_premise = any(
                oracle_alpha_equal(e.formula, conj.formula) for e in known
            ) or any(oracle_alpha_equal(d, conj.formula) for d in new)
            axioms = []
            seen_names = {p.conjecture_name}
            for e in known:
                if oracle_alpha_equal(e.formula, conj.formula):
                    continue
                if opts.strict_chronology and e.chrono_index >= conj.chrono_index:
                    continue
                if e.name in seen_names:
                    continue
                seen_names.add(e.name)
                axioms.append(AF(e.name, "axiom", e.formula))
            kept_new = [d for d in new if not oracle_alpha_equal(d, conj.formula)]
            for i, d in enumerate(kept_new, 1):
                axioms.append(AF(f"new_{i}", "axiom", d))
            has_new = bool(kept_new)
            problem = Prob(
                tuple(axioms) + (AF(p.conjecture_name, "conjecture", conj.formula),)
            )
            verdict = stub_verdict(problem)
            name = type(verdict).__name__
            if name == "Proved":
                verdict_kind, used = "proved", verdict.used_premise_names
            elif name == "CounterSatisfiable":
                verdict_kind, used = "countersatisfiable", ()
            else:
                verdict_kind, used = "unknown", ()
        stream = "verdicts_with_new" if has_new else "verdicts_no_new"
        counts[stream][verdict_kind] += 1
        counts[
            "problems_with_new_conjecture" if has_new else "problems_no_new_conjecture"
        ] += 1
        counts[verdict_kind] += 1
        if verdict_kind == "proved":
            proved_names.add(p.conjecture_name)
            if len(used) == 1:
                counts["single_premise_proofs"] += 1
        if self_premise:
            counts["self_premise_proofs"] += 1
        per_problem.append(
            {
                "conjecture": p.conjecture_name,
                "sample": p.sample_index,
                "n_known": len(known),
                "n_new": len(new),
                "n_unparsable": sum(1 for d in decoded if d is None),
                "self_premise": self_premise,
                "has_new": has_new,
                "verdict": verdict_kind,
                "single_premise": verdict_kind == "proved" and len(used) == 1,
            }
        )
    counts["proved_theorems"] = len(proved_names)
    deduped = []
    for c in new_canonicals:
        if c not in deduped:
            deduped.append(c)
    counts["new_formula_unique"] = len(deduped)
    return counts, per_problem


class FakeModel:
    """Next-token distribution conditioned only on the last token.

    Satisfies the decoding interface (callable returning [T, V] logits plus
    ``config.context_length``) with fully known probabilities, so decoder
    behavior can be checked against exact enumeration.
    """

    def __init__(self, table, context_length: int = 1_000_000):
        import torch
        from types import SimpleNamespace

        self._torch = torch
        if isinstance(table, dict):
            self.table = {k: torch.tensor(v, dtype=torch.float32) for k, v in table.items()}
            self.constant = None
        else:
            self.table = None
            self.constant = torch.tensor(table, dtype=torch.float32)
        self.config = SimpleNamespace(context_length=context_length)

    def __call__(self, ids):
        torch = self._torch
        rows = []
        for tok in ids.tolist():
            rows.append(self.constant if self.table is None else self.table[tok])
        return torch.stack(rows)
