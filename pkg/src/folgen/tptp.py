"""First-order TPTP (FOF) abstract syntax, parser, and printer.

Covers the fragment used throughout the pipeline: quantifiers ``!``/``?``
with bracketed variable lists, the connectives ``&``, ``|``, ``=>``, ``<=>``,
``~``, infix ``=`` / ``!=``, and plain applications.  ``cnf(...)`` statements
are accepted and parsed with the same grammar (a clause is just a disjunction
of literals).  Annotations after the formula (source, useful-info) are parsed
and discarded.

Precedence: ``~`` binds tightest, then ``&``/``|`` (left-associative, mixing
them without parentheses is a syntax error), then ``=>``/``<=>``
(non-associative).  A quantifier scopes over a single unit formula.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

SYMBOL_RE = re.compile(r"[a-z0-9_][A-Za-z0-9_]*\Z")
VARIABLE_RE = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")

ROLES = ("axiom", "conjecture", "plain", "negated_conjecture")

FORALL = "!"
EXISTS = "?"


class OpenFormula(ValueError):
    """A formula expected to be closed has a free variable."""


class TptpSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        hint = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{line}:{col}: {message}{hint}")


# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple["Term", ...] = ()


Term = Union[Var, App]


@dataclass(frozen=True)
class Quantified:
    kind: str  # FORALL or EXISTS
    variable: str
    body: "Formula"


@dataclass(frozen=True)
class Binary:
    connective: str  # "&", "|", "=>", "<=>"
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Negation:
    body: "Formula"


@dataclass(frozen=True)
class Equality:
    left: Term
    right: Term
    negated: bool = False


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()


Formula = Union[Quantified, Binary, Negation, Equality, Atom]


@dataclass(frozen=True)
class AnnotatedFormula:
    name: str
    role: str
    formula: Formula


@dataclass(frozen=True)
class Problem:
    formulas: tuple[AnnotatedFormula, ...] = ()

    def validate(self) -> None:
        """Check the well-formedness invariants (unique names, one conjecture)."""
        seen = set()
        for af in self.formulas:
            if af.name in seen:
                raise ValueError(f"duplicate formula name: {af.name}")
            seen.add(af.name)
        n_conj = sum(1 for af in self.formulas if af.role == "conjecture")
        if n_conj > 1:
            raise ValueError(f"problem has {n_conj} conjectures, at most one allowed")

    def by_name(self, name: str) -> AnnotatedFormula:
        for af in self.formulas:
            if af.name == name:
                return af
        raise KeyError(name)


# ---------------------------------------------------------------------------
# Lexing


@dataclass(frozen=True)
class _Lexeme:
    text: str
    line: int
    col: int


_MULTI_OPS = ("<=>", "=>", "!=")
_SINGLE_OPS = "()[],.:!?~&|=<>"
_WORD_RE = re.compile(r"[A-Za-z0-9_]+")


def _scan(text: str, strip_comments: bool) -> list[_Lexeme]:
    out: list[_Lexeme] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if strip_comments and ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = _WORD_RE.match(text, i)
        if m:
            word = m.group(0)
            out.append(_Lexeme(word, line, col))
            i = m.end()
            col += len(word)
            continue
        if ch == "'":
            j = text.find("'", i + 1)
            if j != -1:
                quoted = text[i : j + 1]
                out.append(_Lexeme(quoted, line, col))
                col += len(quoted)
                i = j + 1
                continue
        for op in _MULTI_OPS:
            if text.startswith(op, i):
                out.append(_Lexeme(op, line, col))
                i += len(op)
                col += len(op)
                break
        else:
            # single punctuation or an unknown byte, either way one token
            out.append(_Lexeme(ch, line, col))
            i += 1
            col += 1
    return out


def tokenize_tptp(text: str) -> list[str]:
    """Split TPTP text into tokens: words stay whole, punctuation splits.

    Total over arbitrary input; unknown bytes come out as single-character
    tokens.  Joining the result with single spaces yields the spaced
    one-token-per-word surface style used for tokenized proof corpora.
    """
    return [lx.text for lx in _scan(text, strip_comments=False)]


# ---------------------------------------------------------------------------
# Parsing


class _Parser:
    def __init__(self, lexemes: list[_Lexeme]):
        self.toks = lexemes
        self.pos = 0

    def _peek(self) -> str | None:
        return self.toks[self.pos].text if self.pos < len(self.toks) else None

    def _loc(self) -> tuple[int, int]:
        if self.pos < len(self.toks):
            lx = self.toks[self.pos]
            return lx.line, lx.col
        if self.toks:
            last = self.toks[-1]
            return last.line, last.col + len(last.text)
        return 1, 1

    def _error(self, message: str, expected: tuple[str, ...] = ()) -> TptpSyntaxError:
        line, col = self._loc()
        return TptpSyntaxError(message, line, col, expected)

    def _next(self, expected: tuple[str, ...] = ()) -> str:
        if self.pos >= len(self.toks):
            raise self._error("unexpected end of input", expected)
        tok = self.toks[self.pos]
        self.pos += 1
        return tok.text

    def _expect(self, token: str) -> None:
        got = self._peek()
        if got != token:
            raise self._error(f"got {got!r}", expected=(token,))
        self.pos += 1

    def parse_problem(self) -> Problem:
        formulas = []
        while self._peek() is not None:
            formulas.append(self._statement())
        return Problem(tuple(formulas))

    def _statement(self) -> AnnotatedFormula:
        kw = self._peek()
        if kw not in ("fof", "cnf"):
            raise self._error(f"got {kw!r}", expected=("fof", "cnf"))
        self.pos += 1
        self._expect("(")
        name = self._identifier("formula name")
        self._expect(",")
        role = self._peek()
        if role not in ROLES:
            raise self._error(f"unknown role {role!r}", expected=ROLES)
        self.pos += 1
        self._expect(",")
        formula = self._formula()
        if self._peek() == ",":
            self._skip_annotations()
        self._expect(")")
        self._expect(".")
        return AnnotatedFormula(name, role, formula)

    def _skip_annotations(self) -> None:
        # sources and useful-info are not used by any pipeline stage
        depth = 0
        while True:
            tok = self._peek()
            if tok is None:
                raise self._error("unexpected end of input inside annotations", (")",))
            if tok in ("(", "["):
                depth += 1
            elif tok == ")":
                if depth == 0:
                    return
                depth -= 1
            elif tok == "]":
                depth -= 1
            self.pos += 1

    def _identifier(self, what: str) -> str:
        tok = self._peek()
        if tok is None or not SYMBOL_RE.match(tok):
            raise self._error(f"{tok!r} is not a valid {what}", expected=(what,))
        self.pos += 1
        return tok

    def _formula(self) -> Formula:
        left = self._and_or()
        tok = self._peek()
        if tok in ("=>", "<=>"):
            self.pos += 1
            right = self._and_or()
            if self._peek() in ("=>", "<=>"):
                raise self._error(
                    f"{tok!r} is non-associative, parenthesize the right operand"
                )
            return Binary(tok, left, right)
        return left

    def _and_or(self) -> Formula:
        left = self._unit()
        conn = self._peek()
        if conn not in ("&", "|"):
            return left
        while self._peek() == conn:
            self.pos += 1
            right = self._unit()
            left = Binary(conn, left, right)
        other = "|" if conn == "&" else "&"
        if self._peek() == other:
            raise self._error(
                "mixing '&' and '|' requires parentheses", expected=(conn,)
            )
        return left

    def _unit(self) -> Formula:
        tok = self._peek()
        if tok is None:
            raise self._error("unexpected end of input", ("formula",))
        if tok == "~":
            self.pos += 1
            return Negation(self._unit())
        if tok in (FORALL, EXISTS):
            self.pos += 1
            self._expect("[")
            names = [self._variable_name()]
            while self._peek() == ",":
                self.pos += 1
                names.append(self._variable_name())
            self._expect("]")
            self._expect(":")
            body = self._unit()
            for name in reversed(names):
                body = Quantified(tok, name, body)
            return body
        if tok == "(":
            self.pos += 1
            inner = self._formula()
            self._expect(")")
            return inner
        return self._atomic()

    def _variable_name(self) -> str:
        tok = self._peek()
        if tok is None or not VARIABLE_RE.match(tok):
            raise self._error(f"{tok!r} is not a valid variable", expected=("variable",))
        self.pos += 1
        return tok

    def _atomic(self) -> Formula:
        term = self._term()
        tok = self._peek()
        if tok in ("=", "!="):
            self.pos += 1
            right = self._term()
            return Equality(term, right, negated=(tok == "!="))
        if isinstance(term, Var):
            raise self._error(
                f"variable {term.name!r} cannot stand alone as a formula",
                expected=("predicate", "=", "!="),
            )
        return Atom(term.symbol, term.args)

    def _term(self) -> Term:
        tok = self._peek()
        if tok is None:
            raise self._error("unexpected end of input", ("term",))
        if VARIABLE_RE.match(tok):
            self.pos += 1
            return Var(tok)
        if not SYMBOL_RE.match(tok):
            raise self._error(f"{tok!r} is not a term", expected=("term",))
        self.pos += 1
        args: list[Term] = []
        if self._peek() == "(":
            self.pos += 1
            args.append(self._term())
            while self._peek() == ",":
                self.pos += 1
                args.append(self._term())
            self._expect(")")
        return App(tok, tuple(args))


def parse_problem(text: str) -> Problem:
    """Parse a sequence of ``fof``/``cnf`` statements into a Problem.

    Whitespace is insignificant, so the spaced tokenized style parses the
    same as compact text.  ``%`` line comments are skipped.  Well-formedness
    beyond the grammar (unique names, single conjecture) is checked by
    :meth:`Problem.validate`, not here: derivation listings legitimately
    repeat axiom names.
    """
    return _Parser(_scan(text, strip_comments=True)).parse_problem()


def parse_formula(text: str) -> Formula:
    """Parse a bare formula (no ``fof`` wrapper)."""
    parser = _Parser(_scan(text, strip_comments=True))
    formula = parser._formula()
    if parser._peek() is not None:
        raise parser._error(f"trailing input {parser._peek()!r}")
    return formula


# ---------------------------------------------------------------------------
# Printing


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.symbol
    return f"{t.symbol}({','.join(print_term(a) for a in t.args)})"


def print_formula(f: Formula) -> str:
    # binaries carry their own parentheses, so every operand position that
    # needs a unit formula can take print_formula output directly
    if isinstance(f, Quantified):
        return f"{f.kind} [{f.variable}] : {print_formula(f.body)}"
    if isinstance(f, Binary):
        return f"( {print_formula(f.left)} {f.connective} {print_formula(f.right)} )"
    if isinstance(f, Negation):
        return f"~ {print_formula(f.body)}"
    if isinstance(f, Equality):
        op = "!=" if f.negated else "="
        return f"{print_term(f.left)} {op} {print_term(f.right)}"
    if isinstance(f, Atom):
        return print_term(App(f.predicate, f.args))
    raise TypeError(f"not a formula: {f!r}")


def print_annotated(af: AnnotatedFormula) -> str:
    return f"fof({af.name}, {af.role}, {print_formula(af.formula)})."


def print_problem(problem: Problem) -> str:
    """Emit one ``fof`` statement per line; reparses to an identical Problem."""
    return "".join(print_annotated(af) + "\n" for af in problem.formulas)


# ---------------------------------------------------------------------------
# Alpha-equivalence


def free_variables(f: Formula) -> set[str]:
    free: set[str] = set()

    def walk_term(t: Term, bound: frozenset[str]) -> None:
        if isinstance(t, Var):
            if t.name not in bound:
                free.add(t.name)
        else:
            for a in t.args:
                walk_term(a, bound)

    def walk(g: Formula, bound: frozenset[str]) -> None:
        if isinstance(g, Quantified):
            walk(g.body, bound | {g.variable})
        elif isinstance(g, Binary):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, Negation):
            walk(g.body, bound)
        elif isinstance(g, Equality):
            walk_term(g.left, bound)
            walk_term(g.right, bound)
        else:
            for a in g.args:
                walk_term(a, bound)

    walk(f, frozenset())
    return free


def is_closed(f: Formula) -> bool:
    return not free_variables(f)


def alpha_key(f: Formula) -> tuple:
    """A hashable key identical for alpha-equivalent closed formulas.

    Bound variables become de Bruijn levels (outermost binder is 0) and a
    negated equality is keyed as the negation of the plain equality, so the
    two spellings of disequality coincide.  Raises OpenFormula on a free
    variable.
    """

    def term_key(t: Term, env: dict[str, int]) -> tuple:
        if isinstance(t, Var):
            if t.name not in env:
                raise OpenFormula(f"free variable {t.name}")
            return ("b", env[t.name])
        return ("a", t.symbol, tuple(term_key(a, env) for a in t.args))

    def walk(g: Formula, env: dict[str, int]) -> tuple:
        if isinstance(g, Quantified):
            inner = dict(env)
            inner[g.variable] = len(env)
            return (g.kind, walk(g.body, inner))
        if isinstance(g, Binary):
            return (g.connective, walk(g.left, env), walk(g.right, env))
        if isinstance(g, Negation):
            return ("~", walk(g.body, env))
        if isinstance(g, Equality):
            key = ("=", term_key(g.left, env), term_key(g.right, env))
            return ("~", key) if g.negated else key
        return ("p", g.predicate, tuple(term_key(a, env) for a in g.args))

    return walk(f, {})


def alpha_equal(a: Formula, b: Formula) -> bool:
    """True iff the closed formulas agree up to bound-variable renaming."""
    return alpha_key(a) == alpha_key(b)
