"""Punctuation-free prefix encoding of first-order formulas.

A formula is linearized in pre-order: logical operators become ``c!``,
``c?``, ``c&``, ``c|``, ``c=>``, ``c<=>``, ``c~``, ``c=``; a predicate or
function symbol ``s`` becomes ``c<s>`` followed by its arity-many encoded
arguments; a bound variable becomes ``b<k>`` where ``k`` is the de Bruijn
LEVEL of its binder (outermost binder is 0).  A quantifier token is followed
by the ``b`` token of the variable it introduces, then the body.  Negated
equality is spelled ``c~ c= ...``.

Because every symbol has a fixed arity, the stream is decodable without any
punctuation, and no proper prefix of a valid stream is itself valid.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import tptp
from .tptp import App, Atom, Binary, Equality, Formula, Negation, Problem, Quantified, Term, Var

FUNCTION = "function"
PREDICATE = "predicate"

LOGICAL_TOKENS = ("c!", "c?", "c&", "c|", "c=>", "c<=>", "c~", "c=")

_VAR_TOKEN_RE = re.compile(r"b([0-9]+)\Z")
_CONST_TOKEN_RE = re.compile(r"c(.+)\Z")


class PrefixError(ValueError):
    """Base class for encoding/decoding failures."""


class ArityConflict(PrefixError):
    def __init__(self, symbol: str, have: int, new: int):
        self.symbol, self.have, self.new = symbol, have, new
        super().__init__(f"symbol {symbol!r} used with arity {new}, registered with {have}")


class KindMismatch(PrefixError):
    def __init__(self, symbol: str, have: str, new: str):
        self.symbol, self.have, self.new = symbol, have, new
        super().__init__(f"symbol {symbol!r} used as {new}, registered as {have}")


class UnknownSymbol(PrefixError):
    def __init__(self, symbol: str):
        self.symbol = symbol
        super().__init__(f"symbol {symbol!r} not in signature")


class TruncatedStream(PrefixError):
    pass


class TrailingTokens(PrefixError):
    def __init__(self, at: int, tokens: list[str]):
        self.at = at
        super().__init__(f"formula complete at token {at}, {len(tokens) - at} tokens left")


class MalformedVariable(PrefixError):
    pass


class FrozenSignature(PrefixError):
    pass


class SignatureMap:
    """Symbol -> (kind, arity) table; logical tokens are never entries."""

    def __init__(self, entries: dict[str, tuple[str, int]] | None = None):
        self.entries: dict[str, tuple[str, int]] = dict(entries or {})
        self._frozen = False

    def register(self, symbol: str, kind: str, arity: int) -> None:
        if not tptp.SYMBOL_RE.match(symbol):
            raise ValueError(f"{symbol!r} is not a registrable symbol")
        if kind not in (FUNCTION, PREDICATE) or arity < 0:
            raise ValueError(f"bad signature entry {symbol!r}: {kind}/{arity}")
        have = self.entries.get(symbol)
        if have is not None:
            if have[0] != kind:
                raise KindMismatch(symbol, have[0], kind)
            if have[1] != arity:
                raise ArityConflict(symbol, have[1], arity)
            return
        if self._frozen:
            raise FrozenSignature(f"cannot add {symbol!r} to a frozen signature")
        self.entries[symbol] = (kind, arity)

    def freeze(self) -> "SignatureMap":
        self._frozen = True
        return self

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, SignatureMap) and self.entries == other.entries

    def dumps(self) -> str:
        """Sorted ``symbol kind arity`` lines, one per entry (diff-stable)."""
        return "".join(
            f"{sym} {kind} {arity}\n"
            for sym, (kind, arity) in sorted(self.entries.items())
        )

    @classmethod
    def loads(cls, text: str) -> "SignatureMap":
        sig = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[1] not in (FUNCTION, PREDICATE):
                raise ValueError(f"signature line {lineno}: bad entry {line!r}")
            sig.register(parts[0], parts[1], int(parts[2]))
        return sig

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "SignatureMap":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


# ---------------------------------------------------------------------------
# Encoding


def encode_formula(f: Formula, sig: SignatureMap) -> list[str]:
    """Pre-order prefix tokens of a closed formula, registering new symbols."""
    out: list[str] = []

    def term(t: Term, env: dict[str, int]) -> None:
        if isinstance(t, Var):
            if t.name not in env:
                raise tptp.OpenFormula(f"free variable {t.name}")
            out.append(f"b{env[t.name]}")
        else:
            sig.register(t.symbol, FUNCTION, len(t.args))
            out.append(f"c{t.symbol}")
            for a in t.args:
                term(a, env)

    def walk(g: Formula, env: dict[str, int]) -> None:
        if isinstance(g, Quantified):
            level = len(env)
            out.append("c" + g.kind)
            out.append(f"b{level}")
            inner = dict(env)
            inner[g.variable] = level
            walk(g.body, inner)
        elif isinstance(g, Binary):
            out.append("c" + g.connective)
            walk(g.left, env)
            walk(g.right, env)
        elif isinstance(g, Negation):
            out.append("c~")
            walk(g.body, env)
        elif isinstance(g, Equality):
            if g.negated:
                out.append("c~")
            out.append("c=")
            term(g.left, env)
            term(g.right, env)
        else:
            sig.register(g.predicate, PREDICATE, len(g.args))
            out.append("c" + g.predicate)
            for a in g.args:
                term(a, env)

    walk(f, {})
    return out


def encode_line(f: Formula, sig: SignatureMap) -> str:
    return " ".join(encode_formula(f, sig))


# ---------------------------------------------------------------------------
# Decoding


@dataclass
class _Cursor:
    tokens: list[str]
    pos: int = 0

    def next(self) -> str:
        if self.pos >= len(self.tokens):
            raise TruncatedStream(f"stream ends at token {self.pos}, tree incomplete")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok


def _var_name(level: int) -> str:
    return f"X{level}"


def decode_tokens(tokens: list[str], sig: SignatureMap) -> Formula:
    """Rebuild the formula tree from a prefix token stream.

    Inverse of :func:`encode_formula` up to bound-variable naming; fresh
    names ``X0, X1, ...`` are assigned by de Bruijn level.  ``c~ c= ...``
    decodes to a negated equality.

    Structural errors (truncation, trailing tokens, bad binder tokens) are
    reported where they occur; an out-of-range variable level is reported
    only once the tree shape is complete, so a stream that is both
    truncated and level-broken counts as truncated.
    """
    cur = _Cursor(list(tokens))
    level_violations: list[str] = []

    def formula(depth: int) -> Formula:
        tok = cur.next()
        if tok == "c!" or tok == "c?":
            binder = cur.next()
            m = _VAR_TOKEN_RE.match(binder)
            if not m:
                raise MalformedVariable(
                    f"quantifier must be followed by a variable token, got {binder!r}"
                )
            if int(m.group(1)) != depth:
                raise MalformedVariable(
                    f"binder token {binder!r} at depth {depth} must be b{depth}"
                )
            body = formula(depth + 1)
            return Quantified(tok[1:], _var_name(depth), body)
        if tok in ("c&", "c|", "c=>", "c<=>"):
            left = formula(depth)
            right = formula(depth)
            return Binary(tok[1:], left, right)
        if tok == "c~":
            if cur.pos < len(cur.tokens) and cur.tokens[cur.pos] == "c=":
                cur.pos += 1
                left = term(depth)
                right = term(depth)
                return Equality(left, right, negated=True)
            return Negation(formula(depth))
        if tok == "c=":
            left = term(depth)
            right = term(depth)
            return Equality(left, right)
        m = _VAR_TOKEN_RE.match(tok)
        if m:
            raise MalformedVariable(f"variable token {tok!r} in formula position")
        m = _CONST_TOKEN_RE.match(tok)
        if not m:
            raise MalformedVariable(f"not a prefix token: {tok!r}")
        symbol = m.group(1)
        entry = sig.entries.get(symbol)
        if entry is None:
            raise UnknownSymbol(symbol)
        kind, arity = entry
        if kind != PREDICATE:
            raise KindMismatch(symbol, kind, PREDICATE)
        args = tuple(term(depth) for _ in range(arity))
        return Atom(symbol, args)

    def term(depth: int) -> Term:
        tok = cur.next()
        m = _VAR_TOKEN_RE.match(tok)
        if m:
            level = int(m.group(1))
            if level >= depth:
                level_violations.append(
                    f"variable level {level} with only {depth} enclosing binders"
                )
            return Var(_var_name(level))
        if tok in LOGICAL_TOKENS:
            raise KindMismatch(tok, "logical", FUNCTION)
        m = _CONST_TOKEN_RE.match(tok)
        if not m:
            raise MalformedVariable(f"not a prefix token: {tok!r}")
        symbol = m.group(1)
        entry = sig.entries.get(symbol)
        if entry is None:
            raise UnknownSymbol(symbol)
        kind, arity = entry
        if kind != FUNCTION:
            raise KindMismatch(symbol, kind, FUNCTION)
        args = tuple(term(depth) for _ in range(arity))
        return App(symbol, args)

    result = formula(0)
    if cur.pos != len(cur.tokens):
        raise TrailingTokens(cur.pos, cur.tokens)
    if level_violations:
        raise MalformedVariable(level_violations[0])
    return result


def decode_line(line: str, sig: SignatureMap) -> Formula:
    return decode_tokens(line.split(), sig)


# ---------------------------------------------------------------------------
# Signature construction


def build_signature(problems: list[Problem]) -> SignatureMap:
    """Register every symbol of every formula with its observed kind/arity.

    The resulting map does not depend on input order (conflicts aside, the
    same set of entries is produced for any permutation).
    """
    sig = SignatureMap()
    for problem in problems:
        for af in problem.formulas:
            register_formula_symbols(af.formula, sig)
    return sig


def register_formula_symbols(f: Formula, sig: SignatureMap) -> None:
    def term(t: Term) -> None:
        if isinstance(t, App):
            sig.register(t.symbol, FUNCTION, len(t.args))
            for a in t.args:
                term(a)

    def walk(g: Formula) -> None:
        if isinstance(g, Quantified):
            walk(g.body)
        elif isinstance(g, Binary):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, Negation):
            walk(g.body)
        elif isinstance(g, Equality):
            term(g.left)
            term(g.right)
        else:
            sig.register(g.predicate, PREDICATE, len(g.args))
            for a in g.args:
                term(a)

    walk(f)
