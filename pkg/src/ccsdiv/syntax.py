"""Process expressions of basic CCS with recursion.

Grammar (concrete syntax)::

    expr   := prefix { "+" prefix }
    prefix := { act "." } atom
    atom   := "0" | VAR | "rec" VAR "." expr | "(" expr ")"
    act    := "tau" | IDENT_LOWER

Actions are lowercase identifiers, recursion variables uppercase ones, so a
transition label can be a plain string: ``"tau"``, an action name, or (in the
extended transition system) a variable name.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

TAU = "tau"
KEYWORDS = frozenset({"tau", "rec"})

_ACTION_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")
_VAR_RE = re.compile(r"[A-Z][a-zA-Z0-9_]*\Z")


def is_action(name: str) -> bool:
    return name == TAU or (bool(_ACTION_RE.match(name)) and name not in KEYWORDS)


def is_var_name(name: str) -> bool:
    return bool(_VAR_RE.match(name))


def is_var_label(label: str) -> bool:
    """True for the variable labels X of the extended transition system."""
    return label[:1].isupper()


class Expr:
    """Base class of the immutable expression tree."""

    __slots__ = ()
    fv: frozenset

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True, eq=True)
class Nil(Expr):
    fv: frozenset = field(default=frozenset(), init=False, repr=False, compare=False)

    def __hash__(self) -> int:
        return 0x5EED


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str
    fv: frozenset = field(init=False, repr=False, compare=False)
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", frozenset((self.name,)))
        object.__setattr__(self, "_h", hash(("V", self.name)))

    def __hash__(self) -> int:
        return self._h


@dataclass(frozen=True, eq=True)
class Prefix(Expr):
    action: str
    body: Expr
    fv: frozenset = field(init=False, repr=False, compare=False)
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", self.body.fv)
        object.__setattr__(self, "_h", hash(("P", self.action, self.body)))

    def __hash__(self) -> int:
        return self._h


@dataclass(frozen=True, eq=True)
class Choice(Expr):
    left: Expr
    right: Expr
    fv: frozenset = field(init=False, repr=False, compare=False)
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", self.left.fv | self.right.fv)
        object.__setattr__(self, "_h", hash(("C", self.left, self.right)))

    def __hash__(self) -> int:
        return self._h


@dataclass(frozen=True, eq=True)
class Rec(Expr):
    var: str
    body: Expr
    fv: frozenset = field(init=False, repr=False, compare=False)
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", self.body.fv - {self.var})
        object.__setattr__(self, "_h", hash(("R", self.var, self.body)))

    def __hash__(self) -> int:
        return self._h


NIL = Nil()


def prefix_chain(action: str, n: int, tail: Expr = NIL) -> Expr:
    """``action^n`` followed by ``tail``: a.a.....a.tail."""
    e = tail
    for _ in range(n):
        e = Prefix(action, e)
    return e


def choice_of(parts: Sequence[Expr]) -> Expr:
    """Left-associated sum; the empty sum is 0."""
    if not parts:
        return NIL
    e = parts[0]
    for p in parts[1:]:
        e = Choice(e, p)
    return e


# --------------------------------------------------------------------------
# static predicates


def free_vars(e: Expr) -> frozenset:
    return e.fv


def is_closed(e: Expr) -> bool:
    return not e.fv


def is_x_closed(e: Expr, var: str = "X") -> bool:
    return e.fv <= {var}


def exposed(var: str, e: Expr) -> bool:
    """Whether ``var`` occurs free and unguarded in ``e``."""
    if isinstance(e, Var):
        return e.name == var
    if isinstance(e, Rec):
        return e.var != var and exposed(var, e.body)
    if isinstance(e, Choice):
        return exposed(var, e.left) or exposed(var, e.right)
    return False


def all_vars(e: Expr) -> set:
    """Every variable name occurring in ``e``, bound or free."""
    out = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.add(x.name)
        elif isinstance(x, Rec):
            out.add(x.var)
            stack.append(x.body)
        elif isinstance(x, Prefix):
            stack.append(x.body)
        elif isinstance(x, Choice):
            stack.append(x.left)
            stack.append(x.right)
    return out


def size(e: Expr) -> int:
    if isinstance(e, (Prefix, Rec)):
        return 1 + size(e.body)
    if isinstance(e, Choice):
        return 1 + size(e.left) + size(e.right)
    return 1


# --------------------------------------------------------------------------
# canonical naming

_LETTERS = "XYZWVUTSRQPONMLKJIHGFEDCBA"


def _binder_names() -> Iterator[str]:
    yield from _LETTERS
    for i in itertools.count(1):
        for c in _LETTERS:
            yield f"{c}{i}"


def binder_names(avoid: Iterable[str]) -> Iterator[str]:
    avoid = set(avoid)
    return (n for n in _binder_names() if n not in avoid)


@lru_cache(maxsize=1 << 16)
def canonical(e: Expr) -> Expr:
    """Rename every binder by its nesting depth, skipping the free variables.

    Two expressions are alpha-equivalent iff their canonical forms are equal.
    """
    names: list[str] = []
    gen = binder_names(e.fv)

    def name_at(depth: int) -> str:
        while len(names) <= depth:
            names.append(next(gen))
        return names[depth]

    def go(x: Expr, env: Mapping[str, str], depth: int) -> Expr:
        if isinstance(x, Var):
            new = env.get(x.name)
            return x if new is None or new == x.name else Var(new)
        if isinstance(x, Prefix):
            b = go(x.body, env, depth)
            return x if b is x.body else Prefix(x.action, b)
        if isinstance(x, Choice):
            l, r = go(x.left, env, depth), go(x.right, env, depth)
            return x if (l is x.left and r is x.right) else Choice(l, r)
        if isinstance(x, Rec):
            new = name_at(depth)
            b = go(x.body, {**env, x.var: new}, depth + 1)
            return x if (new == x.var and b is x.body) else Rec(new, b)
        return x

    return go(e, {}, 0)


def alpha_equivalent(e: Expr, f: Expr) -> bool:
    return canonical(e) == canonical(f)


# --------------------------------------------------------------------------
# substitution


def _subst(e: Expr, m: Mapping[str, Expr]) -> Expr:
    if not (e.fv & m.keys()):
        return e
    if isinstance(e, Var):
        return m[e.name]
    if isinstance(e, Prefix):
        return Prefix(e.action, _subst(e.body, m))
    if isinstance(e, Choice):
        return Choice(_subst(e.left, m), _subst(e.right, m))
    if isinstance(e, Rec):
        m = {k: v for k, v in m.items() if k != e.var and k in e.body.fv}
        if not m:
            return e
        incoming = set().union(*(v.fv for v in m.values()))
        if e.var not in incoming:
            return Rec(e.var, _subst(e.body, m))
        fresh = next(binder_names(all_vars(e.body) | incoming | m.keys()))
        body = _subst(e.body, {e.var: Var(fresh)})
        return Rec(fresh, _subst(body, m))
    return e


def substitute(e: Expr, subs) -> Expr:
    """Simultaneous capture-avoiding substitution; the result is canonical.

    ``subs`` is a sequence of ``(var, expr)`` pairs or a mapping.
    """
    m = dict(subs.items() if isinstance(subs, Mapping) else subs)
    return canonical(_subst(e, m))


def unfold(e: Rec) -> Expr:
    """``body[rec X.body / X]``."""
    return substitute(e.body, {e.var: e})


# --------------------------------------------------------------------------
# printing


def pretty(e: Expr) -> str:
    return _pretty(e, True)


def _pretty(e: Expr, tail: bool) -> str:
    # tail: nothing follows e inside its enclosing parentheses, so a trailing
    # rec body may extend to the right unparenthesized
    if isinstance(e, Nil):
        return "0"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Prefix):
        b = e.body
        if isinstance(b, Choice):
            inner = f"({_pretty(b, True)})"
        else:
            inner = _pretty(b, tail)
        return f"{e.action}.{inner}"
    if isinstance(e, Choice):
        left = _pretty(e.left, False)
        if isinstance(e.right, Choice):
            right = f"({_pretty(e.right, True)})"
        else:
            right = _pretty(e.right, tail)
        return f"{left} + {right}"
    if isinstance(e, Rec):
        s = f"rec {e.var}. {_pretty(e.body, True)}"
        return s if tail else f"({s})"
    raise TypeError(f"not an expression: {e!r}")


# --------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<num>[0-9]+)|(?P<sym>[+.()])|(?P<bad>\S))")


def _tokenize(text: str):
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def where(pos: int):
        line = max(i for i, s in enumerate(line_starts) if s <= pos)
        return line + 1, pos - line_starts[line] + 1

    toks = []
    pos = 0
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.lastgroup is None:
            break
        start = m.start(m.lastgroup)
        val = m.group(m.lastgroup)
        if m.lastgroup == "bad" or (m.lastgroup == "num" and val != "0"):
            raise ParseError(f"unexpected character {val!r}", *where(start))
        toks.append((val, start))
        pos = m.end()
    toks.append(("", len(text)))
    return toks, where


class _Parser:
    def __init__(self, text: str):
        self.toks, self.where = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def fail(self, msg: str):
        raise ParseError(msg, *self.where(self.toks[self.i][1]))

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if expected is not None and tok != expected:
            self.fail(f"expected {expected!r}, found {tok or 'end of input'!r}")
        if tok == "":
            self.fail("unexpected end of input")
        self.i += 1
        return tok

    def expr(self) -> Expr:
        e = self.prefix()
        while self.peek() == "+":
            self.take()
            e = Choice(e, self.prefix())
        return e

    def prefix(self) -> Expr:
        tok = self.peek()
        if tok == TAU or (_ACTION_RE.match(tok) and tok not in KEYWORDS):
            self.take()
            self.take(".")
            return Prefix(tok, self.prefix())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.peek()
        if tok == "0":
            self.take()
            return NIL
        if tok == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if tok == "rec":
            self.take()
            var = self.peek()
            if not _VAR_RE.match(var):
                self.fail(f"expected a variable after 'rec', found {var or 'end of input'!r}")
            self.take()
            self.take(".")
            return Rec(var, self.expr())
        if tok and _VAR_RE.match(tok):
            self.take()
            return Var(tok)
        self.fail(f"unexpected token {tok or 'end of input'!r}")


def parse(text: str) -> Expr:
    """Parse and canonicalize a process expression."""
    p = _Parser(text)
    e = p.expr()
    if p.peek() != "":
        p.fail(f"unexpected token {p.peek()!r}")
    return canonical(e)
