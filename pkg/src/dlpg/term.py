"""Term languages for lattice-ordered pregroups.

Three layers live here:

* ``Term``: the full signature (product, unit, meet, join, left and right
  inverse), as produced by the parser.
* intentional words: flat tuples of :class:`Atom` ``x_i^(m)``; the empty
  tuple is the unit.
* extended words: intentional words that may also contain the successor
  and predecessor letters :data:`PLUS` and :data:`MINUS`.

Words are plain tuples so that concatenation is ``+`` and equality is
sequence equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union


class ParseError(ValueError):
    """Raised on malformed concrete syntax; ``pos`` is a 0-based offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


# ---------------------------------------------------------------------------
# Term AST


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Meet:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Join:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class InvL:
    arg: "Term"


@dataclass(frozen=True)
class InvR:
    arg: "Term"


Term = Union[Var, One, Mul, Meet, Join, InvL, InvR]

LE = "<="
EQ = "="


def variables(t: Term) -> list[str]:
    """Variable names of ``t`` in order of first occurrence (left to right)."""
    seen: dict[str, None] = {}
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            seen.setdefault(s.name)
        elif isinstance(s, (Mul, Meet, Join)):
            stack.append(s.right)
            stack.append(s.left)
        elif isinstance(s, (InvL, InvR)):
            stack.append(s.arg)
    return list(seen)


def atom_term(name: str, order: int) -> Term:
    """``x^(order)`` as stacked inverses on a variable."""
    t: Term = Var(name)
    for _ in range(abs(order)):
        t = InvL(t) if order > 0 else InvR(t)
    return t


def as_atom(t: Term) -> tuple[str, int] | None:
    """Inverse of :func:`atom_term`; ``None`` if ``t`` is not an inverse stack on a variable."""
    order = 0
    while isinstance(t, (InvL, InvR)):
        order += 1 if isinstance(t, InvL) else -1
        t = t.arg
    if isinstance(t, Var):
        return t.name, order
    return None


def term_size(t: Term) -> int:
    if isinstance(t, (Var, One)):
        return 1
    if isinstance(t, (InvL, InvR)):
        return 1 + term_size(t.arg)
    return 1 + term_size(t.left) + term_size(t.right)


# ---------------------------------------------------------------------------
# Concrete syntax

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<pow>\^\(\s*(?P<exp>[+-]?\d+)\s*\))
  | (?P<invl>\^(?:l|ℓ)(?![A-Za-z0-9_]))
  | (?P<invr>\^r(?![A-Za-z0-9_]))
  | (?P<meet>/\\|∧)
  | (?P<join>\\/|∨)
  | (?P<mul>\*|·)
  | (?P<le><=|≤)
  | (?P<eq>=)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<num>\d+)
  | (?P<plus>\+)
  | (?P<minus>-)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unknown operator {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "exp":  # inner group of pow
            kind = "pow"
        if kind != "ws":
            value = m.group("exp") if kind == "pow" else m.group(0)
            if kind == "num" and value != "1":
                raise ParseError(f"unexpected number {value!r}", pos)
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, kind: str | None = None) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {kind}, found {what}", tok[2])
        self.i += 1
        return tok

    def term(self) -> Term:
        t = self.meet()
        while self.peek()[0] == "join":
            self.take()
            t = Join(t, self.meet())
        return t

    def meet(self) -> Term:
        t = self.prod()
        while self.peek()[0] == "meet":
            self.take()
            t = Meet(t, self.prod())
        return t

    def prod(self) -> Term:
        t = self.inv()
        while True:
            kind = self.peek()[0]
            if kind == "mul":
                self.take()
            elif kind not in ("num", "ident", "lpar"):
                return t
            t = Mul(t, self.inv())

    def inv(self) -> Term:
        t = self.base()
        while True:
            kind, value, _ = self.peek()
            if kind == "invl":
                t = InvL(t)
            elif kind == "invr":
                t = InvR(t)
            elif kind == "pow":
                m = int(value)
                for _ in range(abs(m)):
                    t = InvL(t) if m > 0 else InvR(t)
            else:
                return t
            self.take()

    def base(self) -> Term:
        kind, value, pos = self.peek()
        if kind == "num":
            self.take()
            return One()
        if kind == "ident":
            self.take()
            return Var(value)
        if kind == "lpar":
            self.take()
            t = self.term()
            self.take("rpar")
            return t
        what = "end of input" if kind == "eof" else repr(value)
        raise ParseError(f"unexpected {what}", pos)


def parse_term(text: str) -> Term:
    """Parse a term. ``^l``/``^r`` bind tightest, then products, then ``/\\``, then ``\\/``."""
    p = _Parser(text)
    t = p.term()
    p.take("eof")
    return t


def parse_equation(text: str) -> tuple[Term, str, Term]:
    """Parse ``s = t`` or ``s <= t`` into ``(s, relation, t)``."""
    p = _Parser(text)
    s = p.term()
    kind, _, pos = p.peek()
    if kind not in ("le", "eq"):
        raise ParseError("missing relator '=' or '<='", pos)
    p.take()
    t = p.term()
    p.take("eof")
    return s, (LE if kind == "le" else EQ), t


_PREC = {Join: 1, Meet: 2, Mul: 3}


def _prec(t: Term) -> int:
    return _PREC.get(type(t), 4)


def print_term(t: Term) -> str:
    """ASCII rendering that :func:`parse_term` reads back to the same tree."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, One):
        return "1"
    if isinstance(t, (InvL, InvR)):
        inner = print_term(t.arg)
        if _prec(t.arg) < 4:
            inner = f"({inner})"
        return inner + ("^l" if isinstance(t, InvL) else "^r")
    p = _prec(t)
    op = {Join: " \\/ ", Meet: " /\\ ", Mul: " "}[type(t)]
    left = print_term(t.left)
    right = print_term(t.right)
    if _prec(t.left) < p:
        left = f"({left})"
    if _prec(t.right) <= p:
        right = f"({right})"
    return left + op + right


def print_equation(s: Term, rel: str, t: Term) -> str:
    return f"{print_term(s)} {rel} {print_term(t)}"


# ---------------------------------------------------------------------------
# Words


class Atom(NamedTuple):
    """The letter ``x_var^(order)``: ``order`` > 0 iterates ^l, < 0 iterates ^r."""

    var: int
    order: int = 0


PLUS = "+"
MINUS = "-"

Letter = Union[Atom, str]
Word = tuple  # tuple[Letter, ...]; intentional words contain Atoms only


def letter_key(c: Letter) -> tuple[int, int, int]:
    if c == MINUS:
        return (0, 0, 0)
    if c == PLUS:
        return (1, 0, 0)
    return (2, c.var, c.order)


def word_key(w: Word) -> tuple:
    """Insertion order used everywhere: shorter words first, then letterwise."""
    return (len(w), tuple(letter_key(c) for c in w))


def print_letter(c: Letter, names: Sequence[str]) -> str:
    if c == PLUS or c == MINUS:
        return c
    name = names[c.var]
    return name if c.order == 0 else f"{name}^({c.order})"


def print_word(w: Word, names: Sequence[str]) -> str:
    """E.g. ``x^(1) x`` or ``- x^(1) x``; the empty word prints as ``1``."""
    if not w:
        return "1"
    return " ".join(print_letter(c, names) for c in w)


_WORD_TOKEN = re.compile(r"\s*(?:(?P<sign>[+-])|(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?:\^\(\s*(?P<exp>[+-]?\d+)\s*\))?)")


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Read back :func:`print_word` output over a known variable table."""
    if text.strip() == "1":
        return ()
    index = {n: i for i, n in enumerate(names)}
    letters: list[Letter] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _WORD_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"bad word letter {text[pos:pos + 1]!r}", pos)
        if m.group("sign"):
            letters.append(m.group("sign"))
        else:
            name = m.group("name")
            if name not in index:
                raise ParseError(f"unknown variable {name!r}", m.start("name"))
            letters.append(Atom(index[name], int(m.group("exp") or 0)))
        pos = m.end()
    return tuple(letters)


def word_to_term(w: Word, names: Sequence[str]) -> Term:
    """An intentional word as a product term (right-nested is irrelevant: products are associative)."""
    if not w:
        return One()
    terms = []
    for c in w:
        if not isinstance(c, Atom):
            raise ValueError("successor/predecessor letters have no term counterpart")
        terms.append(atom_term(names[c.var], c.order))
    t = terms[0]
    for s in terms[1:]:
        t = Mul(t, s)
    return t


@dataclass(frozen=True)
class IntentionalEquation:
    """``1 <= w_1 \\/ ... \\/ w_k`` over variables ``names``."""

    words: tuple[Word, ...]
    names: tuple[str, ...]

    def __post_init__(self):
        if not self.words:
            raise ValueError("an intentional equation needs at least one word")
        for w in self.words:
            for c in w:
                if not isinstance(c, Atom) or not 0 <= c.var < len(self.names):
                    raise ValueError(f"bad letter {c!r} in intentional word")

    @property
    def nvars(self) -> int:
        return len(self.names)

    def length(self) -> int:
        """Symbol count of ``1 <= w_1 \\/ ... \\/ w_k``: ``1``, ``<=``, each
        variable occurrence, each inverse mark, and each join."""
        n = 2 + len(self.words) - 1
        for w in self.words:
            n += sum(1 + abs(a.order) for a in w)
        return n

    def __str__(self) -> str:
        return "1 <= " + " \\/ ".join(print_word(w, self.names) for w in self.words)

    def to_json(self) -> dict:
        return {"vars": list(self.names), "words": [print_word(w, self.names) for w in self.words]}

    @classmethod
    def from_json(cls, data: dict) -> "IntentionalEquation":
        names = tuple(data["vars"])
        return cls(tuple(parse_word(w, names) for w in data["words"]), names)
