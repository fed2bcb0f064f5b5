"""Rewrite an arbitrary equation into disjunctive intentional form.

Pipeline for ``s rel t``:

1. ``s = t`` becomes ``1 <= s^r t /\\ t^r s``; ``s <= t`` becomes ``1 <= s^r t``.
2. Inverses are pushed onto variables (anti-homomorphism, De Morgan,
   ``1^l = 1^r = 1``, ``x^(m)^l = x^(m+1)``, ``x^(m)^r = x^(m-1)``).
3. Meets are lifted to the top: ``1 <= q_1 /\\ ... /\\ q_k`` with meet-free ``q_i``.
4. When ``k > 1`` the conjuncts are renamed apart (``v0, v1, ...``).
5. The conjuncts are multiplied: ``1 <= q_1 ... q_k``.
6. Products are distributed over joins: ``1 <= w_1 \\/ ... \\/ w_n``.

Steps 2 and 6 are identities in every distributive l-pregroup; steps 3-5
only preserve validity of the inequality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from .term import (
    EQ,
    LE,
    Atom,
    IntentionalEquation,
    InvL,
    InvR,
    Join,
    Meet,
    Mul,
    One,
    Term,
    Var,
    as_atom,
    atom_term,
    variables,
    word_to_term,
)


@dataclass
class NormalizationTrace:
    """Rewrite log; ``source`` is the inequality term ``q`` of ``1 <= q``."""

    source: Term | None = None
    steps: list[tuple[str, Term, Term]] = field(default_factory=list)

    def add(self, rule: str, before: Term, after: Term) -> None:
        self.steps.append((rule, before, after))

    def replay(self) -> bool:
        """Re-apply every rule to its before-term and compare."""
        return all(RULES[name](before) == after for name, before, after in self.steps)


def equation_to_inequality(s: Term, rel: str, t: Term) -> Term:
    """The term ``q`` such that ``s rel t`` is equivalent to ``1 <= q``."""
    if rel == LE:
        return Mul(InvR(s), t)
    if rel == EQ:
        return Meet(Mul(InvR(s), t), Mul(InvR(t), s))
    raise ValueError(f"unknown relation {rel!r}")


def _mul(a: Term, b: Term) -> Term:
    if isinstance(a, One):
        return b
    if isinstance(b, One):
        return a
    return Mul(a, b)


@lru_cache(maxsize=None)
def _push(t: Term, k: int) -> Term:
    # t^(k) with all inverses on variables
    if isinstance(t, Var):
        return atom_term(t.name, k)
    if isinstance(t, One):
        return t
    if isinstance(t, InvL):
        return _push(t.arg, k + 1)
    if isinstance(t, InvR):
        return _push(t.arg, k - 1)
    odd = k % 2 == 1
    a, b = _push(t.left, k), _push(t.right, k)
    if isinstance(t, Mul):
        return _mul(b, a) if odd else _mul(a, b)
    if isinstance(t, Meet):
        return Join(a, b) if odd else Meet(a, b)
    return Meet(a, b) if odd else Join(a, b)


def push_inverses(q: Term) -> Term:
    """Push ``^l`` and ``^r`` down to the variables, cancelling ``x^(l r) = x``."""
    return _push(q, 0)


@lru_cache(maxsize=None)
def _meet_split(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Meet):
        return _meet_split(t.left) + _meet_split(t.right)
    if isinstance(t, Join):
        return tuple(Join(a, b) for a in _meet_split(t.left) for b in _meet_split(t.right))
    if isinstance(t, Mul):
        return tuple(_mul(a, b) for a in _meet_split(t.left) for b in _meet_split(t.right))
    return (t,)


def meet_conjuncts(t: Term) -> tuple[Term, ...]:
    """Meet-free ``q_1, ..., q_k`` with ``t = q_1 /\\ ... /\\ q_k`` (inverses already pushed)."""
    return _meet_split(t)


def _fold(cls, terms):
    t = terms[0]
    for s in terms[1:]:
        t = cls(t, s)
    return t


def _top_meets(t: Term) -> list[Term]:
    if isinstance(t, Meet):
        return _top_meets(t.left) + _top_meets(t.right)
    return [t]


def _rename(t: Term, mapping: dict[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(mapping[t.name])
    if isinstance(t, One):
        return t
    if isinstance(t, (InvL, InvR)):
        return type(t)(_rename(t.arg, mapping))
    return type(t)(_rename(t.left, mapping), _rename(t.right, mapping))


def _renamings(conjuncts: Sequence[Term]) -> list[dict[str, str]]:
    if len(conjuncts) <= 1:
        return [{n: n for n in variables(q)} for q in conjuncts]
    out = []
    counter = 0
    for q in conjuncts:
        mapping = {}
        for name in variables(q):
            mapping[name] = f"v{counter}"
            counter += 1
        out.append(mapping)
    return out


def rename_apart(conjuncts: list[Term]) -> list[Term]:
    """Give each conjunct its own variables ``v0, v1, ...`` (no-op for a single conjunct)."""
    if len(conjuncts) <= 1:
        return list(conjuncts)
    return [_rename(q, m) for q, m in zip(conjuncts, _renamings(conjuncts))]


@lru_cache(maxsize=None)
def _join_split(t: Term) -> tuple[tuple[tuple[str, int], ...], ...]:
    if isinstance(t, One):
        return ((),)
    if isinstance(t, Join):
        return _join_split(t.left) + _join_split(t.right)
    if isinstance(t, Mul):
        return tuple(a + b for a in _join_split(t.left) for b in _join_split(t.right))
    atom = as_atom(t)
    if atom is None:
        raise ValueError(f"unexpected node {type(t).__name__} in a meet-free term")
    return ((atom,),)


def _dedupe(seq):
    return tuple(dict.fromkeys(seq))


def _word_terms(words) -> Term:
    terms = [_fold(Mul, [atom_term(n, m) for n, m in w]) if w else One() for w in words]
    return _fold(Join, terms)


# rule name -> function on terms; used to replay traces
RULES: dict[str, Callable[[Term], Term]] = {
    "push_inverses": push_inverses,
    "meet_to_top": lambda t: _fold(Meet, list(meet_conjuncts(t))),
    "rename_apart": lambda t: _fold(Meet, rename_apart(_top_meets(t))),
    "concatenate": lambda t: _fold(_mul, _top_meets(t)),
    "distribute_join": lambda t: _word_terms(_dedupe(_join_split(t))),
}


def to_intentional(s: Term, rel: str, t: Term) -> tuple[IntentionalEquation, NormalizationTrace]:
    trace = NormalizationTrace()
    q = equation_to_inequality(s, rel, t)
    trace.source = q

    pushed = push_inverses(q)
    trace.add("push_inverses", q, pushed)

    conjuncts = list(meet_conjuncts(pushed))
    met = _fold(Meet, conjuncts)
    trace.add("meet_to_top", pushed, met)

    renamed = rename_apart(conjuncts)
    met_renamed = _fold(Meet, renamed)
    trace.add("rename_apart", met, met_renamed)

    product = _fold(_mul, renamed)
    trace.add("concatenate", met_renamed, product)

    raw_words = _dedupe(_join_split(product))
    trace.add("distribute_join", product, _word_terms(raw_words))

    names: dict[str, int] = {}
    for w in raw_words:
        for name, _ in w:
            names.setdefault(name, len(names))
    words = tuple(tuple(Atom(names[n], m) for n, m in w) for w in raw_words)
    return IntentionalEquation(words, tuple(names)), trace


def intentional_as_equation(eps: IntentionalEquation) -> tuple[Term, str, Term]:
    """``1 <= w_1 \\/ ... \\/ w_k`` as an ordinary ``(s, rel, t)`` triple."""
    return One(), LE, _fold(Join, [word_to_term(w, eps.names) for w in eps.words])



def conjunct_renamings(s: Term, rel: str, t: Term) -> list[dict[str, str]]:
    """Per meet-conjunct maps from original variable names to the names used
    in the intentional form (a single conjunct keeps its names)."""
    return _renamings(meet_conjuncts(push_inverses(equation_to_inequality(s, rel, t))))
