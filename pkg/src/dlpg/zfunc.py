"""Finite-support order-preserving maps on the integers.

Every monotone ``f: Z -> Z`` that is the identity outside a finite window
is residuated and dually residuated, and so are its residuals; these maps
form the l-pregroup used to realize counterexamples concretely.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .diagram import CChain, Diagram, PartialFn, iterate
from .term import (
    EQ,
    LE,
    InvL,
    InvR,
    IntentionalEquation,
    Join,
    Meet,
    Mul,
    One,
    Term,
    Var,
    Word,
    variables,
)


@dataclass(frozen=True)
class FzFunc:
    """``f(n) = vals[n - lo]`` on ``lo..hi`` and ``f(n) = n`` elsewhere.

    Instances are trimmed on construction (identity points at either end of
    the window are dropped), so ``==`` is functional equality.
    """

    lo: int
    hi: int
    vals: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.vals)
        lo, hi = int(self.lo), int(self.hi)
        if len(vals) != hi - lo + 1:
            raise ValueError("window and value count disagree")
        if any(x > y for x, y in zip(vals, vals[1:])):
            raise ValueError("values must be nondecreasing")
        if vals and (vals[0] < lo - 1 or vals[-1] > hi + 1):
            raise ValueError("values break monotonicity at the window boundary")
        start, stop = 0, len(vals)
        while start < stop and vals[start] == lo + start:
            start += 1
        while stop > start and vals[stop - 1] == lo + stop - 1:
            stop -= 1
        if start == stop:
            lo, hi, vals = 0, -1, ()
        else:
            lo, hi, vals = lo + start, lo + stop - 1, vals[start:stop]
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "vals", vals)

    @classmethod
    def identity(cls) -> "FzFunc":
        return cls(0, -1, ())

    @classmethod
    def from_points(cls, lo: int, vals: Sequence[int]) -> "FzFunc":
        return cls(lo, lo + len(vals) - 1, tuple(vals))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> "FzFunc":
        """Identity except on the keys of ``mapping``."""
        if not mapping:
            return cls.identity()
        lo, hi = min(mapping), max(mapping)
        return cls(lo, hi, tuple(mapping.get(n, n) for n in range(lo, hi + 1)))

    def is_identity(self) -> bool:
        return not self.vals

    def __call__(self, n: int) -> int:
        if self.lo <= n <= self.hi:
            return self.vals[n - self.lo]
        return n

    def table(self, lo: int, hi: int) -> list[int]:
        return [self(n) for n in range(lo, hi + 1)]

    def to_json(self, name: str) -> dict:
        return {"name": name, "lo": self.lo, "hi": self.hi, "vals": list(self.vals)}

    @classmethod
    def from_json(cls, data: dict) -> "FzFunc":
        return cls(int(data["lo"]), int(data["hi"]), tuple(data["vals"]))


Valuation = Mapping[str, FzFunc]


def _hull(*fs: FzFunc) -> tuple[int, int] | None:
    supports = [(f.lo, f.hi) for f in fs if not f.is_identity()]
    if not supports:
        return None
    return min(a for a, _ in supports), max(b for _, b in supports)


def _tabulate(fn, window) -> FzFunc:
    if window is None:
        return FzFunc.identity()
    lo, hi = window
    return FzFunc(lo, hi, tuple(fn(n) for n in range(lo, hi + 1)))


def compose(f: FzFunc, g: FzFunc) -> FzFunc:
    """``f . g``, i.e. ``n -> f(g(n))``."""
    return _tabulate(lambda n: f(g(n)), _hull(f, g))


def meet(f: FzFunc, g: FzFunc) -> FzFunc:
    return _tabulate(lambda n: min(f(n), g(n)), _hull(f, g))


def join(f: FzFunc, g: FzFunc) -> FzFunc:
    return _tabulate(lambda n: max(f(n), g(n)), _hull(f, g))


def _extended(f: FzFunc) -> tuple[list[int], list[int]]:
    points = list(range(f.lo - 1, f.hi + 2))
    return points, [f(n) for n in points]


def residual(f: FzFunc) -> FzFunc:
    """``f^r(b) = max{a : f(a) <= b}``."""
    if f.is_identity():
        return f
    points, values = _extended(f)
    return FzFunc(points[0], points[-1], tuple(points[bisect_right(values, b) - 1] for b in points))


def dual_residual(f: FzFunc) -> FzFunc:
    """``f^l(a) = min{b : a <= f(b)}``."""
    if f.is_identity():
        return f
    points, values = _extended(f)
    return FzFunc(points[0], points[-1], tuple(points[bisect_left(values, a)] for a in points))


def iterate_inverse(f: FzFunc, m: int) -> FzFunc:
    """``f^(m)``: ``m``-fold ``^l`` for positive ``m``, ``|m|``-fold ``^r`` for negative."""
    step = dual_residual if m > 0 else residual
    for _ in range(abs(m)):
        f = step(f)
    return f


def term_value(t: Term, v: Valuation) -> FzFunc:
    """The element of F_fs(Z) denoted by ``t`` under ``v``."""
    cache: dict[Term, FzFunc] = {}

    def go(s: Term) -> FzFunc:
        if s in cache:
            return cache[s]
        if isinstance(s, Var):
            r = v[s.name]
        elif isinstance(s, One):
            r = FzFunc.identity()
        elif isinstance(s, InvL):
            r = dual_residual(go(s.arg))
        elif isinstance(s, InvR):
            r = residual(go(s.arg))
        elif isinstance(s, Mul):
            r = compose(go(s.left), go(s.right))
        elif isinstance(s, Meet):
            r = meet(go(s.left), go(s.right))
        elif isinstance(s, Join):
            r = join(go(s.left), go(s.right))
        else:
            raise TypeError(f"not a term: {s!r}")
        cache[s] = r
        return r

    return go(t)


def eval_term(t: Term, v: Valuation, p: int) -> int:
    return term_value(t, v)(p)


class _Powers:
    def __init__(self, funcs: Sequence[FzFunc]):
        self.funcs = list(funcs)
        self.cache: dict[tuple[int, int], FzFunc] = {}

    def __call__(self, i: int, m: int) -> FzFunc:
        key = (i, m)
        if key not in self.cache:
            self.cache[key] = iterate_inverse(self.funcs[i], m)
        return self.cache[key]


def eval_word(w: Word, funcs: Sequence[FzFunc], p: int, _powers: _Powers | None = None) -> int:
    """Evaluate an intentional word (indices into ``funcs``) at ``p``."""
    powers = _powers or _Powers(funcs)
    x = p
    for a in reversed(w):
        x = powers(a.var, a.order)(x)
    return x


def verify_certificate(eps: IntentionalEquation, witness: Sequence[FzFunc], p: int) -> bool:
    """True iff every word of ``eps`` evaluates strictly below ``p``."""
    if len(witness) != eps.nvars:
        return False
    powers = _Powers(witness)
    return all(eval_word(w, witness, p, powers) < p for w in eps.words)


def witness_from_diagram(d: Diagram, shift: int = 0) -> list[FzFunc]:
    """Extend each partial function of ``d`` to a map on Z.

    Point ``k`` of the chain sits at the integer ``k + shift``.  On the chain,
    ``f(a)`` is ``g(min J_a)`` with ``J_a = {b in Dom(g) + {q} : a <= b}``,
    where ``g`` is taken to fix ``q`` when ``q`` is not in its domain.
    """
    q = d.q
    out = []
    for g in d.funcs:
        m = g.mapping
        vals = []
        nxt = q  # min J_a, scanning a downward
        for a in range(q, 0, -1):
            if a in m:
                nxt = a
            vals.append(m.get(nxt, q) + shift)
        vals.reverse()
        out.append(FzFunc(1 + shift, q + shift, tuple(vals)))
    return out


def lambda_set(f: FzFunc, m: int, a: int) -> set[int]:
    """``{s_1 f^(1) ... s_|m| f^(m)(a)}`` with signs in {-1, 0} (``m >= 0``) or {0, +1} (``m < 0``)."""
    top = abs(m)
    if top == 0:
        return {a}
    sgn = 1 if m > 0 else -1
    cur = {a}
    for k in range(top, 0, -1):
        fk = iterate_inverse(f, sgn * k)
        cur = {y + d for x in cur for y in (fk(x),) for d in (0, -sgn)}
    return cur


def delta_set(f: FzFunc, m: int, a: int) -> set[int]:
    """``{a}`` plus ``s_j f^(j) ... s_|m| f^(m)(a)`` for ``0 <= j <= |m|``, no sign at level 0."""
    top = abs(m)
    sgn = 1 if m >= 0 else -1
    out = {a}
    cur = {a}
    for k in range(top, -1, -1):
        fk = iterate_inverse(f, sgn * k)
        applied = {fk(x) for x in cur}
        out |= applied
        if k == 0:
            break
        cur = {y - d for y in applied for d in (0, sgn)}
        out |= cur
    return out


def finite_inverse_agrees(f: FzFunc, m: int, a: int) -> tuple[int | None, int]:
    """Compute ``f^(m)(a)`` twice: on the finite c-chain over ``Delta^a_{f,m}``
    (with ``f`` restricted to ``Lambda^a_{f,m}``) and directly on Z."""
    points = sorted(delta_set(f, m, a))
    pos = {x: k + 1 for k, x in enumerate(points)}
    yleft = frozenset((pos[x], pos[x + 1]) for x in points if x + 1 in pos)
    chain = CChain(len(points), yleft)
    g = PartialFn.of({pos[x]: pos[f(x)] for x in lambda_set(f, m, a)})
    r = iterate(g, m, chain)(pos[a])
    return (None if r is None else points[r - 1]), iterate_inverse(f, m)(a)


def random_fzfunc(seed, window_size: int, lo: int = 0) -> FzFunc:
    """Sorted uniform samples from ``[lo - 1, lo + window_size]`` as the values on ``lo..lo+window_size-1``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if window_size <= 0:
        return FzFunc.identity()
    hi = lo + window_size - 1
    vals = np.sort(rng.integers(lo - 1, hi + 2, size=window_size))
    return FzFunc(lo, hi, tuple(int(x) for x in vals))


def find_failure(s: Term, rel: str, t: Term, v: Valuation) -> int | None:
    """A point where ``s rel t`` fails under ``v`` (``s != t`` or ``s > t``), else ``None``."""
    fs, ft = term_value(s, v), term_value(t, v)
    window = _hull(fs, ft)
    if window is None:
        return None
    for n in range(window[0], window[1] + 1):
        a, b = fs(n), ft(n)
        if (rel == EQ and a != b) or (rel == LE and a > b):
            return n
    return None


def falsify(
    s: Term,
    rel: str,
    t: Term,
    budget: int = 1000,
    seed: int = 0,
    max_window: int = 6,
    spread: int = 3,
) -> tuple[dict[str, FzFunc], int] | None:
    """Random search for a valuation in F_fs(Z) violating ``s rel t``.

    ``None`` only means nothing was found within ``budget`` valuations.
    """
    rng = np.random.default_rng(seed)
    names = list(dict.fromkeys(variables(s) + variables(t)))
    for _ in range(budget):
        v = {
            n: random_fzfunc(rng, int(rng.integers(0, max_window + 1)), lo=int(rng.integers(-spread, spread + 1)))
            for n in names
        }
        p = find_failure(s, rel, t, v)
        if p is not None:
            return v, p
    return None
