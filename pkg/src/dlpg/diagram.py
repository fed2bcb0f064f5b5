"""Finite c-chains, order-preserving partial functions and their partial inverses.

Points are the integers ``1..q``.  A c-chain marks some covering pairs
``(a, a+1)``; the partial inverses ``g^[l]`` and ``g^[r]`` of a partial
function are read off those marked covers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .term import MINUS, PLUS, IntentionalEquation, Word


@dataclass(frozen=True)
class CChain:
    q: int
    yleft: frozenset = frozenset()

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("a c-chain needs at least one point")
        object.__setattr__(self, "yleft", frozenset(tuple(p) for p in self.yleft))
        for a, b in self.yleft:
            if not (b == a + 1 and 1 <= a < self.q):
                raise ValueError(f"({a}, {b}) is not a covering pair of 1..{self.q}")

    def up(self, a: int) -> int | None:
        return a + 1 if (a, a + 1) in self.yleft else None

    def down(self, b: int) -> int | None:
        return b - 1 if (b - 1, b) in self.yleft else None


@dataclass(frozen=True)
class PartialFn:
    """A finite map stored as a sorted tuple of ``(point, value)`` pairs."""

    items: tuple = ()

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]]) -> "PartialFn":
        pairs = mapping.items() if isinstance(mapping, Mapping) else mapping
        d = {}
        for a, b in pairs:
            if d.setdefault(a, b) != b:
                raise ValueError(f"point {a} has two values")
        return cls(tuple(sorted(d.items())))

    @cached_property
    def mapping(self) -> dict[int, int]:
        return dict(self.items)

    def __call__(self, a: int) -> int | None:
        return self.mapping.get(a)

    def __len__(self) -> int:
        return len(self.items)

    @property
    def domain(self) -> list[int]:
        return [a for a, _ in self.items]

    def is_order_preserving(self) -> bool:
        vals = [b for _, b in self.items]
        return all(x <= y for x, y in zip(vals, vals[1:]))


def ell_inverse(g: PartialFn, c: CChain) -> PartialFn:
    """``g^[l] = {(x, b) : a <| b, both in Dom(g), g(a) < x <= g(b)}``."""
    m = g.mapping
    out = {}
    for a, b in sorted(c.yleft):
        if a in m and b in m:
            for x in range(m[a] + 1, m[b] + 1):
                out[x] = b
    return PartialFn.of(out)


def r_inverse(g: PartialFn, c: CChain) -> PartialFn:
    """``g^[r] = {(x, a) : a <| b, both in Dom(g), g(a) <= x < g(b)}``."""
    m = g.mapping
    out = {}
    for a, b in sorted(c.yleft):
        if a in m and b in m:
            for x in range(m[a], m[b]):
                out[x] = a
    return PartialFn.of(out)


def iterate(g: PartialFn, m: int, c: CChain) -> PartialFn:
    """``g^[m]``: ``m``-fold ``[l]`` for ``m > 0``, ``|m|``-fold ``[r]`` for ``m < 0``."""
    step = ell_inverse if m > 0 else r_inverse
    for _ in range(abs(m)):
        g = step(g, c)
    return g


@dataclass(frozen=True)
class Diagram:
    chain: CChain
    funcs: tuple[PartialFn, ...]
    names: tuple[str, ...] = ()
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "funcs", tuple(self.funcs))
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(len(self.funcs))))
        for g in self.funcs:
            if any(not (1 <= v <= self.chain.q) for kv in g.items for v in kv):
                raise ValueError("partial function leaves the chain")

    @property
    def q(self) -> int:
        return self.chain.q

    def power(self, i: int, m: int) -> PartialFn:
        """``g_i^[m]``, memoized."""
        key = (i, m)
        if key not in self._cache:
            if m == 0:
                self._cache[key] = self.funcs[i]
            else:
                prev = self.power(i, m - 1 if m > 0 else m + 1)
                step = ell_inverse if m > 0 else r_inverse
                self._cache[key] = step(prev, self.chain)
        return self._cache[key]

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "yleft": [list(p) for p in sorted(self.chain.yleft)],
            "funcs": [{"name": n, "map": [list(p) for p in g.items]} for n, g in zip(self.names, self.funcs)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Diagram":
        chain = CChain(int(data["q"]), frozenset(tuple(p) for p in data["yleft"]))
        funcs = tuple(PartialFn.of((int(a), int(b)) for a, b in f["map"]) for f in data["funcs"])
        return cls(chain, funcs, tuple(f["name"] for f in data["funcs"]))


def reindex(
    points: Iterable[int],
    yleft: Iterable[tuple[int, int]],
    funcs: Sequence[Mapping[int, int]],
    names: Sequence[str] = (),
) -> tuple[Diagram, list[int]]:
    """Rebase a diagram on an arbitrary finite set of integers onto ``1..q``.

    Returns the diagram and the sorted label list (label of point ``k`` is
    ``labels[k - 1]``).  Marked pairs must be adjacent in ``points``.
    """
    labels = sorted(set(points))
    pos = {x: k + 1 for k, x in enumerate(labels)}
    chain = CChain(len(labels), frozenset((pos[a], pos[b]) for a, b in yleft))
    gs = tuple(PartialFn.of({pos[a]: pos[b] for a, b in f.items()}) for f in funcs)
    return Diagram(chain, gs, tuple(names)), labels


def eval_word(d: Diagram, w: Word, p: int) -> int | None:
    """Apply the letters of ``w`` right to left starting at ``p``; ``None`` if undefined."""
    x: int | None = p
    for c in reversed(w):
        if c == PLUS:
            x = d.chain.up(x)
        elif c == MINUS:
            x = d.chain.down(x)
        else:
            x = d.power(c.var, c.order)(x)
        if x is None:
            return None
    return x


def fails_in(d: Diagram, eps: IntentionalEquation, p: int) -> bool:
    """Every word is defined at ``p`` and lands strictly below ``p``."""
    for w in eps.words:
        v = eval_word(d, w, p)
        if v is None or v >= p:
            return False
    return True
