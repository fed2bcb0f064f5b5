"""Exhaustive search for failing compatible surjections.

A compatible surjection ranks every template element on a finite chain
``1..q`` so that the induced diagram reproduces each extended word.  The
search inserts the template elements one at a time (shortest first) into an
ordered partition, either joining an existing class or opening a new class
in some gap.  Each choice is propagated through the local conditions of the
equivalent preorder view; full compatibility is checked at the leaves.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ._kernels import LE_KIND, LT_KIND, PropagationState, Rules
from .delta import DEFAULT_CAP, DeltaTemplate, build_template
from .diagram import CChain, Diagram, PartialFn
from .term import MINUS, PLUS, Atom, IntentionalEquation, Word, print_word


@dataclass(frozen=True)
class CompatibleSurjection:
    """``rank[k]`` is the chain point of ``template.elements[k]``."""

    template: DeltaTemplate
    rank: tuple[int, ...]

    @property
    def q(self) -> int:
        return max(self.rank)

    def of(self, w: Word) -> int:
        return self.rank[self.template.index[w]]

    @property
    def failure_point(self) -> int:
        return self.of(())

    def rank_json(self) -> list[list]:
        names = self.template.equation.names
        return [[print_word(w, names), r] for w, r in zip(self.template.elements, self.rank)]


@dataclass(frozen=True)
class CompatiblePreorder:
    """A total preorder given as the set of index pairs ``(a, b)`` with ``a <= b``."""

    template: DeltaTemplate
    rel: frozenset

    def le(self, u: Word, v: Word) -> bool:
        idx = self.template.index
        return (idx[u], idx[v]) in self.rel

    def lt(self, u: Word, v: Word) -> bool:
        return not self.le(v, u)


@dataclass
class Certificate:
    surjection: CompatibleSurjection
    diagram: Diagram
    failure_point: int
    witness: list = field(default_factory=list)

    @property
    def q(self) -> int:
        return self.surjection.q


@dataclass
class SearchStats:
    nodes: int = 0
    leaves: int = 0
    seconds: float = 0.0


@dataclass
class Verdict:
    valid: bool
    certificate: Certificate | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def tag(self) -> str:
        return "VALID" if self.valid else "INVALID"


# ---------------------------------------------------------------- structure


def _child_pairs(t: DeltaTemplate) -> Iterator[tuple[int, int, int]]:
    """``(i, u, x_i u)`` index triples for order-0 letters."""
    for e in t.elements:
        if e and isinstance(e[0], Atom) and e[0].order == 0 and e[1:] in t.index:
            yield e[0].var, t.index[e[1:]], t.index[e]


def _power_pairs(t: DeltaTemplate) -> Iterator[tuple[int, int, int, int]]:
    """``(i, m, u, x_i^(m) u)`` index quadruples for every atom."""
    for e in t.elements:
        if e and isinstance(e[0], Atom) and e[1:] in t.index:
            yield e[0].var, e[0].order, t.index[e[1:]], t.index[e]


def _cover_pairs(t: DeltaTemplate) -> list[tuple[int, int]]:
    """``(lo, hi)`` index pairs marked by the sign letters."""
    out = []
    for e in t.elements:
        if e and e[0] in (PLUS, MINUS) and e[1:] in t.index:
            u = t.index[e[1:]]
            out.append((t.index[e], u) if e[0] == MINUS else (u, t.index[e]))
    return out


def _local_facts(t: DeltaTemplate) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Strict and weak inequalities forced around every inverse letter."""
    idx = t.index
    lt, le = [], []
    for e in t.elements:
        if not (e and isinstance(e[0], Atom) and e[0].order != 0):
            continue
        i, j = e[0]
        v = idx.get(e[1:])
        if v is None:
            continue
        if j > 0:
            lower = (Atom(i, j - 1), MINUS) + e
            upper = (Atom(i, j - 1),) + e
            if lower not in idx or upper not in idx:
                raise ValueError("template is not closed under the inverse-letter rules")
            lt.append((idx[lower], v))
            le.append((v, idx[upper]))
        else:
            lower = (Atom(i, j + 1),) + e
            upper = (Atom(i, j + 1), PLUS) + e
            if lower not in idx or upper not in idx:
                raise ValueError("template is not closed under the inverse-letter rules")
            le.append((idx[lower], v))
            lt.append((v, idx[upper]))
    for lo, hi in _cover_pairs(t):
        lt.append((lo, hi))
    return lt, le


class _Problem:
    def __init__(self, t: DeltaTemplate, failing: bool = True):
        self.template = t
        n = self.n = len(t)
        child = np.full((n, max(t.equation.nvars, 1)), -1, dtype=np.int32)
        for i, u, xu in _child_pairs(t):
            child[u, i] = xu
        self.rules = Rules(n, child, _cover_pairs(t))
        lt, le = _local_facts(t)
        if failing:
            one = t.index[()]
            lt += [(t.index[w], one) for w in t.equation.words]
        facts = [(LT_KIND, a, b) for a, b in lt] + [(LE_KIND, a, b) for a, b in le]
        self.facts = _seeds(facts)


def _seeds(facts: Sequence[tuple[int, int, int]]):
    if not facts:
        z = np.zeros(0, dtype=np.int64)
        return z.astype(np.int8), z, z
    arr = np.asarray(facts, dtype=np.int64)
    return arr[:, 0].astype(np.int8), arr[:, 1], arr[:, 2]


# ---------------------------------------------------------------- checks


def induced_diagram(s: CompatibleSurjection) -> Diagram:
    t = s.template
    r = s.rank
    yleft = frozenset((r[lo], r[hi]) for lo, hi in _cover_pairs(t))
    maps: list[dict[int, int]] = [dict() for _ in range(t.equation.nvars)]
    for i, u, xu in _child_pairs(t):
        maps[i][r[u]] = r[xu]
    return Diagram(CChain(s.q, yleft), tuple(PartialFn.of(m) for m in maps), t.equation.names)


def surjection_defect(s: CompatibleSurjection) -> str | None:
    """The first violated condition, or ``None`` for a compatible surjection."""
    t = s.template
    r = s.rank
    if len(r) != len(t):
        return "rank is not total"
    if not r or set(r) != set(range(1, max(r) + 1)):
        return "rank is not onto 1..q"
    maps: list[dict[int, int]] = [dict() for _ in range(t.equation.nvars)]
    for i, u, xu in _child_pairs(t):
        if maps[i].setdefault(r[u], r[xu]) != r[xu]:
            return f"condition (i): {t.equation.names[i]} is not a function"
    for m in maps:
        if not PartialFn.of(m).is_order_preserving():
            return "condition (i): induced function is not order preserving"
    for lo, hi in _cover_pairs(t):
        if r[hi] != r[lo] + 1:
            return "condition (ii): marked pair is not a cover"
    d = induced_diagram(s)
    for i, m, u, xu in _power_pairs(t):
        if d.power(i, m)(r[u]) != r[xu]:
            return "condition (iii): inverse letter disagrees with the diagram"
    return None


def check_surjection(s: CompatibleSurjection) -> bool:
    return surjection_defect(s) is None


def fails_at_one(s: CompatibleSurjection) -> bool:
    one = s.failure_point
    return all(s.of(w) < one for w in s.template.equation.words)


def surjection_to_preorder(s: CompatibleSurjection) -> CompatiblePreorder:
    r = s.rank
    n = len(r)
    return CompatiblePreorder(s.template, frozenset((a, b) for a in range(n) for b in range(n) if r[a] <= r[b]))


def preorder_to_surjection(p: CompatiblePreorder) -> CompatibleSurjection:
    """Rank each element by the number of classes strictly below it, plus one."""
    n = len(p.template)
    below = [{a for a in range(n) if (a, b) in p.rel and (b, a) not in p.rel} for b in range(n)]
    levels = sorted({frozenset(x) for x in below}, key=len)
    pos = {lv: k + 1 for k, lv in enumerate(levels)}
    return CompatibleSurjection(p.template, tuple(pos[frozenset(below[b])] for b in range(n)))


def _relation_matrix(p: CompatiblePreorder) -> np.ndarray:
    n = len(p.template)
    m = np.zeros((n, n), dtype=np.bool_)
    if p.rel:
        a, b = np.array(sorted(p.rel)).T
        m[a, b] = True
    return m


def preorder_defect(p: CompatiblePreorder) -> str | None:
    """The first violated preorder condition, or ``None``."""
    t = p.template
    le = _relation_matrix(p)
    lt = ~le.T
    if not le.diagonal().all():
        return "not reflexive"
    if not (le | le.T).all():
        return "not total"
    lef = le.astype(np.float32)
    if ((lef @ lef > 0) & ~le).any():
        return "not transitive"
    pairs_by_var: dict[int, list[tuple[int, int]]] = {}
    for i, u, xu in _child_pairs(t):
        pairs_by_var.setdefault(i, []).append((u, xu))
    for pairs in pairs_by_var.values():
        us, xs = np.array(pairs).T
        if (le[np.ix_(us, us)] & ~le[np.ix_(xs, xs)]).any():
            return "condition (i): not monotone"
    for lo, hi in _cover_pairs(t):
        if not lt[lo, hi]:
            return "condition (ii): marked pair not strict"
        if (lt[lo] & ~le[hi]).any() or (lt[:, hi] & ~le[:, lo]).any():
            return "condition (ii): marked pair is not a cover"
    lts, les = _local_facts(t)
    for a, b in lts:
        if not lt[a, b]:
            return "condition (iii): strict inequality fails"
    for a, b in les:
        if not le[a, b]:
            return "condition (iii): weak inequality fails"
    return None


def check_preorder(p: CompatiblePreorder) -> bool:
    return preorder_defect(p) is None


# ---------------------------------------------------------------- search


class _Frame:
    __slots__ = ("blocks", "opts", "k", "top")

    def __init__(self, blocks, opts, top):
        self.blocks = blocks
        self.opts = opts
        self.k = 0
        self.top = top


class _Searcher:
    def __init__(self, problem: _Problem, backend: str | None = None):
        self.p = problem
        self.backend = backend
        self.state = PropagationState(problem.rules, backend)
        self.le, self.lt = self.state.le, self.state.lt
        self.stats = SearchStats()
        self.ok = self.state.propagate(problem.facts)

    def options(self, e: int, blocks: list[list[int]]) -> list[tuple[str, int]]:
        """Placements of ``e`` in chain order: gap 0, block 0, gap 1, ..., gap k."""
        le, lt = self.le, self.lt
        reps = [b[0] for b in blocks]
        out = []
        for g in range(len(reps) + 1):
            if (g == 0 or not le[e, reps[g - 1]]) and (g == len(reps) or not le[reps[g], e]):
                out.append(("gap", g))
            if g < len(reps):
                r = reps[g]
                if not lt[e, r] and not lt[r, e]:
                    out.append(("join", g))
        return out

    def apply(self, e: int, blocks: list[list[int]], opt: tuple[str, int]) -> list[list[int]] | None:
        kind, g = opt
        reps = [b[0] for b in blocks]
        if kind == "join":
            r = reps[g]
            facts = [(LE_KIND, e, r), (LE_KIND, r, e)]
        else:
            facts = []
            if g > 0:
                facts.append((LT_KIND, reps[g - 1], e))
            if g < len(reps):
                facts.append((LT_KIND, e, reps[g]))
        self.stats.nodes += 1
        if not self.state.propagate(_seeds(facts)):
            return None
        if kind == "join":
            return blocks[:g] + [blocks[g] + [e]] + blocks[g + 1:]
        return blocks[:g] + [[e]] + blocks[g:]

    def run(self, start_depth: int = 0, start_blocks=None) -> Iterator[tuple[int, ...]]:
        """Yield the rank vectors of all leaves below the current state."""
        n = self.p.n
        if not self.ok:
            return
        blocks0 = [] if start_blocks is None else start_blocks
        if start_depth == n:
            yield _ranks(blocks0, n)
            return
        frames = [(start_depth, _Frame(blocks0, self.options(start_depth, blocks0), self.state.top))]
        while frames:
            depth, fr = frames[-1]
            self.state.undo(fr.top)
            if fr.k >= len(fr.opts):
                frames.pop()
                continue
            opt = fr.opts[fr.k]
            fr.k += 1
            nb = self.apply(depth, fr.blocks, opt)
            if nb is None:
                continue
            if depth + 1 == n:
                self.stats.leaves += 1
                yield _ranks(nb, n)
                continue
            frames.append((depth + 1, _Frame(nb, self.options(depth + 1, nb), self.state.top)))

    def forced_prefix(self) -> tuple[int, list[list[int]], list[tuple[str, int]]]:
        """Follow single-option levels; return the first branching level and its options."""
        blocks: list[list[int]] = []
        depth = 0
        while depth < self.p.n:
            opts = self.options(depth, blocks)
            if len(opts) != 1:
                return depth, blocks, opts
            nb = self.apply(depth, blocks, opts[0])
            if nb is None:
                return depth, blocks, []
            blocks = nb
            depth += 1
        return depth, blocks, []


def _ranks(blocks: list[list[int]], n: int) -> tuple[int, ...]:
    r = [0] * n
    for k, b in enumerate(blocks):
        for e in b:
            r[e] = k + 1
    return tuple(r)


def _compile(eps_or_template, cap: int | None) -> DeltaTemplate:
    if isinstance(eps_or_template, DeltaTemplate):
        return eps_or_template
    return build_template(eps_or_template, cap)


def iter_failing_surjections(
    eps_or_template, cap: int | None = DEFAULT_CAP, view: str = "surjection", backend: str | None = None
) -> Iterator[CompatibleSurjection]:
    """Every compatible surjection in which the equation fails, in search order."""
    t = _compile(eps_or_template, cap)
    searcher = _Searcher(_Problem(t), backend)
    for r in searcher.run():
        s = CompatibleSurjection(t, r)
        if _accept(s, view):
            yield s


def _accept(s: CompatibleSurjection, view: str) -> bool:
    if view == "surjection":
        return check_surjection(s) and fails_at_one(s)
    if view == "preorder":
        p = surjection_to_preorder(s)
        return check_preorder(p) and fails_at_one(preorder_to_surjection(p))
    raise ValueError(f"unknown view {view!r}")


def _branch_search(t: DeltaTemplate, prefix_ranks: tuple[int, ...], depth: int, opt, view: str, backend):
    """Search one top-level branch from a fresh state."""
    searcher = _Searcher(_Problem(t), backend)
    stats = searcher.stats
    blocks = _replay(searcher, prefix_ranks, depth)
    if blocks is None:
        return None, stats
    nb = searcher.apply(depth, blocks, opt)
    if nb is None:
        return None, stats
    for r in searcher.run(depth + 1, nb):
        s = CompatibleSurjection(t, r)
        if _accept(s, view):
            return s, stats
    return None, stats


def _replay(searcher: _Searcher, ranks: tuple[int, ...], depth: int):
    """Rebuild the forced prefix: the first ``depth`` elements placed by ``ranks``."""
    blocks: list[list[int]] = []
    for e in range(depth):
        target = ranks[e]
        existing = [k for k, b in enumerate(blocks) if ranks[b[0]] == target]
        if existing:
            opt = ("join", existing[0])
        else:
            opt = ("gap", sum(1 for b in blocks if ranks[b[0]] < target))
        blocks = searcher.apply(e, blocks, opt)
        if blocks is None:
            return None
    return blocks


def find_failing_surjection(
    eps_or_template,
    cap: int | None = DEFAULT_CAP,
    view: str = "surjection",
    threads: int = 1,
    backend: str | None = None,
) -> tuple[CompatibleSurjection | None, SearchStats]:
    t = _compile(eps_or_template, cap)
    t0 = time.perf_counter()
    searcher = _Searcher(_Problem(t), backend)
    if threads <= 1:
        found = None
        for r in searcher.run():
            s = CompatibleSurjection(t, r)
            if _accept(s, view):
                found = s
                break
        stats = searcher.stats
    else:
        found, stats = None, searcher.stats
        if searcher.ok:
            depth, blocks, opts = searcher.forced_prefix()
            if depth == len(t):
                s = CompatibleSurjection(t, _ranks(blocks, len(t)))
                found = s if _accept(s, view) else None
            elif opts:
                prefix = _ranks(blocks, len(t))
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    futures = [pool.submit(_branch_search, t, prefix, depth, o, view, backend) for o in opts]
                    results = [f.result() for f in futures]
                for s, st in results:
                    stats.nodes += st.nodes
                    stats.leaves += st.leaves
                # lowest branch index wins
                found = next((s for s, _ in results if s is not None), None)
    stats.seconds = time.perf_counter() - t0
    return found, stats


def certificate_for(s: CompatibleSurjection) -> Certificate:
    from .zfunc import witness_from_diagram

    d = induced_diagram(s)
    return Certificate(s, d, s.failure_point, witness_from_diagram(d))


def decide(
    eps: IntentionalEquation | DeltaTemplate,
    cap: int | None = DEFAULT_CAP,
    view: str = "surjection",
    threads: int = 1,
    backend: str | None = None,
) -> Verdict:
    """VALID, or INVALID with a failing compatible surjection and its witness.

    Raises ``TemplateTooLarge`` past ``cap``; below it the search is exhaustive.
    """
    s, stats = find_failing_surjection(eps, cap, view, threads, backend)
    if s is None:
        return Verdict(True, None, stats)
    return Verdict(False, certificate_for(s), stats)


# ---------------------------------------------------------------- oracles


def brute_force_surjections(t: DeltaTemplate) -> Iterator[CompatibleSurjection]:
    """All failing compatible surjections by enumerating every onto map."""
    n = len(t)
    for q in range(1, n + 1):
        for r in itertools.product(range(1, q + 1), repeat=n):
            if len(set(r)) != q:
                continue
            s = CompatibleSurjection(t, r)
            if fails_at_one(s) and check_surjection(s):
                yield s


def brute_force_decide(t: DeltaTemplate) -> bool:
    """True iff valid, i.e. no onto map of the template is a failing compatible surjection."""
    return next(brute_force_surjections(t), None) is None
