"""Constraint propagation over a partially known total preorder.

The state is two boolean matrices: ``le[a, b]`` (known ``a <= b``) and
``lt[a, b]`` (known ``a < b``, which implies ``le[a, b]``).  Propagation
closes the state under

* transitivity of ``<=`` and ``<`` (mixed chains give ``<``),
* monotonicity of each variable: ``u <= v  =>  x u <= x v`` and,
  contrapositively, ``x u < x v  =>  u < v``,
* covers ``lo -< hi``: ``lo < v  =>  hi <= v`` and ``v < hi  =>  v <= lo``,

and reports a conflict when some ``a < b`` meets ``b <= a``.

Every newly set fact goes on a trail so a search can undo a propagation
in place.  The numba kernel uses the trail as its work queue and mirrors
both matrices (and their transposes) as 64-bit row sets, so a fact costs
O(n / 64) word operations plus one push per derived fact.  The numpy
kernel iterates whole-matrix sweeps to the same fixpoint.
"""

from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, default_backend, njit

LE_KIND = 0
LT_KIND = 1


class Rules:
    """Index arrays describing the implication rules of one template."""

    def __init__(self, n: int, child: np.ndarray, cover_lo_hi: list[tuple[int, int]]):
        self.n = n
        self.child = np.ascontiguousarray(child, dtype=np.int32)
        parent = np.full(n, -1, dtype=np.int32)
        parent_var = np.full(n, -1, dtype=np.int32)
        for u, i in zip(*np.nonzero(self.child >= 0)):
            if parent[self.child[u, i]] >= 0:
                raise ValueError("an element has two parents")
            parent[self.child[u, i]] = u
            parent_var[self.child[u, i]] = i
        self.parent = parent
        self.parent_var = parent_var
        cover_hi = np.full(n, -1, dtype=np.int32)
        cover_lo = np.full(n, -1, dtype=np.int32)
        for lo, hi in cover_lo_hi:
            if cover_hi[lo] >= 0 or cover_lo[hi] >= 0:
                raise ValueError("an element takes part in two covers on the same side")
            cover_hi[lo] = hi
            cover_lo[hi] = lo
        self.cover_hi = cover_hi
        self.cover_lo = cover_lo
        # numpy-side views
        self.var_pairs = []
        for i in range(self.child.shape[1]):
            us = np.nonzero(self.child[:, i] >= 0)[0]
            self.var_pairs.append((us, self.child[us, i].astype(np.int64)))
        self.cover_L = np.array([lo for lo, _ in cover_lo_hi], dtype=np.int64)
        self.cover_H = np.array([hi for _, hi in cover_lo_hi], dtype=np.int64)


# ---------------------------------------------------------------- numba kernel

_ONE = np.uint64(1)
_SIX = np.uint64(6)
_MASK = np.uint64(63)


@njit(cache=True, nogil=True)
def _setbit(bits, row, col):
    bits[row, np.uint64(col) >> _SIX] |= _ONE << (np.uint64(col) & _MASK)


@njit(cache=True, nogil=True)
def _clearbit(bits, row, col):
    bits[row, np.uint64(col) >> _SIX] &= ~(_ONE << (np.uint64(col) & _MASK))


@njit(cache=True, nogil=True)
def _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, kind, a, b):
    if kind == 1 and not lt[a, b]:
        lt[a, b] = True
        _setbit(ltb, a, b)
        _setbit(ltt, b, a)
        tk[top] = 1
        ta[top] = a
        tb[top] = b
        top += 1
    if not le[a, b]:
        le[a, b] = True
        _setbit(leb, a, b)
        _setbit(let_, b, a)
        tk[top] = 0
        ta[top] = a
        tb[top] = b
        top += 1
    return top


@njit(cache=True, nogil=True)
def _propagate_nb(le, lt, leb, let_, ltb, ltt, seed_kind, seed_a, seed_b,
                  child, parent, parent_var, cover_hi, cover_lo, tk, ta, tb, top):
    nv = child.shape[1]
    nw = leb.shape[1]
    head = top
    for s in range(seed_kind.shape[0]):
        top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, seed_kind[s], seed_a[s], seed_b[s])
    while head < top:
        kind = tk[head]
        a = ta[head]
        b = tb[head]
        head += 1
        if kind == 0:
            if lt[b, a]:
                return False, top
            for k in range(nw):
                base = k * 64
                # a <= b <= c
                w = leb[b, k] & ~leb[a, k]
                j = 0
                while w:
                    if w & _ONE:
                        top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, 0, a, base + j)
                    w >>= _ONE
                    j += 1
                # a <= b < c
                w = ltb[b, k] & ~ltb[a, k]
                j = 0
                while w:
                    if w & _ONE:
                        top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, 1, a, base + j)
                    w >>= _ONE
                    j += 1
                # c <= a <= b
                w = let_[a, k] & ~let_[b, k]
                j = 0
                while w:
                    if w & _ONE:
                        top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, 0, base + j, b)
                    w >>= _ONE
                    j += 1
                # c < a <= b
                w = ltt[a, k] & ~ltt[b, k]
                j = 0
                while w:
                    if w & _ONE:
                        top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, 1, base + j, b)
                    w >>= _ONE
                    j += 1
            for i in range(nv):
                ca = child[a, i]
                cb = child[b, i]
                if ca >= 0 and cb >= 0 and not le[ca, cb]:
                    top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, 0, ca, cb)
        else:
            if le[b, a]:
                return False, top
            for k in range(nw):
                base = k * 64
                # a < b <= c
                w = leb[b, k] & ~ltb[a, k]
                j = 0
                while w:
                    if w & _ONE:
                        top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, 1, a, base + j)
                    w >>= _ONE
                    j += 1
                # c <= a < b
                w = let_[a, k] & ~ltt[b, k]
                j = 0
                while w:
                    if w & _ONE:
                        top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, 1, base + j, b)
                    w >>= _ONE
                    j += 1
            pa = parent[a]
            pb = parent[b]
            if pa >= 0 and pb >= 0 and parent_var[a] == parent_var[b] and not lt[pa, pb]:
                top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, 1, pa, pb)
            h = cover_hi[a]
            if h >= 0 and not le[h, b]:
                top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, 0, h, b)
            lo = cover_lo[b]
            if lo >= 0 and not le[a, lo]:
                top = _push(le, lt, leb, let_, ltb, ltt, tk, ta, tb, top, 0, a, lo)
    return True, top


@njit(cache=True, nogil=True)
def _undo_nb(le, lt, leb, let_, ltb, ltt, tk, ta, tb, to, top):
    for t in range(to, top):
        a = ta[t]
        b = tb[t]
        if tk[t] == 0:
            le[a, b] = False
            _clearbit(leb, a, b)
            _clearbit(let_, b, a)
        else:
            lt[a, b] = False
            _clearbit(ltb, a, b)
            _clearbit(ltt, b, a)


# ---------------------------------------------------------------- numpy kernel


def _boolmm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (x.astype(np.float32) @ y.astype(np.float32)) > 0


def _propagate_np(le, lt, seeds, rules: Rules) -> bool:
    kinds, sa, sb = seeds
    lt[sa[kinds == LT_KIND], sb[kinds == LT_KIND]] = True
    le[sa, sb] = True
    while True:
        # conflict: a < b together with b <= a (a < a hits the diagonal)
        if (lt & le.T).any():
            return False
        new_le = le | _boolmm(le, le) | lt
        new_lt = lt | _boolmm(lt, le) | _boolmm(le, lt)
        for us, xs in rules.var_pairs:
            if len(us):
                new_le[np.ix_(xs, xs)] |= le[np.ix_(us, us)]
                new_lt[np.ix_(us, us)] |= lt[np.ix_(xs, xs)]
        if len(rules.cover_L):
            new_le[rules.cover_H, :] |= lt[rules.cover_L, :]
            new_le[:, rules.cover_L] |= lt[:, rules.cover_H]
        new_le |= new_lt
        if np.array_equal(new_le, le) and np.array_equal(new_lt, lt):
            return True
        le[...] = new_le
        lt[...] = new_lt


# ---------------------------------------------------------------- state


class PropagationState:
    """Known facts plus an undo trail, closed after every :meth:`propagate`."""

    def __init__(self, rules: Rules, backend: str | None = None):
        self.backend = backend or default_backend()
        if self.backend not in ("numba", "numpy"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "numba" and not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        n = rules.n
        self.rules = rules
        self.le = np.eye(n, dtype=np.bool_)
        self.lt = np.zeros((n, n), dtype=np.bool_)
        cap = 2 * n * n + 16
        self.tk = np.zeros(cap, dtype=np.int8)
        self.ta = np.zeros(cap, dtype=np.int32)
        self.tb = np.zeros(cap, dtype=np.int32)
        self.top = 0
        if self.backend == "numba":
            nw = (n + 63) // 64
            self.bits = tuple(np.zeros((n, nw), dtype=np.uint64) for _ in range(4))
            idx = np.arange(n)
            diag = np.left_shift(np.uint64(1), (idx & 63).astype(np.uint64))
            self.bits[0][idx, idx >> 6] = diag
            self.bits[1][idx, idx >> 6] = diag

    def propagate(self, seeds) -> bool:
        """Add ``seeds`` (arrays ``kind, a, b``) and close; False on conflict.

        On conflict the state is left partially updated; undo to a mark.
        """
        kinds, sa, sb = seeds
        if self.backend == "numba":
            ok, top = _propagate_nb(
                self.le, self.lt, *self.bits,
                np.asarray(kinds, dtype=np.int8), np.asarray(sa, dtype=np.int32), np.asarray(sb, dtype=np.int32),
                self.rules.child, self.rules.parent, self.rules.parent_var,
                self.rules.cover_hi, self.rules.cover_lo,
                self.tk, self.ta, self.tb, self.top,
            )
            self.top = int(top)
            return bool(ok)
        le0, lt0 = self.le.copy(), self.lt.copy()
        ok = _propagate_np(
            self.le, self.lt,
            (np.asarray(kinds, dtype=np.int8), np.asarray(sa, dtype=np.int64), np.asarray(sb, dtype=np.int64)),
            self.rules,
        )
        top = self.top
        for kind, mat, old in ((LT_KIND, self.lt, lt0), (LE_KIND, self.le, le0)):
            a, b = np.nonzero(mat & ~old)
            k = len(a)
            self.tk[top:top + k] = kind
            self.ta[top:top + k] = a
            self.tb[top:top + k] = b
            top += k
        self.top = top
        return ok

    def undo(self, to: int) -> None:
        if to >= self.top:
            return
        if self.backend == "numba":
            _undo_nb(self.le, self.lt, *self.bits, self.tk, self.ta, self.tb, to, self.top)
        else:
            k = self.tk[to:self.top]
            a = self.ta[to:self.top]
            b = self.tb[to:self.top]
            self.le[a[k == LE_KIND], b[k == LE_KIND]] = False
            self.lt[a[k == LT_KIND], b[k == LT_KIND]] = False
        self.top = to


def closure(rules: Rules, seeds, backend: str | None = None) -> tuple[bool, np.ndarray, np.ndarray]:
    """Close ``seeds`` from the empty state; returns ``(ok, le, lt)``."""
    st = PropagationState(rules, backend)
    ok = st.propagate(seeds)
    return ok, st.le.copy(), st.lt.copy()
