"""Deterministic generator of small random equations."""

from __future__ import annotations

import random

from dlpg.term import InvL, InvR, Join, Meet, Mul, One, Term, Var, print_term

FIXED = [
    "1 <= x^l x",
    "1 <= x^l \\/ x",
    "1 <= 1",
    "1 <= x x^l",
    "x^l x <= 1",
    "x x^r <= 1",
    "1 <= x^r x",
    "x^l = x^r",
    "x y = y x",
    "x <= x x",
    "x x <= x",
    "1 <= x \\/ x^r",
    "x /\\ y <= x",
    "x <= x \\/ y",
    "x^l^r = x",
    "x^r^l = x",
    "x^l x x^l = x^l",
    "x x^l x = x",
    "1 <= x",
    "x <= 1",
    "x^l <= x^r",
    "x^r <= x^l",
]


def random_term(rng: random.Random, depth: int, names=("x", "y")) -> Term:
    if depth <= 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.1:
            return One()
        t: Term = Var(rng.choice(names))
        if rng.random() < 0.5:
            t = InvL(t) if rng.random() < 0.5 else InvR(t)
        return t
    k = rng.random()
    if k < 0.45:
        return Mul(random_term(rng, depth - 1, names), random_term(rng, depth - 1, names))
    if k < 0.65:
        return Join(random_term(rng, depth - 1, names), random_term(rng, depth - 1, names))
    if k < 0.85:
        return Meet(random_term(rng, depth - 1, names), random_term(rng, depth - 1, names))
    return (InvL if rng.random() < 0.5 else InvR)(random_term(rng, depth - 1, names))


def random_equations(n: int, seed: int = 0, depth: int = 2) -> list[str]:
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        s, t = random_term(rng, depth), random_term(rng, depth)
        rel = "<=" if rng.random() < 0.6 else "="
        text = f"{print_term(s)} {rel} {print_term(t)}"
        if text not in out:
            out.append(text)
    return out


def corpus(n_random: int = 200, seed: int = 0) -> list[str]:
    return FIXED + random_equations(n_random, seed)
