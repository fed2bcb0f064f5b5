"""The finite template of extended words indexing all candidate failures."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .term import MINUS, PLUS, Atom, IntentionalEquation, Word, print_word, word_key

DEFAULT_CAP = 1500


class TemplateTooLarge(RuntimeError):
    """The template exceeds the configured element cap."""


def final_subwords(eps: IntentionalEquation) -> set[Word]:
    """All suffixes of all words of ``eps``, the empty word included."""
    fs: set[Word] = {()}
    for w in eps.words:
        for k in range(len(w) + 1):
            fs.add(w[k:])
    return fs


def build_s(fs: set[Word]) -> set[tuple[int, int, Word]]:
    """Triples ``(i, m, v)`` with ``v`` and ``x_i^(m) v`` both final subwords."""
    return {(u[0].var, u[0].order, u[1:]) for u in fs if u and u[1:] in fs}


def delta_block(i: int, m: int, v: Word) -> set[Word]:
    """``{v}`` together with every ``s_j x^(j) ... s_m x^(m) v`` for ``0 <= j <= |m|``.

    For ``m >= 0`` the signs range over {MINUS, none}, for ``m < 0`` over
    {PLUS, none}, and the sign in front of ``x^(0)`` is always absent.
    """
    top = abs(m)
    sgn = 1 if m >= 0 else -1
    shift = MINUS if m >= 0 else PLUS
    out: set[Word] = {v}
    for j in range(top + 1):
        levels = range(j, top + 1)
        choices = [((), (shift,)) if k > 0 else ((),) for k in levels]
        for signs in product(*choices):
            letters: list = []
            for k, s in zip(levels, signs):
                letters.extend(s)
                letters.append(Atom(i, sgn * k))
            out.add(tuple(letters) + v)
    return out


@dataclass(frozen=True)
class DeltaTemplate:
    equation: IntentionalEquation
    fs: tuple[Word, ...]
    s_triples: tuple[tuple[int, int, Word], ...]
    elements: tuple[Word, ...]
    index: dict = field(compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, w: Word) -> bool:
        return w in self.index

    def to_json(self) -> dict:
        names = self.equation.names
        return {
            "intentional": self.equation.to_json(),
            "size": len(self.elements),
            "fs": [print_word(w, names) for w in self.fs],
            "s_triples": [[names[i], m, print_word(v, names)] for i, m, v in self.s_triples],
            "elements": [print_word(w, names) for w in self.elements],
        }


def size_bound(eps: IntentionalEquation) -> int:
    """The crude bound ``2^l * l^4`` on the template size, ``l`` the equation length."""
    n = eps.length()
    return 2**n * n**4


def build_template(eps: IntentionalEquation, cap: int | None = DEFAULT_CAP) -> DeltaTemplate:
    fs = final_subwords(eps)
    s = build_s(fs)
    elements: set[Word] = {()}
    for i, m, v in s:
        elements |= delta_block(i, m, v)
        if cap is not None and len(elements) > cap:
            raise TemplateTooLarge(f"template has more than {cap} elements")
    ordered = tuple(sorted(elements, key=word_key))
    return DeltaTemplate(
        equation=eps,
        fs=tuple(sorted(fs, key=word_key)),
        s_triples=tuple(sorted(s, key=lambda t: (t[0], t[1], word_key(t[2])))),
        elements=ordered,
        index={w: k for k, w in enumerate(ordered)},
    )
