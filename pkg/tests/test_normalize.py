import random

import pytest

from conftest import intentional
from corpus import corpus
from dlpg.delta import TemplateTooLarge
from dlpg.normalize import (
    conjunct_renamings,
    equation_to_inequality,
    intentional_as_equation,
    meet_conjuncts,
    push_inverses,
    to_intentional,
)
from dlpg.search import decide
from dlpg.term import (
    Atom,
    InvL,
    InvR,
    Join,
    Meet,
    Mul,
    One,
    Var,
    parse_equation,
    parse_term,
)
from dlpg.zfunc import random_fzfunc, term_value

X = Atom(0, 0)


def test_reflexivity_shape():
    eps = intentional("x = x")
    doc = eps.to_json()
    assert set(doc) == {"vars", "words"}
    assert doc["vars"] == ["v0", "v1"]
    assert doc["words"] == ["v0^(-1) v0 v1^(-1) v1"]


@pytest.mark.parametrize(
    "text, words",
    [
        ("1 <= x^l x", [(Atom(0, 1), X)]),
        ("1 <= x^l \\/ x", [(Atom(0, 1),), (X,)]),
        ("1 <= 1", [()]),
        ("x <= y", [(Atom(0, -1), Atom(1, 0))]),
        ("x^l x <= 1", [(Atom(0, -1), X)]),
        ("1 <= (x \\/ 1) x", [(X, X), (X,)]),
    ],
)
def test_intentional_words(text, words):
    assert list(intentional(text).words) == words


def test_inequality_of_equation():
    s, rel, t = parse_equation("x = y")
    q = equation_to_inequality(s, rel, t)
    assert q == Meet(Mul(InvR(Var("x")), Var("y")), Mul(InvR(Var("y")), Var("x")))


@pytest.mark.parametrize(
    "before, after",
    [
        ("(x y)^l", "y^l x^l"),
        ("(x y)^r", "y^r x^r"),
        ("(x /\\ y)^l", "x^l \\/ y^l"),
        ("(x \\/ y)^r", "x^r /\\ y^r"),
        ("x^l^r", "x"),
        ("1^l", "1"),
        ("((x y)^l z)^l", "z^l (x^(2) y^(2))"),
    ],
)
def test_push_inverses(before, after):
    assert push_inverses(parse_term(before)) == parse_term(after)


def test_meet_conjuncts_distribute():
    t = push_inverses(parse_term("(x /\\ y) z \\/ w"))
    assert meet_conjuncts(t) == (parse_term("x z \\/ w"), parse_term("y z \\/ w"))


def test_duplicate_words_are_dropped():
    assert len(intentional("1 <= x \\/ x").words) == 1


def test_trace_replays():
    for text in ["x = x", "(x /\\ y)^l <= x^r y", "x y = y x", "1 <= x^l \\/ x"]:
        _, trace = to_intentional(*parse_equation(text))
        assert [r for r, _, _ in trace.steps] == [
            "push_inverses", "meet_to_top", "rename_apart", "concatenate", "distribute_join",
        ]
        assert trace.replay()


def test_renamings_follow_conjuncts():
    maps = conjunct_renamings(*parse_equation("x y = y x"))
    assert maps == [{"y": "v0", "x": "v1"}, {"x": "v2", "y": "v3"}]
    assert conjunct_renamings(*parse_equation("x <= y")) == [{"x": "x", "y": "y"}]


def test_pointwise_identity_steps():
    """Inverse pushing and join distribution do not change the denoted map."""
    rng = random.Random(3)
    for text in corpus(60, seed=5):
        s, rel, t = parse_equation(text)
        q = equation_to_inequality(s, rel, t)
        pushed = push_inverses(q)
        for _ in range(5):
            v = {n: random_fzfunc(rng.randrange(10**6), rng.randrange(0, 7), lo=rng.randrange(-3, 3)) for n in "xy"}
            assert term_value(q, v) == term_value(pushed, v)
            if len(meet_conjuncts(pushed)) == 1:
                eps, _ = to_intentional(s, rel, t)
                _, _, joined = intentional_as_equation(eps)
                assert term_value(joined, v) == term_value(pushed, v)


def test_decision_preserved_by_normal_form():
    for text in corpus(40, seed=11):
        eps = intentional(text)
        try:
            v1 = decide(eps)
            v2 = decide(intentional_as_equation_text(eps))
        except TemplateTooLarge:
            continue
        assert v1.valid == v2.valid, text


def intentional_as_equation_text(eps):
    s, rel, t = intentional_as_equation(eps)
    return to_intentional(s, rel, t)[0]


def test_intentional_as_equation_unit():
    eps = intentional("1 <= 1")
    assert intentional_as_equation(eps) == (One(), "<=", One())
    eps = intentional("1 <= x^l \\/ x")
    assert intentional_as_equation(eps)[2] == Join(InvL(Var("x")), Var("x"))
