import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import intentional
from dlpg.diagram import CChain, Diagram, PartialFn, reindex
from dlpg.term import parse_equation, parse_term
from dlpg.zfunc import (
    FzFunc,
    compose,
    delta_set,
    dual_residual,
    eval_term,
    falsify,
    finite_inverse_agrees,
    find_failure,
    iterate_inverse,
    join,
    lambda_set,
    meet,
    random_fzfunc,
    residual,
    term_value,
    verify_certificate,
    witness_from_diagram,
)

ID = FzFunc.identity()


@st.composite
def fzfuncs(draw, max_window=16):
    size = draw(st.integers(0, max_window))
    lo = draw(st.integers(-5, 5))
    vals = sorted(draw(st.lists(st.integers(lo - 1, lo + size), min_size=size, max_size=size)))
    return FzFunc.from_points(lo, vals)


def window(*fs):
    lo = min([f.lo for f in fs if not f.is_identity()], default=0)
    hi = max([f.hi for f in fs if not f.is_identity()], default=0)
    return range(lo - 2, hi + 3)


def test_canonical_trim():
    f = FzFunc.from_points(0, [0, 1, 1, 3, 4])
    assert (f.lo, f.hi, f.vals) == (2, 2, (1,))
    assert FzFunc.from_points(5, [5, 6]) == ID
    assert FzFunc.from_mapping({}) == ID


@pytest.mark.parametrize("vals", [[2, 1], [0, 5], [-1, 3]])
def test_rejects_non_monotone(vals):
    with pytest.raises(ValueError):
        FzFunc.from_points(1, vals)


def test_json_round_trip(plateau_map):
    data = plateau_map.to_json("x")
    # fixed points at the window ends are trimmed
    assert data == {"name": "x", "lo": 4, "hi": 8, "vals": [3, 6, 6, 6, 9]}
    assert FzFunc.from_json(data) == plateau_map


def test_composition_and_lattice_ops(gap_map, plateau_map):
    assert compose(ID, gap_map) == gap_map
    assert compose(gap_map, gap_map)(7) == 5
    assert meet(gap_map, gap_map) == gap_map
    assert meet(ID, plateau_map)(7) == 6
    assert join(ID, plateau_map)(7) == 7


def test_residuals_of_gap_map(gap_map):
    fl = dual_residual(gap_map)
    assert [fl(n) for n in (3, 4, 5, 6, 7)] == [4, 4, 4, 8, 8]
    assert residual(ID) == ID
    assert eval_term(parse_term("x^l x"), {"x": gap_map}, 7) == 4


def test_residuals_of_plateau_map(plateau_map):
    fl = dual_residual(plateau_map)
    assert [fl(n) for n in range(4, 10)] == [5, 5, 5, 8, 8, 8]
    assert fl(plateau_map(7)) == 5
    assert residual(plateau_map)(7) == 7
    assert eval_term(parse_term("x^l x"), {"x": plateau_map}, 7) == 5


def test_iterate_inverse_zero(gap_map):
    assert iterate_inverse(gap_map, 0) == gap_map


def test_eval_unit():
    assert eval_term(parse_term("1"), {}, 42) == 42


@settings(max_examples=200, deadline=None)
@given(fzfuncs())
def test_galois_connections(f):
    fr, fl = residual(f), dual_residual(f)
    pts = window(f)
    for a in pts:
        for b in pts:
            assert (f(a) <= b) == (a <= fr(b))
            assert (a <= f(b)) == (fl(a) <= b)


@settings(max_examples=200, deadline=None)
@given(fzfuncs())
def test_composition_identities(f):
    fr, fl = residual(f), dual_residual(f)
    assert compose(fl, compose(f, fl)) == fl
    assert compose(fr, compose(f, fr)) == fr
    assert compose(f, compose(fl, f)) == f
    assert compose(f, compose(fr, f)) == f
    assert residual(fl) == f and dual_residual(fr) == f


@settings(max_examples=200, deadline=None)
@given(fzfuncs())
def test_preimage_dichotomy(f):
    fr, fl = residual(f), dual_residual(f)
    pts = window(f)
    image = {f(n) for n in range(pts.start - 3, pts.stop + 3)}
    for a in pts:
        if a in image:
            assert {n for n in pts if f(n) == a} == set(range(fl(a), fr(a) + 1))
        else:
            assert fl(a) == fr(a) + 1
            assert f(fr(a)) < a < f(fl(a))


@settings(max_examples=100, deadline=None)
@given(fzfuncs(), fzfuncs())
def test_pregroup_laws_pointwise(f, g):
    v = {"x": f, "y": g}
    for n in window(f, g):
        assert eval_term(parse_term("x^l x"), v, n) <= n <= eval_term(parse_term("x x^l"), v, n)
        assert eval_term(parse_term("x x^r"), v, n) <= n <= eval_term(parse_term("x^r x"), v, n)
        assert eval_term(parse_term("(x y)^l"), v, n) == eval_term(parse_term("y^l x^l"), v, n)
        assert eval_term(parse_term("(x /\\ y)^r"), v, n) == eval_term(parse_term("x^r \\/ y^r"), v, n)
    if all(f(n) <= g(n) for n in window(f, g)):
        h = compose(f, f)
        assert all(compose(h, f)(n) <= compose(h, g)(n) for n in window(f, g, h))


def test_lambda_and_delta_sets(gap_map):
    assert lambda_set(gap_map, 0, 9) == {9}
    assert lambda_set(gap_map, 1, gap_map(7)) == {3, 4}
    assert delta_set(gap_map, 1, 5) == {5, 4, 3, 2}


def test_agreement_on_random_triples():
    rng = np.random.default_rng(8)
    for _ in range(150):
        f = random_fzfunc(rng, int(rng.integers(1, 9)), lo=int(rng.integers(-3, 3)))
        m = int(rng.integers(-2, 3))
        a = int(rng.integers(f.lo - 2, f.hi + 3)) if not f.is_identity() else 0
        finite, direct = finite_inverse_agrees(f, m, a)
        assert finite == direct


def test_random_fzfunc_shape():
    assert random_fzfunc(0, 0) == ID
    for seed in range(50):
        f = random_fzfunc(seed, 10, lo=4)
        assert f.is_identity() or (4 <= f.lo and f.hi <= 13)


def test_witness_for_plateau_diagram(plateau_map):
    d, labels = reindex(range(3, 10), [(a, a + 1) for a in range(3, 9)], [{4: 3, 5: 6, 7: 6}], ["x"])
    (f,) = witness_from_diagram(d, shift=labels[0] - 1)
    assert f == plateau_map
    assert verify_certificate(intentional("1 <= x^l x"), [f], 7)


def test_witness_of_empty_function_is_identity():
    assert witness_from_diagram(Diagram(CChain(1), (PartialFn(),))) == [ID]


def test_witness_for_sparse_diagram():
    d, labels = reindex([2, 3, 4, 5, 7], [(3, 4)], [{3: 2, 4: 5, 7: 5}], ["x"])
    f = witness_from_diagram(d)
    p = labels.index(7) + 1
    assert eval_term(parse_term("x^l x"), {"x": f[0]}, p) < p


def test_witness_agreement_on_random_diagrams():
    rng = random.Random(1)
    for _ in range(200):
        q = rng.randrange(1, 8)
        dom = sorted(rng.sample(range(1, q + 1), rng.randrange(0, q + 1)))
        vals = sorted(rng.randrange(1, q + 1) for _ in dom)
        chain = CChain(q, frozenset((a, a + 1) for a in range(1, q) if rng.random() < 0.6))
        d = Diagram(chain, (PartialFn.of(dict(zip(dom, vals))),))
        (f,) = witness_from_diagram(d)
        for m in range(-3, 4):
            fm = iterate_inverse(f, m)
            for a, b in d.power(0, m).items:
                assert fm(a) == b


def test_verify_certificate_rejects_trivial():
    assert not verify_certificate(intentional("1 <= 1"), [], 0)


def test_falsify():
    s, rel, t = parse_equation("1 <= x^l x")
    found = falsify(s, rel, t, budget=200, seed=0)
    assert found is not None
    v, p = found
    assert find_failure(s, rel, t, v) == p
    assert term_value(parse_term("x^l x"), v)(p) < p
    assert falsify(*parse_equation("1 <= x x^l"), budget=500, seed=0) is None
