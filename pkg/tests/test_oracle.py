import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beattysolve import AlphaPoly, BoxTooLarge, SearchBox, brute_check, brute_solve, parse_formula
from beattysolve.alpha import sign_at_alpha
from beattysolve.oracle import brute_values, positive_at_alpha, vfloor

from randsys import corpus


def test_vfloor_near_integers(pi_ctx):
    # multiples of 113 and 33215 put alpha*v within 1e-4 of an integer
    v = np.array([113 * k for k in range(-3000, 3000)] + [33215 * k for k in range(-300, 300)], dtype=np.int64)
    fl, _, _ = vfloor(pi_ctx, v)
    assert fl.tolist() == [pi_ctx.floor_mul(int(x)) for x in v]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-10 ** 12, 10 ** 12), min_size=1, max_size=200))
def test_vfloor_matches_exact(pi_ctx, xs):
    fl, _, _ = vfloor(pi_ctx, np.array(xs, dtype=np.int64))
    assert fl.tolist() == [pi_ctx.floor_mul(x) for x in xs]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-10 ** 6, 10 ** 6), st.integers(-4 * 10 ** 6, 4 * 10 ** 6)),
                min_size=1, max_size=100))
def test_positive_at_alpha_is_exact(pi_ctx, pairs):
    A = np.array([a for a, _ in pairs], dtype=np.int64)
    B = np.array([b for _, b in pairs], dtype=np.int64)
    got = positive_at_alpha(pi_ctx, A, B).tolist()
    assert got == [sign_at_alpha(AlphaPoly.linear(a, -b), pi_ctx.provider) > 0 for a, b in pairs]


@pytest.mark.parametrize("text", corpus(23, 40))
def test_vectorised_matches_scalar(pi_ctx, text):
    s = parse_formula(text)
    box = SearchBox.uniform(s.variables, 12)
    vec = brute_solve(pi_ctx, s, box)
    axes = [range(lo, hi + 1) for _, lo, hi in box.ranges]
    scalar = [dict(zip(s.variables, p)) for p in itertools.product(*axes)
              if brute_check(pi_ctx, s, dict(zip(s.variables, p)))]
    assert vec == scalar


def test_box_parsing_and_limits(pi_ctx):
    box = SearchBox.parse("x=-3..4, y=0..2")
    assert box.count() == 24 and box.bound_of("y") == (0, 2)
    s = parse_formula("f(x) + y = 3")
    with pytest.raises(BoxTooLarge):
        brute_solve(pi_ctx, s, SearchBox.uniform(s.variables, 10 ** 5), limit=10 ** 6)
    with pytest.raises(ValueError):
        brute_solve(pi_ctx, s, SearchBox.parse("x=0..3"))
    with pytest.raises(ValueError):
        SearchBox.parse("x=3..1")


def test_workers_do_not_change_results(pi_ctx):
    s = parse_formula("f(x) + f(y) = 40; frac(x) < frac(y)")
    box = SearchBox.uniform(s.variables, 1500)
    one = brute_solve(pi_ctx, s, box)
    four = brute_solve(pi_ctx, s, box, workers=4)
    assert one == four and one


def test_brute_values(pi_ctx):
    from beattysolve import parse_term
    table = brute_values(pi_ctx, parse_term("f(x)"), -5, 5)
    assert table[3] == [1] and table[-4] == [-1] and table[0] == [0]
