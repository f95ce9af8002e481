import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beattysolve import AlphaPoly, encode_phi_ni, encode_psi_ell, in_range_floorF, iterate_f
from beattysolve.beatty import ConstAtom, delta_bounds, eval_term, in_range_all, step_bound_K
from beattysolve.oracle import brute_check
from beattysolve.syntax import System, parse_term


def mp_floor_mul(x, name="pi"):
    with mpmath.workprec(300):
        return int(mpmath.floor(getattr(mpmath.mp, name) * x))


@settings(max_examples=300, deadline=None)
@given(st.integers(-10 ** 12, 10 ** 12))
def test_floor_mul_matches_mpmath(pi_ctx, x):
    assert pi_ctx.floor_mul(x) == mp_floor_mul(x)


def test_known_values(pi_ctx, e_ctx):
    assert [pi_ctx.floor_mul(x) for x in range(1, 8)] == [3, 6, 9, 12, 15, 18, 21]
    assert pi_ctx.floor_mul(113) == 354 and pi_ctx.floor_mul(-1) == -4
    assert iterate_f(pi_ctx, 10, 2) == 97
    assert [e_ctx.floor_mul(x) for x in range(1, 5)] == [2, 5, 8, 10]


@settings(max_examples=200, deadline=None)
@given(st.integers(-500, 500), st.integers(-500, 500))
def test_carry_is_zero_or_one(ctx, a, b):
    d = ctx.floor_mul(a + b) - ctx.floor_mul(a) - ctx.floor_mul(b)
    assert d in (0, 1)


def test_frac_between(pi_ctx):
    # frac(pi) = 0.14159..., frac(7 pi) = 0.99114...
    assert pi_ctx.frac_between(1, Fraction(1, 8), Fraction(1, 7))
    assert not pi_ctx.frac_between(7, Fraction(0), Fraction(99, 100))


def test_in_range_floorF(pi_ctx):
    F = AlphaPoly.linear(1, 0)
    for A in range(-200, 200):
        expect = [x for x in range(-100, 100) if pi_ctx.floor_mul(x) == A]
        got = in_range_floorF(pi_ctx, F, A)
        assert got == (expect[0] if expect else None)
    G = AlphaPoly.linear(-1, 1)  # slope 1 - pi < 0
    for A in range(-30, 30):
        # floor((1 - pi) x) = x - f(x) - 1 for x != 0
        brute = [x for x in range(-200, 200) if (x and x - pi_ctx.floor_mul(x) - 1 == A) or (not x and A == 0)]
        assert in_range_all(pi_ctx, G, A) == brute


def test_in_range_small_slope(pi_ctx):
    F = AlphaPoly.linear(1, -3)  # pi - 3 in (0, 1)
    xs = in_range_all(pi_ctx, F, 2)
    assert xs and all(pi_ctx.floor_mul(x) - 3 * x == 2 for x in xs)
    assert pi_ctx.floor_mul(xs[0] - 1) - 3 * (xs[0] - 1) != 2
    assert in_range_floorF(pi_ctx, F, 2) == xs[0]


def test_psi_encoding_matches_definition(pi_ctx):
    rng = random.Random(0)
    cases = [([1], [1], 0), ([2], [1, 1], 0), ([1, 1], [], 1), ([3], [], 1), ([1], [2], -1), ([], [1], 0), ([-1], [], 0)]
    for m, n, ell in cases:
        atom = encode_psi_ell(m, n, ell)
        for _ in range(200):
            a = [rng.randint(-100, 100) for _ in m]
            b = [rng.randint(-100, 100) for _ in n]
            fa = [mpmath.mpf(x) * mpmath.pi - pi_ctx.floor_mul(x) for x in a]
            fb = [mpmath.mpf(x) * mpmath.pi - pi_ctx.floor_mul(x) for x in b]
            expect = sum(c * v for c, v in zip(m, fa)) < sum(c * v for c, v in zip(n, fb)) + ell
            if isinstance(atom, ConstAtom):
                assert atom.value == expect
            else:
                env = {f"a{i + 1}": v for i, v in enumerate(a)} | {f"b{i + 1}": v for i, v in enumerate(b)}
                assert brute_check(pi_ctx, System((atom,)), env) == expect


def test_psi_collapses_only_when_decided():
    assert encode_psi_ell([1], [], 1) == ConstAtom(True)
    assert encode_psi_ell([1], [], 0) == ConstAtom(False)
    # 0 < [alpha b] fails at b = 0, so it is not constant
    assert not isinstance(encode_psi_ell([], [1], 0), ConstAtom)
    assert not isinstance(encode_psi_ell([-1], [], 0), ConstAtom)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_phi_encoding(pi_ctx, n):
    for i in range(n):
        atom = encode_phi_ni(n, i)
        for a in range(-60, 60):
            holds = brute_check(pi_ctx, System((atom,)), {"a": a})
            assert holds == (pi_ctx.floor_mul(n * a) == n * pi_ctx.floor_mul(a) + i)
    with pytest.raises(IndexError):
        encode_phi_ni(n, n)


def test_step_bound_covers_observed_gaps(pi_ctx):
    for text in ("f(x)", "f(f(x))", "f(x) + x", "2*f(x) - x", "f(f(x)) + f(x)"):
        H = parse_term(text)
        K = step_bound_K(pi_ctx, H).K
        vals = [eval_term(pi_ctx, H, {"x": x}) for x in range(-2000, 2000)]
        assert max(abs(b - a) for a, b in zip(vals, vals[1:])) <= K - 1


def test_delta_bounds(pi_ctx):
    d = delta_bounds(pi_ctx, 3)
    for x in range(-300, 300):
        with mpmath.workprec(200):
            for i in range(1, 4):
                err = mpmath.pi ** i * x - iterate_f(pi_ctx, x, i)
                bound = mpmath.mpf(d[i - 1].numerator) / d[i - 1].denominator
                assert 0 <= err < bound
