from fractions import Fraction

import pytest

from beattysolve import AlphaPoly, AlphaRat, BoxVar, Ineq, fm_solve, kronecker_search, parse_formula, solve_nonalg
from beattysolve.nonalg import RealRelaxation, targets_from_sample
from beattysolve.normalize import flatten_floors
from beattysolve.oracle import SearchBox, brute_check, brute_solve
from beattysolve.alpha import sign_at_alpha

from exactlp import strictly_feasible
from fmcases import as_ineqs, corpus

PI_MINUS_3 = AlphaRat(AlphaPoly.linear(1, -3))
FOUR_MINUS_PI = AlphaRat(AlphaPoly.linear(-1, 4))


def test_lp_oracle_sanity():
    assert strictly_feasible([([1], Fraction(1)), ([-1], Fraction(0))], 1)
    assert not strictly_feasible([([1], Fraction(0)), ([-1], Fraction(0))], 1)
    assert not strictly_feasible([([1, 1], Fraction(1)), ([-1, 0], Fraction(-1, 2)), ([0, -1], Fraction(-1, 2))], 2)


@pytest.mark.parametrize("k", range(60))
def test_fm_agrees_with_exact_lp(pi_ctx, k):
    n, rows = corpus(101, 60)[k]
    zs, ineqs = as_ineqs(n, rows)
    res = fm_solve(ineqs, zs, pi_ctx.provider)
    assert res.feasible == strictly_feasible(rows, n)
    if res.feasible:
        for a, b in rows:
            lhs = sum((AlphaRat(c) * res.sample[z] for c, z in zip(a, zs)), AlphaRat(0))
            assert sign_at_alpha(AlphaRat(b) - lhs, pi_ctx.provider) > 0


def test_canonical_refutation(pi_ctx):
    z = BoxVar("x", 0)
    res = fm_solve([Ineq.build({z: 1}, PI_MINUS_3), Ineq.build({z: -1}, -FOUR_MINUS_PI)], [z], pi_ctx.provider)
    assert not res.feasible
    assert "derived 0 < 2*alpha - 7" in res.certificate[1]


def test_targets_from_sample_shapes(pi_ctx):
    z, w = BoxVar("x", 0), BoxVar("y", 0)
    box = [Ineq.build({z: -1}, 0), Ineq.build({z: 1}, 1)]
    r = RealRelaxation([z], box)
    assert targets_from_sample(pi_ctx, r, {z: AlphaRat(Fraction(1, 2))}) == {z: (Fraction(1, 4), Fraction(3, 4))}
    r2 = RealRelaxation([z, w], box + [Ineq.build({w: -1}, 0), Ineq.build({w: 1}, 1), Ineq.build({z: 1, w: 1}, 1)])
    got = targets_from_sample(pi_ctx, r2, {z: AlphaRat(Fraction(1, 4)), w: AlphaRat(Fraction(1, 4))})
    assert got == {z: (Fraction(1, 8), Fraction(3, 8)), w: (Fraction(1, 8), Fraction(3, 8))}
    r3 = RealRelaxation([z], box + [Ineq.build({z: 1}, PI_MINUS_3)])
    (lo, hi), = targets_from_sample(pi_ctx, r3, {z: PI_MINUS_3 / 2}).values()
    assert 0 < lo < hi < Fraction(1416, 10000)
    assert lo.denominator & (lo.denominator - 1) == 0


def _first_by_scan(ctx, targets, limit):
    for x in range(1, limit):
        y, ok = x, True
        for lv in range(max(targets) + 1):
            if lv in targets and not ctx.frac_between(y, *targets[lv]):
                ok = False
                break
            y = ctx.floor_mul(y)
        if ok:
            return x


@pytest.mark.parametrize("targets", [
    {0: (Fraction(0), Fraction(1, 5)), 1: (Fraction(1, 2), Fraction(1))},
    {0: (Fraction(1, 2), Fraction(3, 5)), 1: (Fraction(0), Fraction(1, 4))},
    {1: (Fraction(9, 10), Fraction(19, 20))},
])
def test_kronecker_first_hit_matches_scan(pi_ctx, targets):
    assert kronecker_search(pi_ctx, "x", targets, 10 ** 5) == _first_by_scan(pi_ctx, targets, 10 ** 4)


def test_kronecker_known_first_hit(pi_ctx):
    # the first x >= 1 in the scan order; x = 15 is also a hit
    t = {0: (Fraction(0), Fraction(1, 5)), 1: (Fraction(1, 2), Fraction(1))}
    assert kronecker_search(pi_ctx, "x", t) == 8


@pytest.mark.parametrize("text", [
    "frac(x) < frac(y); frac(y) < frac(f(x))",
    "2*frac(x) - frac(f(x)) > 1",
    "frac(x) + frac(y) > frac(3) + 1",
    "3*frac(x) < frac(1); frac(f(x)) > frac(7)",
    "frac(x) - frac(y) > frac(1); frac(y) > frac(2)",
    "frac(x) > frac(1) + 1",
])
def test_nonalg_solver_agrees_with_oracle(pi_ctx, text):
    s = parse_formula(text)
    (case,) = flatten_floors(pi_ctx, s).cases
    out = solve_nonalg(pi_ctx, case)
    sols = brute_solve(pi_ctx, s, SearchBox.uniform(s.variables, 300), first_only=True)
    if sols:
        assert out.status == "sat"
    if out.status == "sat":
        assert brute_check(pi_ctx, s, out.witness)
    else:
        assert out.status == "unsat" and not sols
