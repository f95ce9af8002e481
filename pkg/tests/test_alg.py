import itertools

import pytest

from beattysolve import (
    ALL_INTEGERS,
    dependence_classes,
    find_progression,
    parse_formula,
    parse_term,
    solve,
    solve_congruence_pair,
    solve_one_var,
    to_floor_form,
)
from beattysolve.alg import reduce_same_class
from beattysolve.alpha import AlphaPoly, floor_value
from beattysolve.beatty import eval_term
from beattysolve.normalize import flatten_floors
from beattysolve.oracle import SearchBox, brute_check, brute_solve, brute_values, exists_in_box

ONE_VAR = ["f(x)", "f(f(x))", "f(x) + x", "2*f(x) - x", "f(f(x)) + f(x)", "f(2*x) - f(x)", "3*x - f(x)"]


@pytest.mark.parametrize("text", ONE_VAR)
def test_one_var_matches_brute(pi_ctx, text):
    H = parse_term(text)
    table = brute_values(pi_ctx, H, -4000, 4000)
    for A in range(-120, 121):
        assert solve_one_var(pi_ctx, H, A) == table.get(A, [])


def test_one_var_constant_term(pi_ctx):
    assert solve_one_var(pi_ctx, parse_term("x - x"), 0) == ALL_INTEGERS
    assert solve_one_var(pi_ctx, parse_term("x - x"), 1) == []
    with pytest.raises(ValueError):
        solve_one_var(pi_ctx, parse_term("f(3*x) - 3*f(x)"), 1)


def test_floor_form_carries_cover_every_value(pi_ctx):
    (case,) = flatten_floors(pi_ctx, parse_formula("f(f(x)) = 9")).cases
    eq = case.atoms[0]
    forms = to_floor_form(pi_ctx, eq)
    assert [ff.A for ff, _ in forms] == [9 + k for k in range(len(forms))]
    # floor(pi^2 x) - f(f(x)) is one of the enumerated carries for every x
    carries = {ff.A - 9 for ff, _ in forms}
    for x in range(-3000, 3000):
        with_alpha = pi_ctx.floor_mul(pi_ctx.floor_mul(x))
        exact = floor_value(AlphaPoly([0, 0, x]), pi_ctx.provider)
        assert exact - with_alpha in carries


def test_dependence_classes():
    F = AlphaPoly([0, 1])
    classes = dependence_classes([F, F * 2, AlphaPoly([1, 1]), AlphaPoly([-3, -3])])
    assert [c[0] for c in classes] == [[0, 1], [2, 3]]
    assert classes[1][1] == [1, -3]


def test_same_class_values(pi_ctx):
    (case,) = flatten_floors(pi_ctx, parse_formula("f(x) + f(y) = 40")).cases
    values, subcases, _ = reduce_same_class(pi_ctx, case, case.atoms[0])
    # every solution has x + y in the reported range
    sols = brute_solve(pi_ctx, parse_formula("f(x) + f(y) = 40"), SearchBox.uniform(("x", "y"), 200))
    assert {s["x"] + s["y"] for s in sols} <= set(values)
    assert len(subcases) == len(values)


SYSTEMS = [
    ("f(x) + f(y) = 40", "sat"),
    ("f(x) + f(y) = 40; frac(x) < frac(y)", "sat"),
    ("f(x) + f(y) = 41", "unsat"),
    ("f(f(x) + x) = 40", "unsat"),
    ("f(2*x) - 2*f(x) = 2", "unsat"),
    ("f(x) + f(2*y) + y = 100", "sat"),
    ("f(x) = 31", "sat"),
    ("x = 1 mod 2; f(x) = 0 mod 3", "sat"),
    ("f(x + y) = 43", "sat"),
    ("f(x) - 3*x = 0; frac(x) > frac(1)", "sat"),
    ("f(x) + y = 10; f(y) + x = 10", "unsat"),
    ("f(x) - f(y) = 1; x - y = 0", "unsat"),
    ("f(x+y) - f(x) - f(y) = 1; frac(x) < frac(3)", "sat"),
]


@pytest.mark.parametrize("text, verdict", SYSTEMS)
def test_solver_verdicts_against_oracle(pi_ctx, text, verdict):
    s = parse_formula(text)
    out = solve(pi_ctx, s)
    assert out.status == verdict
    if verdict == "sat":
        assert brute_check(pi_ctx, s, out.witness)
    else:
        assert not exists_in_box(pi_ctx, s, 400)


def test_parallel_cases_are_deterministic(pi_ctx):
    text = "f(x+y) - f(x) = 3; frac(x) < frac(y); frac(f(y)) > frac(2)"
    a = solve(pi_ctx, text, workers=1)
    b = solve(pi_ctx, text, workers=4)
    assert (a.status, a.witness, a.certificate) == (b.status, b.witness, b.certificate)


def test_congruence_pairs_agree_with_scan(pi_ctx):
    for m, n in itertools.product(range(2, 6), repeat=2):
        for i, j in itertools.product(range(m), range(n)):
            x = solve_congruence_pair(pi_ctx, m, i, n, j)
            scan = next(x for x in itertools.count(1) if x % m == i and pi_ctx.floor_mul(x) % n == j)
            assert x == scan
    with pytest.raises(ValueError):
        solve_congruence_pair(pi_ctx, 3, 3, 2, 0)


@pytest.mark.parametrize("text, n", [("f(x)", 3), ("f(x)", 6), ("f(f(x)) + f(x)", 2), ("f(f(x)) + f(x)", 3)])
def test_progressions_verify(pi_ctx, text, n):
    h = parse_term(text)
    pr = find_progression(pi_ctx, h, n)
    assert pr is not None and pr.y != 0
    for ell in range(n + 1):
        assert eval_term(pi_ctx, h, {"x": pr.x + ell * pr.y}) == pr.start + ell * pr.step

