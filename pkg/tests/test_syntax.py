import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beattysolve import BeattyCtx, FormulaSyntaxError, desugar_congruences, flatten_floors, parse_formula, parse_term, pretty
from beattysolve.beatty import eval_term
from beattysolve.normalize import CaseExplosion, system_holds
from beattysolve.oracle import brute_check
from beattysolve.syntax import AlgEq, Cong, NonAlg

from randsys import corpus, random_system

CORPUS = corpus(11, 150)


def test_parse_shapes():
    s = parse_formula("f(x) + f(y) = 40; frac(x) < frac(y)")
    assert isinstance(s.atoms[0], AlgEq) and isinstance(s.atoms[1], NonAlg)
    assert s.variables == ("x", "y")
    c = parse_formula("f(x) = 2 mod 5").atoms[0]
    assert isinstance(c, Cong) and c.modulus == 5


def test_power_notation_and_comments():
    a = parse_term("f^3(x)")
    b = parse_term("f(f(f(x)))")
    ctx = BeattyCtx.named("pi")
    assert all(eval_term(ctx, a, {"x": v}) == eval_term(ctx, b, {"x": v}) for v in range(-50, 50))
    s = parse_formula("# a comment\nf(x) = 31;\n")
    assert len(s.atoms) == 1


@pytest.mark.parametrize("text, line, col", [
    ("f(x = 3", 1, 5),
    ("f(x) = ", 1, 8),
    ("f(x) = 3;\nfrac(x) = 1", 2, 1),
    ("f(x) < 3", 1, 1),
    ("x = 1 mod 0", 1, 11),
    ("f(x) = 3 mod -2", 1, 14),
])
def test_errors_carry_positions(text, line, col):
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula(text)
    assert (info.value.line, info.value.column) == (line, col)


@pytest.mark.parametrize("text", CORPUS)
def test_pretty_round_trip(text):
    s = parse_formula(text)
    assert parse_formula(pretty(s)) == s


@pytest.mark.parametrize("text", ["f(x) = 2 mod 5; x = 3 mod 4", "f(x) + y = 1 mod 3; frac(y) < frac(x)"])
def test_desugared_system_is_equivalent(pi_ctx, text):
    s = parse_formula(text)
    d, wm = desugar_congruences(s)
    assert not any(isinstance(a, Cong) for a in d.atoms)
    images = set()
    for vals in itertools.product(range(-15, 16), repeat=len(d.variables)):
        env = dict(zip(d.variables, vals))
        if brute_check(pi_ctx, d, env):
            orig = wm.apply(env)
            assert brute_check(pi_ctx, s, orig)
            images.add(tuple(orig[v] for v in s.variables))
    assert images
    for vals in itertools.product(range(-3, 4), repeat=len(s.variables)):
        if brute_check(pi_ctx, s, dict(zip(s.variables, vals))):
            assert vals in images


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_flattening_preserves_truth(pi_ctx, seed):
    ctx = pi_ctx
    rng = random.Random(seed)
    s = parse_formula(random_system(rng))
    try:
        cs = flatten_floors(ctx, s)
    except CaseExplosion:
        return
    for _ in range(25):
        env = {v: rng.randint(-300, 300) for v in s.variables}
        expect = brute_check(ctx, s, env)
        got = any(system_holds(ctx, c, env) for c in cs.cases)
        assert got == expect, (str(s), env)


def test_flattened_cases_are_exclusive(pi_ctx):
    s = parse_formula("f(x + f(y)) - 2*f(x) = 3; frac(x + y) < frac(f(y))")
    cs = flatten_floors(pi_ctx, s)
    rng = random.Random(5)
    for _ in range(300):
        env = {"x": rng.randint(-500, 500), "y": rng.randint(-500, 500)}
        assert sum(system_holds(pi_ctx, c, env) for c in cs.cases) <= 1


def test_eval_term(pi_ctx):
    assert eval_term(pi_ctx, parse_term("f(f(x)) + 2*x"), {"x": 10}) == 97 + 20
    assert eval_term(pi_ctx, parse_term("f(-x)"), {"x": 1}) == -4

