"""Kronecker witnesses, congruence pairs and progressions for pi and e.

    python3 demos/witnesses.py
"""

from fractions import Fraction as Q

from beattysolve import BeattyCtx, find_progression, kronecker_search, parse_term, solve_congruence_pair

for name in ("pi", "e"):
    ctx = BeattyCtx.named(name)
    print(f"alpha = {name}")
    targets = {0: (Q(1, 2), Q(3, 5)), 1: (Q(0), Q(1, 4))}
    x = kronecker_search(ctx, "x", targets, 10 ** 6)
    print(f"  frac(alpha*x) in (1/2,3/5), frac(alpha*f(x)) in (0,1/4): x = {x}")
    for m, i, n, j in ((2, 1, 3, 0), (7, 3, 11, 5), (12, 0, 12, 11)):
        print(f"  x = {i} mod {m}, f(x) = {j} mod {n}: least x = {solve_congruence_pair(ctx, m, i, n, j)}")
    for text, n in (("f(x)", 6), ("f(x) + f(f(x))", 3)):
        pr = find_progression(ctx, parse_term(text), n)
        print(f"  {text} takes {pr.start} + {pr.step}*l at x = {pr.x} + l*{pr.y}, l = 0..{n}")
