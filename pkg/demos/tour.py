"""Walk through the solver on a few systems and check each witness by hand.

    python3 demos/tour.py
"""

from beattysolve import BeattyCtx, brute_check, parse_formula, solve

ctx = BeattyCtx.named("pi")

SYSTEMS = [
    "f(x) = 354",
    "f(x) + f(y) = 40; frac(x) < frac(y)",
    "f(x + y) = 43; x = 1 mod 2",
    "f(f(x)) - 3*f(x) = 0",
    "f(x) + y = 10; f(y) + x = 10",
    "frac(x) + frac(f(x)) < frac(1); frac(f(x)) > frac(x)",
]

for text in SYSTEMS:
    out = solve(ctx, text)
    print(f"{text}\n  -> {out.status}", end="")
    if out.witness is not None:
        ok = brute_check(ctx, parse_formula(text), out.witness)
        print(f"  {out.witness}  (exact re-check: {ok})", end="")
    print(f"  [{out.cases_explored} case(s)]")
    for line in out.certificate[:3]:
        print(f"     {line}")
