"""Seeded random strict systems over box variables 0 < z_i < 1."""

from __future__ import annotations

import random
from fractions import Fraction

from beattysolve import BoxVar, Ineq


def random_rows(rng: random.Random):
    """(n, rows) with rows (coeffs, rhs) meaning sum coeffs[i]*z_i < rhs, box rows included."""
    n = rng.randint(1, 6)
    rows = []
    for i in range(n):
        rows.append(([-int(i == j) for j in range(n)], Fraction(0)))
        rows.append(([int(i == j) for j in range(n)], Fraction(1)))
    for _ in range(rng.randint(1, 5)):
        a = [rng.choice([0, 0, rng.randint(-3, 3)]) for _ in range(n)]
        if not any(a):
            a[rng.randrange(n)] = 1
        rows.append((a, Fraction(rng.randint(-12, 12), rng.randint(1, 6))))
    return n, rows


def as_ineqs(n: int, rows) -> tuple[list[BoxVar], list[Ineq]]:
    zs = [BoxVar("z", i) for i in range(n)]
    return zs, [Ineq.build({zs[i]: c for i, c in enumerate(a) if c}, b, f"row{k}")
                for k, (a, b) in enumerate(rows)]


def corpus(seed: int, count: int):
    rng = random.Random(seed)
    return [random_rows(rng) for _ in range(count)]
