"""Exact rational simplex used as an independent feasibility oracle.

strictly_feasible(rows) decides whether sum a_j z_j < b holds for every
row (a, b) at some real z >= 0.
"""

from __future__ import annotations

from fractions import Fraction


def _maximize(tableau, basis):
    """Bland's rule simplex on a tableau whose last row is the negated objective."""
    m = len(tableau) - 1
    ncols = len(tableau[0]) - 1
    while True:
        obj = tableau[-1]
        enter = next((j for j in range(ncols) if obj[j] < 0), None)
        if enter is None:
            return obj[-1]
        best = None
        for i in range(m):
            a = tableau[i][enter]
            if a > 0:
                ratio = tableau[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise ArithmeticError("unbounded")
        r = best[1]
        piv = tableau[r][enter]
        tableau[r] = [x / piv for x in tableau[r]]
        for i in range(m + 1):
            if i != r and tableau[i][enter] != 0:
                k = tableau[i][enter]
                tableau[i] = [x - k * y for x, y in zip(tableau[i], tableau[r])]
        basis[r] = enter


def strictly_feasible(rows, nvars: int) -> bool:
    """Maximise the common slack s (capped at 1) of A z + s <= b, z >= 0.

    s is shifted by T so that the origin is a feasible basis; the system is
    strictly feasible exactly when the optimum exceeds T.
    """
    rows = [([Fraction(c) for c in a], Fraction(b)) for a, b in rows]
    T = max([Fraction(0)] + [-b for _, b in rows]) + 1
    cons = [(a + [Fraction(1)], b + T) for a, b in rows]
    cons.append(([Fraction(0)] * nvars + [Fraction(1)], T + 1))
    m = len(cons)
    n = nvars + 1
    tableau = []
    for i, (a, b) in enumerate(cons):
        slack = [Fraction(int(i == k)) for k in range(m)]
        tableau.append(a + slack + [b])
    tableau.append([Fraction(0)] * nvars + [Fraction(-1)] + [Fraction(0)] * m + [Fraction(0)])
    basis = list(range(n, n + m))
    return _maximize(tableau, basis) > T
