"""Small exact linear algebra: integer lattices, rationals and Q(alpha).

Matrices are lists of rows. Sizes here are tiny (a handful of unknowns),
so plain Python integers and Fractions are used throughout.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .alpha import AlphaRat


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def column(mat, j):
    return [row[j] for row in mat]


def matvec(mat, vec):
    return [sum(a * b for a, b in zip(row, vec)) for row in mat]


def matmul(a, b):
    if not a:
        return []
    cols = len(b[0]) if b else 0
    return [[sum(row[k] * b[k][j] for k in range(len(b))) for j in range(cols)] for row in a]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def column_hnf(A: list[list[int]], ncols: int) -> tuple[list[list[int]], list[list[int]], int]:
    """Column echelon form H = A U with U unimodular.

    The first ``rank`` columns of H carry the pivots; the remaining columns
    of H are zero, so the last ``ncols - rank`` columns of U form a basis of
    the integer kernel of A.
    """
    H = [list(r) for r in A]
    U = identity(ncols)
    k = 0
    for i in range(len(H)):
        if k >= ncols:
            break
        row = H[i]
        for j in range(k + 1, ncols):
            if row[j] == 0:
                continue
            a, b = row[k], row[j]
            g, x, y = _xgcd(a, b)
            # [col_k, col_j] <- [x col_k + y col_j, -(b/g) col_k + (a/g) col_j]
            p, q = -(b // g), a // g
            for M in (H, U):
                for r in M:
                    ck, cj = r[k], r[j]
                    r[k], r[j] = x * ck + y * cj, p * ck + q * cj
        if row[k] != 0:
            if row[k] < 0:
                for M in (H, U):
                    for r in M:
                        r[k] = -r[k]
            # reduce earlier entries of this row modulo the pivot
            for j in range(k):
                if row[j] and row[k]:
                    qt = row[j] // row[k]
                    if qt:
                        for M in (H, U):
                            for r in M:
                                r[j] -= qt * r[k]
            k += 1
    return H, U, k


def solve_integer(C: list[list[int]], d: list[int], n: int):
    """All integer X with C X = d as (X0, B): X = X0 + B t, t integer.

    B is a list of basis columns. Returns None when there is no solution.
    """
    if not C:
        return [0] * n, [[int(i == j) for i in range(n)] for j in range(n)]
    H, U, rank = column_hnf(C, n)
    y = [0] * n
    col = 0
    for i, row in enumerate(H):
        acc = d[i] - sum(row[j] * y[j] for j in range(col))
        if col < rank and row[col] != 0:
            if acc % row[col]:
                return None
            y[col] = acc // row[col]
            col += 1
        elif acc != 0:
            return None
    X0 = [sum(U[r][j] * y[j] for j in range(rank)) for r in range(n)]
    B = [[U[r][j] for r in range(n)] for j in range(rank, n)]
    return X0, B


def integer_kernel_split(L: list[list[int]], n: int) -> tuple[list[list[int]], list[list[int]]]:
    """(complement, kernel): column lists with Z^n = span(complement) + span(kernel).

    The kernel columns are a basis of {t in Z^n : L t = 0}.
    """
    if not L:
        return [], [[int(i == j) for i in range(n)] for j in range(n)]
    _, U, rank = column_hnf(L, n)
    cols = [[U[r][j] for r in range(n)] for j in range(n)]
    return cols[:rank], cols[rank:]


# rational linear algebra -----------------------------------------------------------------------


def rref(rows, zero=lambda x: x == 0):
    """Reduced row echelon form over a field; returns (rows, pivot columns)."""
    M = [list(r) for r in rows]
    pivots = []
    if not M:
        return M, pivots
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if not zero(M[i][c])), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and not zero(M[i][c]):
                fac = M[i][c]
                M[i] = [a - fac * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def nullspace(rows, ncols: int, zero=lambda x: x == 0, one=Fraction(1), nil=Fraction(0)):
    """Basis of {v : rows v = 0} over a field."""
    R, pivots = rref(rows, zero) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [nil] * ncols
        v[fcol] = one
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fcol]
        basis.append(v)
    return basis


def rational_rowspace(vectors) -> list[list[Fraction]]:
    vs = [[Fraction(x) for x in v] for v in vectors if any(v)]
    if not vs:
        return []
    R, _ = rref(vs)
    return R


def integer_rows(rows) -> list[list[int]]:
    out = []
    for r in rows:
        den = 1
        for x in r:
            den = lcm(den, Fraction(x).denominator)
        out.append([int(Fraction(x) * den) for x in r])
    return out


def _rat_zero(x: AlphaRat) -> bool:
    return x.is_zero()


def alpha_nullspace(rows: list[list[AlphaRat]], ncols: int) -> list[list[AlphaRat]]:
    """Kernel over Q(alpha), alpha treated as an indeterminate."""
    return nullspace(rows, ncols, zero=_rat_zero, one=AlphaRat(1), nil=AlphaRat(0))


def alpha_rank(vectors: list[list[AlphaRat]]) -> int:
    vs = [v for v in vectors if any(not x.is_zero() for x in v)]
    if not vs:
        return 0
    return len(rref(vs, zero=_rat_zero)[0])


def independent_subset(vectors: list[list[AlphaRat]]) -> list[int]:
    """Indices of a maximal linearly independent subfamily, chosen greedily in order."""
    chosen: list[int] = []
    basis: list[list[AlphaRat]] = []
    for i, v in enumerate(vectors):
        if all(x.is_zero() for x in v):
            continue
        trial = basis + [v]
        if len(rref(trial, zero=_rat_zero)[0]) == len(trial):
            basis = trial
            chosen.append(i)
    return chosen
