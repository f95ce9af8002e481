"""Exact decision for canonical systems that contain equations.

Every use of f becomes an integer unknown: ``p = f(L)`` for an integer
linear form L is equivalent to ``w = alpha*L - p`` lying in [0, 1), and
w is exactly the fractional part [alpha*L]. Equations become integer
linear equations, fractional-part atoms become strict inequalities on the
w's. For each choice of which L vanish (then w = 0) the remaining w's
must lie in the open cube.

Solving the integer equations gives X = X0 + B t with t in Z^r, and then
w(t) = a0 + M t where M has entries in Z[alpha]. Let E be the smallest
rational subspace containing the kernel of M over Q(alpha) (the kernel
over R equals the kernel over Q(alpha) because alpha is transcendental).
The closure of M Z^r is M(E) + M Z^r, and M Z^r is discrete modulo
V = M(E). So the closure of the attainable w's is a finite union of
translates a0 + M P t' + V, one per coset t' of the complement lattice.
Each translate meets the open constraint polyhedron iff an exact
Fourier-Motzkin test succeeds, and then the attainable points are dense
in the intersection, so a witness exists. Witnesses are found by
searching the lattice Z^r cap E in shells of growing norm.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .alpha import AlphaPoly, AlphaRat, ceil_value, floor_value, sign_at_alpha
from .beatty import BeattyCtx
from .fm import Ineq, bounds, eliminate, fm_solve, substitute, with_support
from .lattice import (
    alpha_nullspace,
    independent_subset,
    integer_kernel_split,
    integer_rows,
    nullspace,
    rational_rowspace,
    solve_integer,
)
from .normalize import CanonEq, CanonIneq, Leaf, system_holds
from .outcome import NO_WITNESS, SAT, UNSAT, SolveOutcome
from .syntax import System

log = logging.getLogger(__name__)

MAX_COSETS = 200_000
MAX_BRANCHES = 4096
BATCH = 4096


class EngineLimit(RuntimeError):
    pass


@dataclass
class Beatty:
    """succ = f(L), i.e. w = alpha*L - succ lies in [0, 1)."""

    L: dict[str, int]
    succ: str
    label: str


@dataclass
class Purified:
    unknowns: list[str]
    eqs: list[tuple[dict[str, int], int]]
    beatty: list[Beatty]
    ineqs: list[tuple[dict[int, int], AlphaPoly, str]]
    variables: list[str]
    chain_prev: dict[int, int] = field(default_factory=dict)


def _chain_name(var: str, scale: int, k: int) -> str:
    return f"{var}#f{k}" if scale == 1 else f"{var}#{scale}f{k}"


def purify(ctx: BeattyCtx, case: System) -> Purified:
    depth: dict[tuple[str, int], int] = {}

    def need(lf: Leaf, extra: int):
        key = (lf.var, lf.scale)
        depth[key] = max(depth.get(key, 0), lf.power + extra)

    for a in case.atoms:
        if isinstance(a, CanonEq):
            for lf, _ in a.form.terms:
                need(lf, 0)
        elif isinstance(a, CanonIneq):
            for lf, _ in a.lhs:
                need(lf, 1)
        else:
            raise TypeError(f"not a canonical atom: {a}")
    chains = sorted(depth, key=lambda k: (case.variables.index(k[0]) if k[0] in case.variables else 0, k))
    unknowns: list[str] = []
    for var, scale in chains:
        for k in range(1, depth[(var, scale)] + 1):
            unknowns.append(_chain_name(var, scale, k))
    # original variables last, so chain unknowns become the bounded coordinates
    unknowns += list(case.variables)

    def value(lf: Leaf) -> dict[str, int]:
        if lf.power == 0:
            return {lf.var: lf.scale}
        return {_chain_name(lf.var, lf.scale, lf.power): 1}

    beatty: list[Beatty] = []
    index: dict[tuple[str, int, int], int] = {}
    prev: dict[int, int] = {}
    for var, scale in chains:
        for k in range(depth[(var, scale)]):
            lf = Leaf(var, scale, k)
            index[(var, scale, k)] = len(beatty)
            if k:
                prev[len(beatty)] = index[(var, scale, k - 1)]
            beatty.append(Beatty(value(lf), _chain_name(var, scale, k + 1), f"frac({lf})"))
    eqs, ineqs = [], []
    for a in case.atoms:
        if isinstance(a, CanonEq):
            d: dict[str, int] = {}
            for lf, c in a.form.terms:
                for u, v in value(lf).items():
                    d[u] = d.get(u, 0) + c * v
            eqs.append(({u: v for u, v in d.items() if v}, -a.form.const))
        else:
            co: dict[int, int] = {}
            for lf, c in a.lhs:
                j = index[(lf.var, lf.scale, lf.power)]
                co[j] = co.get(j, 0) + c
            ineqs.append(({j: v for j, v in co.items() if v}, a.rhs_value(ctx), str(a)))
    return Purified(unknowns, eqs, beatty, ineqs, list(case.variables), prev)


# lattice bookkeeping ------------------------------------------------------------------------


def _matrix(pur: Purified, eqs):
    n = len(pur.unknowns)
    pos = {u: i for i, u in enumerate(pur.unknowns)}
    C = []
    d = []
    for co, rhs in eqs:
        row = [0] * n
        for u, v in co.items():
            row[pos[u]] += v
        C.append(row)
        d.append(rhs)
    return C, d


def _form_vec(pur: Purified, form: dict[str, int]) -> list[int]:
    pos = {u: i for i, u in enumerate(pur.unknowns)}
    v = [0] * len(pur.unknowns)
    for u, c in form.items():
        v[pos[u]] += c
    return v


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


@dataclass
class Branch:
    zero: frozenset[int]
    X0: list[int]
    B: list[list[int]]  # basis columns

    def describe(self, pur: Purified) -> str:
        if not self.zero:
            return "all f-arguments nonzero"
        return "zero: " + ", ".join(pur.beatty[j].label for j in sorted(self.zero))


def branches(ctx: BeattyCtx, pur: Purified):
    """Zero/nonzero choices for every f-argument that leave a solvable integer system."""
    n = len(pur.unknowns)
    alpha_big = ctx.alpha_floor >= 1
    base = solve_integer(*_matrix(pur, pur.eqs), n)
    if base is None:
        return
    Lvec = [_form_vec(pur, b.L) for b in pur.beatty]
    count = 0

    def walk(j, eqs, lat, zero):
        nonlocal count
        if j == len(pur.beatty):
            count += 1
            if count > MAX_BRANCHES:
                raise EngineLimit(f"more than {MAX_BRANCHES} zero patterns")
            yield Branch(frozenset(zero), lat[0], lat[1])
            return
        X0, B = lat
        prev = pur.chain_prev.get(j)
        prev_zero = prev is not None and prev in zero
        prev_nonzero = prev is not None and prev not in zero
        # nonzero: L must not vanish identically on the lattice
        if not prev_zero and (_dot(Lvec[j], X0) != 0 or any(_dot(Lvec[j], col) for col in B)):
            yield from walk(j + 1, eqs, lat, zero)
        if alpha_big and prev_nonzero:
            return
        new_eqs = eqs + [(pur.beatty[j].L, 0), ({pur.beatty[j].succ: 1}, 0)]
        got = solve_integer(*_matrix(pur, new_eqs), n)
        if got is not None:
            yield from walk(j + 1, new_eqs, got, zero | {j})

    yield from walk(0, list(pur.eqs), base, frozenset())


# closure analysis -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    """A Fourier-Motzkin variable: an integer coset coordinate or a real V coordinate."""

    kind: str
    index: int

    def sort_key(self):
        return (1, self.kind, self.index)

    def __str__(self):
        return f"{self.kind}{self.index}"


@dataclass
class CosetRelaxation:
    """One translate a0 + M P t' + V of the closure, with its constraints."""

    branch: Branch
    tprime: tuple[int, ...]
    rows: list  # (coeffs over nonzero w indices, rhs) in w-space
    nz: list[int]
    wc: list[AlphaPoly]             # a0 + M P t'
    ME: list[list[AlphaPoly]]       # rows nz x columns of E-basis
    P: list[list[int]]
    Ebasis: list[list[int]]
    bounded: list[int]
    ineqs: list[Ineq]               # over Param('c', b) for bounded b
    sample: dict | None = None

    @property
    def feasible(self) -> bool:
        return self.sample is not None


def _poly_lcm(a: AlphaPoly, b: AlphaPoly) -> AlphaPoly:
    return (a * b).divmod(a.gcd(b))[0]


def _rational_hull(kernel: list[list[AlphaRat]], r: int) -> list[list[Fraction]]:
    coeff_vecs = []
    for vec in kernel:
        den = AlphaPoly.const(1)
        for x in vec:
            den = _poly_lcm(den, x.den)
        polys = [x.num * den.divmod(x.den)[0] for x in vec]
        deg = max((p.degree for p in polys), default=-1)
        for d in range(deg + 1):
            coeff_vecs.append([p.coeff(d) for p in polys])
    return rational_rowspace(coeff_vecs)


class Analysis:
    """The closure decomposition of one branch."""

    def __init__(self, ctx: BeattyCtx, pur: Purified, br: Branch):
        self.ctx, self.pur, self.br = ctx, pur, br
        p = ctx.provider
        self.nz = [j for j in range(len(pur.beatty)) if j not in br.zero]
        r = len(br.B)
        self.r = r
        Lvec = [_form_vec(pur, b.L) for b in pur.beatty]
        spos = {u: i for i, u in enumerate(pur.unknowns)}
        self.a0, self.M = [], []
        for j in self.nz:
            b = pur.beatty[j]
            s = spos[b.succ]
            self.a0.append(AlphaPoly.linear(_dot(Lvec[j], br.X0), -br.X0[s]))
            self.M.append([AlphaPoly.linear(_dot(Lvec[j], col), -col[s]) for col in br.B])
        # constraint rows in w-space: (coeffs by position in nz, rhs, label)
        pos = {j: i for i, j in enumerate(self.nz)}
        self.rows = []
        for i in range(len(self.nz)):
            self.rows.append(({i: Fraction(-1)}, AlphaPoly(), f"w{i} > 0"))
            self.rows.append(({i: Fraction(1)}, AlphaPoly.const(1), f"w{i} < 1"))
        self.closed_false = None
        for co, rhs, label in pur.ineqs:
            d = {pos[j]: Fraction(c) for j, c in co.items() if j in pos}
            if not d:
                if sign_at_alpha(rhs, p) <= 0:
                    self.closed_false = label
                continue
            self.rows.append((d, rhs, label))
        # kernel, rational hull and the complement lattice
        if r and self.nz:
            kernel = alpha_nullspace([[AlphaRat(x) for x in row] for row in self.M], r)
        else:
            kernel = [[AlphaRat(int(i == j)) for i in range(r)] for j in range(r)]
        E = _rational_hull(kernel, r)
        self.dE = len(E)
        if self.dE == r:
            L_E = []
        elif self.dE == 0:
            L_E = [[int(i == j) for j in range(r)] for i in range(r)]
        else:
            L_E = integer_rows(nullspace(E, r))
        self.P, self.Ebasis = integer_kernel_split(L_E, r)
        self.MP = [[sum((row[i] * col[i] for i in range(r)), AlphaPoly()) for col in self.P] for row in self.M]
        self.ME = [[sum((row[i] * col[i] for i in range(r)), AlphaPoly()) for col in self.Ebasis]
                   for row in self.M]
        cols = [[AlphaRat(self.ME[i][b]) for i in range(len(self.nz))] for b in range(len(self.Ebasis))]
        self.bounded = independent_subset(cols) if self.nz else []

    # Fourier-Motzkin system over (t', c) ------------------------------------------------

    def param_ineqs(self) -> list[Ineq]:
        out = []
        for co, rhs, label in self.rows:
            d: dict = {}
            const = AlphaPoly.lift(rhs)
            for i, a in co.items():
                const = const - self.a0[i] * a
                for k in range(len(self.P)):
                    d[Param("t", k)] = d.get(Param("t", k), AlphaPoly()) + self.MP[i][k] * a
                for b in self.bounded:
                    d[Param("c", b)] = d.get(Param("c", b), AlphaPoly()) + self.ME[i][b] * a
            out.append(Ineq.build({k: AlphaRat(v) for k, v in d.items()}, AlphaRat(const), label))
        return out

    def cosets(self):
        """Feasible coset relaxations, in lexicographic order of t'."""
        p = self.ctx.provider
        if self.closed_false is not None:
            return
        base = self.param_ineqs()
        cvars = [Param("c", b) for b in self.bounded]
        tvars = [Param("t", k) for k in range(len(self.P))]
        proj = with_support(base)
        step = 0
        for v in cvars:
            proj = eliminate(proj, v, p, step)
            step += 1
        # stages[k] mentions t_0..t_k only
        stages = [None] * len(tvars)
        cur = proj
        for k in range(len(tvars) - 1, -1, -1):
            stages[k] = cur
            cur = eliminate(cur, tvars[k], p, step)
            step += 1
        if any(not q.coeffs and sign_at_alpha(q.rhs, p) <= 0 for q in cur):
            return
        count = 0

        def walk(k, fixed):
            nonlocal count
            if k == len(tvars):
                count += 1
                if count > MAX_COSETS:
                    raise EngineLimit(f"more than {MAX_COSETS} cosets")
                yield tuple(fixed)
                return
            sys_k = stages[k]
            for i, val in enumerate(fixed):
                sys_k = substitute(sys_k, tvars[i], val)
            if any(not q.coeffs and sign_at_alpha(q.rhs, p) <= 0 for q in sys_k):
                return
            lowers, uppers = bounds(sys_k, tvars[k], p)
            if not lowers or not uppers:
                raise EngineLimit("coset coordinate is unbounded")
            lo = max(floor_value(v, p) for v in lowers) + 1
            hi = min(ceil_value(v, p) for v in uppers) - 1
            for val in range(lo, hi + 1):
                yield from walk(k + 1, fixed + [val])

        for tp in walk(0, []):
            sys_c = base
            for i, val in enumerate(tp):
                sys_c = substitute(sys_c, tvars[i], val)
            res = fm_solve(sys_c, cvars, p)
            if not res.feasible:
                continue
            wc = [self.a0[i] + sum((self.MP[i][k] * tp[k] for k in range(len(tp))), AlphaPoly())
                  for i in range(len(self.nz))]
            yield CosetRelaxation(self.br, tp, self.rows, self.nz, wc, self.ME, self.P, self.Ebasis,
                                  self.bounded, sys_c, res.sample)


# witness search -------------------------------------------------------------------------


def _ordered(R: int) -> list[int]:
    return sorted(range(-R, R + 1), key=lambda v: (abs(v), v < 0))


def _shell_at(dim: int, R: int):
    """Vectors with max-norm exactly R, in a fixed order."""
    if dim == 1:
        yield from ((R,), (-R,)) if R else ((0,),)
        return
    vals = _ordered(R)
    for v in vals:
        if abs(v) == R:
            for tail in itertools.product(vals, repeat=dim - 1):
                yield (v,) + tail
        else:
            for tail in _shell_at(dim - 1, R):
                yield (v,) + tail


def _shell(dim: int):
    """Integer vectors in order of growing max-norm: 0, 1, -1, 2, -2, ... per coordinate."""
    if dim == 0:
        yield ()
        return
    R = 0
    while True:
        yield from _shell_at(dim, R)
        R += 1


def _components(cr: "CosetRelaxation"):
    """Independent blocks: w indices and E-columns linked by ME entries or by a shared row.

    Returns (columns, w indices, rows) per block, in order of first w index.
    """
    n, ncols = len(cr.nz), len(cr.Ebasis)
    parent = list(range(n + ncols))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for i in range(n):
        for b in range(ncols):
            if not cr.ME[i][b].is_zero():
                union(i, n + b)
    for co, _, _ in cr.rows:
        idx = sorted(co)
        for i in idx[1:]:
            union(idx[0], i)
    groups: dict[int, tuple[list[int], list[int], list]] = {}
    for i in range(n):
        groups.setdefault(find(i), ([], [], []))[1].append(i)
    for b in range(ncols):
        root = find(n + b)
        if root in groups:
            groups[root][0].append(b)
    for row in cr.rows:
        groups[find(min(row[0]))][2].append(row)
    return [groups[k] for k in sorted(groups)]


class CosetSearch:
    """Integer points of one coset whose image satisfies every constraint row.

    Free E-coordinates run through shells of growing max-norm; for each
    one, the bounded coordinates range over the integer points whose image
    stays in the unit cube on an invertible subset of rows. Candidates are
    screened in floating point and confirmed exactly.
    """

    def __init__(self, ctx: BeattyCtx, cr: CosetRelaxation):
        self.ctx, self.cr = ctx, cr
        a = float(ctx.alpha_float)
        self.wc_f = np.array([float(x.coeff(0)) + float(x.coeff(1)) * a for x in cr.wc])
        self.ME_f = np.array([[float(x.coeff(0)) + float(x.coeff(1)) * a for x in row] for row in cr.ME]) \
            if cr.ME and cr.ME[0] else np.zeros((len(cr.nz), 0))

    def _exact_ok(self, idx, rows, s: dict[int, int]) -> bool:
        p = self.ctx.provider
        w = {i: self.cr.wc[i] + sum((self.cr.ME[i][b] * k for b, k in s.items()), AlphaPoly()) for i in idx}
        for co, rhs, _ in rows:
            lhs = sum((w[i] * c for i, c in co.items()), AlphaPoly())
            if sign_at_alpha(AlphaPoly.lift(rhs) - lhs, p) <= 0:
                return False
        return True

    def component(self, cols, idx, rows, budget: int):
        if not cols:
            return {} if self._exact_ok(idx, rows, {}) else None
        cr = self.cr
        a = float(self.ctx.alpha_float)
        pos = {i: k for k, i in enumerate(idx)}
        R = np.zeros((len(rows), len(idx)))
        for r, (co, _, _) in enumerate(rows):
            for i, c in co.items():
                R[r, pos[i]] = float(c)
        rhs = np.array([float(AlphaPoly.lift(h).coeff(0)) + float(AlphaPoly.lift(h).coeff(1)) * a
                        for _, h, _ in rows])
        tol = 1e-9 * (1 + np.abs(rhs))
        bnd = [b for b in cols if b in cr.bounded]
        free = [b for b in cols if b not in cr.bounded]
        wc = self.wc_f[idx]
        Fm = self.ME_f[np.ix_(idx, free)] if free else np.zeros((len(idx), 0))
        if bnd:
            G = [[AlphaRat(cr.ME[i][b]) for b in bnd] for i in idx]
            sel = independent_subset(G)[:len(bnd)]
            Ginv = np.linalg.inv(self.ME_f[np.ix_([idx[k] for k in sel], bnd)])
            rad = np.abs(Ginv) @ np.full(len(sel), 0.5)
            Bm = self.ME_f[np.ix_(idx, bnd)]
        shell = _shell(len(free))
        tried = 0
        while tried < budget:
            batch = list(itertools.islice(shell, min(BATCH, budget - tried)))
            if not batch:
                return None
            tried += len(batch)
            S = np.array(batch, dtype=float).reshape(len(batch), len(free))
            Y = wc[None, :] + S @ Fm.T
            if not bnd:
                ok = np.all(Y @ R.T < rhs + tol, axis=1)
                for k in np.flatnonzero(ok):
                    sol = dict(zip(free, batch[k]))
                    if self._exact_ok(idx, rows, sol):
                        return sol
                continue
            centre = (0.5 - Y[:, sel]) @ Ginv.T
            lo_i = np.ceil(centre - rad - 1e-7).astype(np.int64)
            hi_i = np.floor(centre + rad + 1e-7).astype(np.int64)
            for k in np.flatnonzero(np.all(lo_i <= hi_i, axis=1)):
                axes = [np.arange(l, h + 1) for l, h in zip(lo_i[k], hi_i[k])]
                C = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(bnd))
                tried += len(C) - 1
                V = Y[k][None, :] + C.astype(float) @ Bm.T
                ok = np.all(V @ R.T < rhs + tol, axis=1)
                for c in np.flatnonzero(ok):
                    sol = dict(zip(free, batch[k]))
                    sol.update(zip(bnd, (int(v) for v in C[c])))
                    if self._exact_ok(idx, rows, sol):
                        return sol
        return None

    def run(self, budget: int):
        cr = self.cr
        s: dict[int, int] = {}
        for cols, idx, rows in _components(cr):
            got = self.component(cols, idx, rows, budget)
            if got is None:
                return None
            s.update(got)
        r = len(cr.branch.B)
        t = [0] * r
        for k, val in enumerate(cr.tprime):
            for i in range(r):
                t[i] += cr.P[k][i] * val
        for b, val in s.items():
            for i in range(r):
                t[i] += cr.Ebasis[b][i] * val
        X = list(cr.branch.X0)
        for k, col in enumerate(cr.branch.B):
            for i in range(len(X)):
                X[i] += col[i] * t[k]
        return X


def decide(ctx: BeattyCtx, case: System, budget: int, label: str = "lattice") -> SolveOutcome:
    """Decide a canonical case exactly; search for a witness when feasible."""
    pur = purify(ctx, case)
    cert = [f"{label}: {len(pur.unknowns)} integer unknowns, {len(pur.eqs)} equations, "
            f"{len(pur.beatty)} f-constraints"]
    feasible_cosets = 0
    any_branch = False
    for br in branches(ctx, pur):
        any_branch = True
        an = Analysis(ctx, pur, br)
        desc = br.describe(pur)
        if an.closed_false is not None:
            cert.append(f"{desc}: {an.closed_false} fails")
            continue
        n_here = 0
        for cr in an.cosets():
            n_here += 1
            feasible_cosets += 1
            if not cr.nz:
                X = list(br.X0)
            else:
                X = CosetSearch(ctx, cr).run(budget)
            if X is None:
                cert.append(f"{desc}: coset {cr.tprime} feasible, search budget {budget} exhausted")
                continue
            env = {v: X[pur.unknowns.index(v)] for v in pur.variables}
            if not system_holds(ctx, case, env):
                raise AssertionError(f"engine witness {env} fails verification")
            cert.append(f"{desc}: lattice rank {an.r}, closure dimension {an.dE}, "
                        f"coset {cr.tprime} feasible; witness found")
            return SolveOutcome(SAT, env, 1, cert, ctx.precision_bits)
        if not n_here:
            cert.append(f"{desc}: lattice rank {an.r}, closure dimension {an.dE}, no coset meets the constraints")
    if not any_branch:
        cert.append("integer equations have no solution")
    if feasible_cosets:
        return SolveOutcome(NO_WITNESS, None, 1, cert, ctx.precision_bits)
    return SolveOutcome(UNSAT, None, 1, cert, ctx.precision_bits)


def coset_relaxations(ctx: BeattyCtx, case: System) -> list[CosetRelaxation]:
    """Every feasible translate of the closure, over all zero patterns."""
    pur = purify(ctx, case)
    out = []
    for br in branches(ctx, pur):
        out.extend(Analysis(ctx, pur, br).cosets())
    return out
