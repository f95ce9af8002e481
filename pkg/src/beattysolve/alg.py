"""Systems with algebraic equations: floor forms, routing and the full pipeline.

A canonical equation sum_j H_j(x_j) = A is first read as a floor form
sum_j floor(F_j(alpha) x_j) = A + carries. Each case of a flattened system
is routed by its equations:

* no equation: the fractional-part solver;
* one equation in one variable: finite candidate enumeration;
* one equation whose moduli are rational multiples of each other: the
  combination sum r_j x_j takes finitely many values, one subcase each;
* anything else (independent moduli, several equations, scaled chains):
  the lattice closure engine.

Every witness is verified exactly, and the driver re-verifies it against
the original system before reporting sat.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .alpha import ALPHA, AlphaPoly, AlphaRat, ceil_value, floor_value, is_rational_multiple, sign_at_alpha
from .beatty import BeattyCtx, ConstAtom, delta_bounds, step_bound_K
from .closure import coset_relaxations, decide
from .fm import Ineq
from .nonalg import DEFAULT_BUDGET, BoxVar, is_pure_nonalg, solve_nonalg
from .normalize import (
    DEFAULT_CASE_LIMIT,
    CanonEq,
    CanonIneq,
    CaseSplit,
    Leaf,
    LinForm,
    desugar_congruences,
    flatten_floors,
    linear_form_of,
    substitute_case,
    system_holds,
)
from .outcome import NO_WITNESS, SAT, UNSAT, SolveOutcome
from .syntax import System, Term, parse_formula

log = logging.getLogger(__name__)

ALL_INTEGERS = "all-integers"


# floor forms ------------------------------------------------------------------------------


@dataclass(frozen=True)
class FloorForm:
    """sum_j floor(F_j(alpha) * x_j) = A; ``carries`` records the shift of A per variable."""

    moduli: tuple[tuple[str, AlphaPoly], ...]
    A: int
    carries: tuple[int, ...] = ()

    def __str__(self):
        lhs = " + ".join(f"floor(({F})*{x})" for x, F in self.moduli) or "0"
        return f"{lhs} = {self.A}"


def modulus_of(form: LinForm, var: str) -> AlphaPoly:
    """F with sum of var's terms = F(alpha)*var - (bounded error)."""
    F = AlphaPoly()
    for lf, c in form.terms:
        if lf.var == var:
            F = F + ALPHA ** lf.power * (c * lf.scale)
    return F


def error_range(ctx: BeattyCtx, form: LinForm, var: str) -> tuple[Fraction, Fraction]:
    """lo <= F x - H(x) < hi for the part H of form in var (constant excluded)."""
    lo = hi = Fraction(0)
    depth = max((lf.power for lf, _ in form.terms if lf.var == var), default=0)
    deltas = delta_bounds(ctx, depth) if depth else []
    for lf, c in form.terms:
        if lf.var != var or lf.power == 0:
            continue
        d = deltas[lf.power - 1]
        if c > 0:
            hi += c * d
        else:
            lo += c * d
    return lo, hi


def _telescoped(var: str, scale: int, power: int):
    """alpha^k y - f^k(y) = sum_i alpha^(k-1-i) [alpha f^i(y)], y = scale*var."""
    owner = var if scale == 1 else f"{scale}*{var}"
    return {BoxVar(owner, i): ALPHA ** (power - 1 - i) for i in range(power)}


def to_floor_form(ctx: BeattyCtx, eq: CanonEq) -> list[tuple[FloorForm, list[Ineq]]]:
    """One floor form per carry vector, with the guards pinning the carries.

    The carry of x is floor(F x) - H(x) = floor(error) where the error
    F x - H(x) is a Q(alpha)-combination of fractional parts; the guard
    ``carry <= error < carry + 1`` is returned as strict-or-not inequalities
    over box variables (boundary equality is possible only at x = 0).
    """
    form = eq.form
    variables = form.variables()
    ranges, errs = [], []
    for v in variables:
        lo, hi = error_range(ctx, form, v)
        ranges.append(range(math.floor(lo), math.ceil(hi)))
        err: dict = {}
        for lf, c in form.terms:
            if lf.var == v and lf.power:
                for bv, w in _telescoped(v, lf.scale, lf.power).items():
                    err[bv] = err.get(bv, AlphaPoly()) + w * c
        errs.append(err)
    moduli = tuple((v, modulus_of(form, v)) for v in variables)
    out = []
    for carries in itertools.product(*ranges):
        guards = []
        for v, k, err, rng in zip(variables, carries, errs, ranges):
            if len(rng) == 1:
                continue
            guards.append(Ineq.build({b: -w for b, w in err.items()}, AlphaRat(-k), f"carry of {v} >= {k}"))
            guards.append(Ineq.build(err, AlphaRat(k + 1), f"carry of {v} < {k + 1}"))
        out.append((FloorForm(moduli, -form.const + sum(carries), tuple(carries)), guards))
    return out


def axiom4_constants(ctx: BeattyCtx, H) -> int:
    """Every K consecutive integers meet the range of H."""
    return step_bound_K(ctx, H).K


def dependence_classes(Fs) -> list[tuple[list[int], list[Fraction]]]:
    """Group indices whose moduli are rational multiples; ratios relative to the first member."""
    classes: list[tuple[list[int], list[Fraction]]] = []
    for j, F in enumerate(Fs):
        for members, ratios in classes:
            r = is_rational_multiple(Fs[members[0]], F)
            if r is not None:
                members.append(j)
                ratios.append(Fraction(r))
                break
        else:
            classes.append(([j], [Fraction(1)]))
    return classes


# one variable ----------------------------------------------------------------------------


def one_var_candidates(ctx: BeattyCtx, form: LinForm) -> list[int] | str:
    """All x with form(x) = 0 for a one-variable linear form, ascending.

    Returns ALL_INTEGERS when the form is identically zero.
    """
    p = ctx.provider
    variables = form.variables()
    if not variables:
        return ALL_INTEGERS if form.const == 0 else []
    (var,) = variables
    F = modulus_of(form, var)
    if F.is_zero():
        raise ValueError(f"{form}: modulus is zero, the solution set may be infinite")
    lo, hi = error_range(ctx, form, var)
    A = -form.const
    # F x = A + error with error in [lo, hi)
    Fr = AlphaRat(F)
    a, b = AlphaRat(A + lo) / Fr, AlphaRat(A + hi) / Fr
    if sign_at_alpha(F, p) < 0:
        a, b = b, a
    out = []
    for x in range(ceil_value(a, p), floor_value(b, p) + 1):
        if form.value(ctx, {var: x}) == 0:
            out.append(x)
    return out


def solve_one_var(ctx: BeattyCtx, H: Term, A: int) -> list[int] | str:
    """Every integer x with H(x) = A, ascending (ALL_INTEGERS when H is constantly A)."""
    form = linear_form_of(ctx, H) - LinForm.constant(A)
    if len(form.variables()) > 1:
        raise ValueError("solve_one_var needs a term in one variable")
    return one_var_candidates(ctx, form)


# routes ------------------------------------------------------------------------------------


def _equations(case: System) -> list[CanonEq]:
    return [a for a in case.atoms if isinstance(a, CanonEq)]


def _merge(outcomes: list[SolveOutcome], ctx: BeattyCtx, header: list[str]) -> SolveOutcome:
    """Canonical-order combination: first sat wins, unsat needs every part refuted."""
    cert = list(header)
    explored = 0
    pending = False
    for k, o in enumerate(outcomes):
        explored += o.cases_explored
        cert += [f"  [{k}] {line}" for line in o.certificate]
        if o.status == SAT:
            return SolveOutcome(SAT, o.witness, explored, cert, ctx.precision_bits)
        pending |= o.status == NO_WITNESS
    return SolveOutcome(NO_WITNESS if pending else UNSAT, None, max(explored, 1), cert, ctx.precision_bits)


def reduce_same_class(ctx: BeattyCtx, case: System, eq: CanonEq):
    """Subcases fixing the integer combination sum k_j x_j of a single-class equation.

    With F_j = r_j F and D the common denominator of the r_j, the equation
    reads floor-free as (F/D) * Lam = A + error, Lam = sum D r_j x_j, so Lam
    ranges over the finitely many integers allowed by the error bounds.
    Returns (values of Lam, subcases, description).
    """
    p = ctx.provider
    form = eq.form
    variables = form.variables()
    Fs = [modulus_of(form, v) for v in variables]
    (members, ratios), = dependence_classes(Fs)
    r = {variables[j]: ratios[k] for k, j in enumerate(members)}
    D = 1
    for q in r.values():
        D = math.lcm(D, q.denominator)
    weights = {v: int(q * D) for v, q in r.items()}
    lo = sum(error_range(ctx, form, v)[0] for v in variables)
    hi = sum(error_range(ctx, form, v)[1] for v in variables)
    A = -form.const
    G = AlphaRat(Fs[members[0]]) / D
    a, b = AlphaRat(A + lo) / G, AlphaRat(A + hi) / G
    if sign_at_alpha(G, p) < 0:
        a, b = b, a
    values = list(range(ceil_value(a, p), floor_value(b, p) + 1))
    lam = LinForm({Leaf(v, 1, 0): w for v, w in weights.items()})
    subcases = []
    for W in values:
        extra = CanonEq(lam - LinForm.constant(W))
        subcases.append(System(case.atoms + (extra,), case.variables))
    return values, subcases, f"{lam} in {values}"


def reduce_cross_class(ctx: BeattyCtx, case: System):
    """The real relaxations (closure translates) of a case with independent moduli."""
    return coset_relaxations(ctx, case)


def solve_multi_equation(ctx: BeattyCtx, case: System, budget: int) -> SolveOutcome:
    """Several equations: exact decision by the lattice closure engine."""
    return decide(ctx, case, budget, "multi-equation")


def solve_case(ctx: BeattyCtx, case: System, budget: int = DEFAULT_BUDGET, workers: int = 1) -> SolveOutcome:
    """Decide one canonical case, routing on the shape of its equations."""
    if any(isinstance(a, ConstAtom) for a in case.atoms):
        return SolveOutcome(UNSAT, None, 1, ["closed false atom after substitution"], ctx.precision_bits)
    eqs = _equations(case)
    if not eqs:
        if is_pure_nonalg(case):
            o = solve_nonalg(ctx, case, budget, workers)
            o.certificate.insert(0, "route: fractional-part relaxation")
            return o
        return decide(ctx, case, budget, "route: lattice (scaled fractional parts)")
    if len(eqs) == 1:
        eq = eqs[0]
        variables = eq.form.variables()
        if len(variables) == 1 and not modulus_of(eq.form, variables[0]).is_zero():
            var = variables[0]
            xs = one_var_candidates(ctx, eq.form)
            rest = System(tuple(a for a in case.atoms if a is not eq), case.variables)
            head = [f"route: one variable, {var} in {xs}"]
            if not xs:
                return SolveOutcome(UNSAT, None, 1, head, ctx.precision_bits)
            parts = []
            for x in xs:
                o = solve_case(ctx, substitute_case(ctx, rest, var, x), budget, workers)
                if o.witness is not None:
                    o.witness[var] = x
                parts.append(o)
                if o.status == SAT:
                    break
            return _merge(parts, ctx, head)
        Fs = [modulus_of(eq.form, v) for v in variables]
        if len(variables) > 1 and all(not F.is_zero() for F in Fs) and len(dependence_classes(Fs)) == 1:
            values, subcases, desc = reduce_same_class(ctx, case, eq)
            head = [f"route: one dependence class, {desc}"]
            if not values:
                return SolveOutcome(UNSAT, None, 1, head, ctx.precision_bits)
            return _merge([decide(ctx, sc, budget, f"{desc.split(' in ')[0]} = {W}")
                           for W, sc in zip(values, subcases)], ctx, head)
        return decide(ctx, case, budget, "route: lattice (independent moduli)")
    return solve_multi_equation(ctx, case, budget)


def solve_system(ctx: BeattyCtx, cs: CaseSplit, budget: int = DEFAULT_BUDGET, workers: int = 1) -> SolveOutcome:
    """First sat case in canonical order; unsat only when every case is refuted."""
    if workers > 1 and len(cs.cases) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda c: solve_case(ctx, c, budget), cs.cases))
    else:
        outcomes = []
        for c in cs.cases:
            o = solve_case(ctx, c, budget, workers)
            outcomes.append(o)
            if o.status == SAT:
                break
    res = _merge(outcomes, ctx, [f"{len(cs.cases)} case(s) after flattening"])
    if not cs.cases:
        res.certificate.append("every case contains a closed false atom")
    return res


def solve(ctx: BeattyCtx, system: System | str, budget: int = DEFAULT_BUDGET,
          case_limit: int = DEFAULT_CASE_LIMIT, workers: int = 1) -> SolveOutcome:
    """Parse (if needed), desugar congruences, flatten, solve and re-verify."""
    original = parse_formula(system) if isinstance(system, str) else system
    desugared, wmap = desugar_congruences(original)
    cs = flatten_floors(ctx, desugared, case_limit)
    out = solve_system(ctx, cs, budget, workers)
    if out.status == SAT:
        env = wmap.apply(out.witness)
        if not system_holds(ctx, original, env):
            raise AssertionError(f"witness {env} fails the original system")
        out.witness = env
        out.certificate.append("witness verified against the original system")
    for v in original.variables:
        if out.witness is not None:
            out.witness.setdefault(v, 0)
    return out


# congruence pairs and progressions --------------------------------------------------------------


def solve_congruence_pair(ctx: BeattyCtx, m: int, i: int, n: int, j: int,
                          budget: int = DEFAULT_BUDGET) -> int | None:
    """Least x > 0 with x = i (mod m) and f(x) = j (mod n).

    f(x) = j (mod n) holds iff [alpha*x/n] lies in [j/n, (j+1)/n), which
    is what the residue of floor(alpha*x) encodes; candidates x = m*y + i.
    """
    if not (0 <= i < m and 0 <= j < n):
        raise ValueError("residues must satisfy 0 <= i < m and 0 <= j < n")
    y0 = 0 if i > 0 else 1
    for y in range(y0, y0 + budget):
        x = m * y + i
        if ctx.floor_mul(x) % n == j:
            return x
    return None


@dataclass(frozen=True)
class Progression:
    x: int
    y: int
    start: int
    step: int


def find_progression(ctx: BeattyCtx, h: Term, n: int, budget: int = DEFAULT_BUDGET,
                     workers: int = 1) -> Progression | None:
    """x, y with h(x + l*y) = h(x) + l*h(y) for l = 0..n, found via fractional parts.

    If [alpha f^i(x)] + n [alpha f^i(y)] < 1 for every level i below the
    depth of h then f^i is additive along the progression at every level.
    """
    form = linear_form_of(ctx, h)
    variables = form.variables()
    if len(variables) != 1 or any(lf.scale != 1 for lf, _ in form.terms):
        raise ValueError("find_progression needs an unscaled term in one variable")
    (var,) = variables
    depth = max(lf.power for lf, _ in form.terms)
    xs, ys = "x", "y"
    atoms = tuple(CanonIneq.build({Leaf(xs, 1, i): 1, Leaf(ys, 1, i): n}, {}, 1) for i in range(depth))
    if atoms:
        o = solve_nonalg(ctx, System(atoms, (xs, ys)), budget, workers)
        if o.status != SAT:
            return None
        x, y = o.witness[xs], o.witness[ys]
    else:
        x, y = 1, 1
    H = lambda t: form.value(ctx, {var: t})
    if any(H(x + ell * y) != H(x) + ell * H(y) for ell in range(n + 1)):
        return None
    return Progression(x, y, H(x), H(y))
