"""Decision procedure for systems of fractional-part inequalities.

The fractional parts z = [alpha * f^i(x)] of distinct (variable, level)
pairs are jointly dense in the open unit cube, so a conjunction of strict
inequalities on them has an integer solution exactly when its real
relaxation (plus 0 < z < 1) is feasible. Feasibility is decided by
Fourier-Motzkin elimination; witnesses are found one variable at a time,
each time restricting the scan to the projection of the remaining system
so that the later variables can still be realised.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .alpha import AlphaPoly, AlphaRat, ceil_value, floor_value, sign_at_alpha
from .beatty import BeattyCtx
from .fm import FMResult, Ineq, eliminate, fm_solve, substitute, with_support
from .normalize import CanonEq, CanonIneq, system_holds
from .outcome import NO_WITNESS, SAT, UNSAT, SolveOutcome
from .scan import first_hit
from .syntax import System

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 6


@dataclass(frozen=True)
class BoxVar:
    """The fractional part [alpha * f^level(owner)]."""

    owner: str
    level: int

    def sort_key(self):
        return (0, self.owner, self.level)

    def __str__(self):
        return f"z[{self.owner},{self.level}]"


StrictIneq = Ineq


@dataclass
class RealRelaxation:
    variables: list[BoxVar]
    ineqs: list[Ineq]

    def __str__(self):
        return "; ".join(str(q) for q in self.ineqs)


def is_pure_nonalg(case: System) -> bool:
    """No equations, and every fractional part is of an unscaled chain."""
    for a in case.atoms:
        if isinstance(a, CanonEq):
            return False
        if isinstance(a, CanonIneq) and any(lf.scale != 1 for lf, _ in a.lhs):
            return False
        if not isinstance(a, CanonIneq):
            return False
    return True


def build_relaxation(ctx: BeattyCtx, case: System) -> RealRelaxation:
    """Replace each [alpha * f^i(x)] by a real variable in (0, 1)."""
    owner_rank = {v: i for i, v in enumerate(case.variables)}
    bvars: set[BoxVar] = set()
    ineqs = []
    for a in case.atoms:
        if not isinstance(a, CanonIneq):
            raise TypeError(f"not a fractional-part inequality: {a}")
        coeffs = {}
        for lf, c in a.lhs:
            if lf.scale != 1:
                raise ValueError(f"scaled chain {lf} has no box variable")
            bv = BoxVar(lf.var, lf.power)
            coeffs[bv] = coeffs.get(bv, 0) + c
            bvars.add(bv)
        ineqs.append(Ineq.build(coeffs, AlphaRat(a.rhs_value(ctx)), f"atom {a}"))
    order = sorted(bvars, key=lambda b: (owner_rank.get(b.owner, len(owner_rank)), b.owner, b.level))
    for b in order:
        ineqs.append(Ineq.build({b: -1}, 0, f"{b} > 0"))
        ineqs.append(Ineq.build({b: 1}, 1, f"{b} < 1"))
    return RealRelaxation(order, ineqs)


def fm_feasible(ctx: BeattyCtx, r: RealRelaxation) -> FMResult:
    return fm_solve(r.ineqs, r.variables, ctx.provider)


def _abs(v: AlphaRat, provider) -> AlphaRat:
    return -v if sign_at_alpha(v, provider) < 0 else v


def _round_in(v: AlphaRat, k: int, provider, up: bool) -> Fraction:
    if v.is_poly() and v.num.is_const():
        return v.num.const_value()
    scaled = v * (1 << k)
    n = ceil_value(scaled, provider) if up else floor_value(scaled, provider)
    return Fraction(n, 1 << k)


def targets_from_sample(ctx: BeattyCtx, r: RealRelaxation, sample: dict) -> dict:
    """Per-variable open boxes, with rational ends, whose product satisfies r.

    The half-width is half the least slack of any inequality divided by
    the 1-norm of its coefficients.
    """
    p = ctx.provider
    h = None
    for q in r.ineqs:
        if not q.coeffs:
            continue
        lhs = sum((c * sample[v] for v, c in q.coeffs), AlphaRat(0))
        slack = q.rhs - lhs
        if sign_at_alpha(slack, p) <= 0:
            raise ValueError(f"sample violates {q}")
        norm = sum((_abs(c, p) for _, c in q.coeffs), AlphaRat(0))
        cand = slack / norm
        if h is None or sign_at_alpha(cand - h, p) < 0:
            h = cand
    if h is None:
        h = AlphaRat(Fraction(1, 2))
    h = h / 2
    hl = h.interval(p).lo
    k = 2
    while Fraction(1, 1 << k) * 4 > hl:
        k += 1
    out = {}
    for v in r.variables:
        s = sample[v]
        lo = _round_in(s - h, k, p, up=True)
        hi = _round_in(s + h, k, p, up=False)
        out[v] = (lo, hi)
    return out


def _region_classifier(ctx: BeattyCtx, levels: list[int], ineqs: list[Ineq]):
    """Float classifier for a region given as strict inequalities over levels."""
    p = ctx.provider
    rows = []
    for q in ineqs:
        coef = np.zeros(len(levels))
        for v, c in q.coeffs:
            coef[levels.index(v.level)] = c.approx(p)
        rows.append((coef, q.rhs.approx(p)))

    def classify(fracs, margins):
        Z = np.stack([fracs[lv] for lv in levels])
        Mg = np.stack([margins[lv] for lv in levels])
        sure = np.ones(Z.shape[1], dtype=bool)
        maybe = np.ones(Z.shape[1], dtype=bool)
        for coef, rhs in rows:
            val = coef @ Z
            tol = np.abs(coef) @ Mg + 1e-12 * (np.abs(coef).sum() + abs(rhs) + 1)
            sure &= val < rhs - tol
            maybe &= val < rhs + tol
        return sure, maybe & ~sure

    return classify


def _decimals(ctx: BeattyCtx, x: int, levels: list[int]) -> dict[int, AlphaPoly]:
    out = {}
    y = x
    for lv in range(max(levels) + 1):
        fy = ctx.floor_mul(y)
        if lv in levels:
            out[lv] = AlphaPoly.linear(y, -fy)
        y = fy
    return out


def region_search(ctx: BeattyCtx, owner: str, ineqs: list[Ineq], budget: int = DEFAULT_BUDGET,
                  workers: int = 1):
    """First x (in the order 1..budget, -1..-budget) whose decimals satisfy ineqs.

    ``ineqs`` mention only BoxVars of ``owner``.
    """
    levels = sorted({v.level for q in ineqs for v, _ in q.coeffs})
    if not levels:
        return 1 if all(sign_at_alpha(q.rhs, ctx.provider) > 0 for q in ineqs) else None
    p = ctx.provider

    def exact(x):
        dec = _decimals(ctx, x, levels)
        for q in ineqs:
            val = sum((c * dec[v.level] for v, c in q.coeffs), AlphaRat(0))
            if sign_at_alpha(q.rhs - val, p) <= 0:
                return False
        return True

    return first_hit(ctx, max(levels), _region_classifier(ctx, levels, ineqs), exact, budget, workers)


def _box_ineqs(owner: str, targets: dict) -> list[Ineq]:
    out = []
    for lv, (lo, hi) in targets.items():
        b = BoxVar(owner, lv)
        out.append(Ineq.build({b: -1}, -AlphaRat.lift(lo)))
        out.append(Ineq.build({b: 1}, AlphaRat.lift(hi)))
    return out


def kronecker_search(ctx: BeattyCtx, owner: str, targets: dict, budget: int = DEFAULT_BUDGET,
                     workers: int = 1):
    """First x with lo_i < [alpha * f^i(x)] < hi_i for every targeted level i.

    ``targets`` maps a level (or a BoxVar) to an open interval; ends may be
    rationals or polynomials in alpha. Candidates are tried in the order
    1, 2, ..., budget, then -1, -2, ..., -budget. Returns None when the
    budget is exhausted.
    """
    norm = {}
    for k, (lo, hi) in targets.items():
        lv = k.level if isinstance(k, BoxVar) else int(k)
        norm[lv] = (lo, hi)
    return region_search(ctx, owner, _box_ineqs(owner, norm), budget, workers)


def project_onto(ctx: BeattyCtx, ineqs: list[Ineq], keep: list[BoxVar], variables) -> list[Ineq]:
    cur = with_support(ineqs)
    step = 0
    for v in variables:
        if v not in keep:
            cur = eliminate(cur, v, ctx.provider, step)
            step += 1
    return [q for q in cur if q.coeffs]


def solve_nonalg(ctx: BeattyCtx, case: System, budget: int = DEFAULT_BUDGET,
                 workers: int = 1) -> SolveOutcome:
    """Decide a conjunction of canonical fractional-part inequalities."""
    r = build_relaxation(ctx, case)
    res = fm_feasible(ctx, r)
    cert = [f"relaxation over {len(r.variables)} box variables: {len(r.ineqs)} inequalities"]
    cert += res.certificate
    if not res.feasible:
        return SolveOutcome(UNSAT, None, 1, cert, ctx.precision_bits)
    targets = targets_from_sample(ctx, r, res.sample)
    for v in r.variables:
        lo, hi = targets[v]
        cert.append(f"target {v} in ({lo}, {hi})")
    ineqs = list(r.ineqs)
    remaining = list(r.variables)
    env: dict[str, int] = {}
    for owner in case.variables:
        mine = [v for v in remaining if v.owner == owner]
        if not mine:
            continue
        region = project_onto(ctx, ineqs, mine, remaining)
        x = region_search(ctx, owner, region, budget, workers)
        if x is None:
            cert.append(f"no value of {owner} found within budget {budget}")
            return SolveOutcome(NO_WITNESS, None, 1, cert, ctx.precision_bits)
        env[owner] = x
        dec = _decimals(ctx, x, [v.level for v in mine])
        for v in mine:
            ineqs = substitute(ineqs, v, AlphaRat(dec[v.level]))
        remaining = [v for v in remaining if v.owner != owner]
        cert.append(f"{owner} = {x}")
    for v in case.variables:
        env.setdefault(v, 0)
    if not system_holds(ctx, case, env):
        raise AssertionError(f"witness {env} fails verification")
    return SolveOutcome(SAT, env, 1, cert, ctx.precision_bits)
