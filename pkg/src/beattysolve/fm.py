"""Fourier-Motzkin elimination for strict linear inequalities over Q(alpha).

An inequality ``sum c_v * v < rhs`` has coefficients and right-hand side in
Q(alpha). Coefficient signs are decided exactly at alpha, so elimination
is exact; a system is infeasible exactly when elimination derives
``0 < r`` with ``r <= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .alpha import ONE, AlphaProvider, AlphaRat, compare_values, sign_at_alpha


@dataclass(frozen=True)
class Ineq:
    """sum coeffs[v] * v < rhs (strict)."""

    coeffs: tuple[tuple[object, AlphaRat], ...]
    rhs: AlphaRat
    origin: str = field(default="", compare=False)
    # indices of the original inequalities combined into this one
    support: frozenset = field(default=frozenset(), compare=False)

    @classmethod
    def build(cls, coeffs: dict, rhs, origin: str = "") -> "Ineq":
        items = tuple(sorted(((k, AlphaRat.lift(v)) for k, v in coeffs.items()
                              if not AlphaRat.lift(v).is_zero()), key=lambda kv: _key(kv[0])))
        return cls(items, AlphaRat.lift(rhs), origin)

    def coeff(self, v) -> AlphaRat:
        for k, c in self.coeffs:
            if k == v:
                return c
        return AlphaRat(0)

    def variables(self):
        return [k for k, _ in self.coeffs]

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __str__(self):
        if not self.coeffs:
            lhs = "0"
        else:
            lhs = " + ".join(f"({c})*{k}" for k, c in self.coeffs)
        return f"{lhs} < {self.rhs}"


def _key(v):
    return v.sort_key() if hasattr(v, "sort_key") else (str(type(v)), str(v))


def var_key(v):
    return _key(v)


def substitute(ineqs, var, value) -> list[Ineq]:
    out = []
    value = AlphaRat.lift(value)
    for q in ineqs:
        c = q.coeff(var)
        if c.is_zero():
            out.append(q)
            continue
        d = q.as_dict()
        del d[var]
        out.append(Ineq.build(d, q.rhs - c * value, q.origin))
    return out


def _content(polys) -> Fraction:
    """Positive gcd of every rational coefficient of the polynomials."""
    num = den = 0
    for p in polys:
        for c in p.coeffs:
            if c:
                num = math.gcd(num, c.numerator)
                den = den * c.denominator // math.gcd(den, c.denominator) if den else c.denominator
    return Fraction(num, den) if num else Fraction(1)


def _normalize(q: Ineq, provider: AlphaProvider) -> Ineq:
    """A positive multiple of q with polynomial coefficients and primitive left-hand side.

    Positive rational (or polynomial) multiples of one inequality share the
    same normalized left-hand side, which is what dedupe keys on.
    """
    if not q.coeffs:
        return q
    terms = [(k, v) for k, v in q.coeffs]
    rhs = q.rhs
    den = ONE
    for _, v in terms:
        if not v.is_poly():
            den = den * v.den
    if not rhs.is_poly():
        den = den * rhs.den
    if den != ONE:
        den = den * sign_at_alpha(den, provider)
        terms = [(k, v * den) for k, v in terms]
        rhs = rhs * den
    polys = [v.num for _, v in terms]
    if max(p.degree for p in polys) > 0:
        g = polys[0]
        for p in polys[1:]:
            g = g.gcd(p)
            if g.is_const():
                break
        if not g.is_const():
            g = g * sign_at_alpha(g, provider)
            polys = [p.divmod(g)[0] for p in polys]
            rhs = rhs / AlphaRat(g)
    c = _content(polys)
    if c != 1:
        polys = [p * (1 / c) for p in polys]
        rhs = rhs * (1 / c)
    return Ineq(tuple((k, AlphaRat(p)) for (k, _), p in zip(terms, polys)), rhs, q.origin, q.support)


def dedupe(ineqs, provider: AlphaProvider) -> list[Ineq]:
    """Keep one inequality per left-hand side: the one with the least rhs."""
    best: dict = {}
    order = []
    for q in ineqs:
        q = _normalize(q, provider)
        lhs = q.coeffs
        if lhs in best:
            if compare_values(q.rhs, best[lhs].rhs, provider) < 0:
                best[lhs] = q
        else:
            best[lhs] = q
            order.append(lhs)
    return [best[k] for k in order]


def with_support(ineqs) -> list[Ineq]:
    """Tag each inequality with its own index, enabling redundancy pruning in eliminate."""
    return [Ineq(q.coeffs, q.rhs, q.origin, frozenset([i])) for i, q in enumerate(ineqs)]


def eliminate(ineqs, var, provider: AlphaProvider, step: int | None = None) -> list[Ineq]:
    """Project out var.

    A pair with coefficients cp > 0 and cn < 0 combines as (-cn)*p + cp*n,
    which needs no division; dedupe then normalizes each result. When
    ``step`` counts the variables already eliminated, a combination of
    more than step + 2 original inequalities is redundant and dropped.
    """
    pos, neg, rest = [], [], []
    for q in ineqs:
        c = q.coeff(var)
        s = sign_at_alpha(c, provider)
        (pos if s > 0 else neg if s < 0 else rest).append((q, c))
    out = [q for q, _ in rest]
    for p, cp in pos:
        for n, cn in neg:
            support = p.support | n.support
            if step is not None and p.support and n.support and len(support) > step + 2:
                continue
            a, b = -cn, cp
            d: dict = {}
            for k, v in p.coeffs:
                d[k] = v * a
            for k, v in n.coeffs:
                d[k] = d.get(k, AlphaRat(0)) + v * b
            d.pop(var, None)
            origin = f"[({-cn})*({p.origin}) + ({cp})*({n.origin})]"
            if len(origin) > 600:
                origin = origin[:280] + " ... " + origin[-280:]
            q = Ineq.build(d, p.rhs * a + n.rhs * b, origin)
            out.append(Ineq(q.coeffs, q.rhs, q.origin, support))
    return dedupe(out, provider)


def bounds(ineqs, var, provider: AlphaProvider):
    """(lowers, uppers) on var from inequalities that mention only var."""
    lowers, uppers = [], []
    for q in ineqs:
        c = q.coeff(var)
        if c.is_zero():
            continue
        b = q.rhs / c
        if sign_at_alpha(c, provider) > 0:
            uppers.append(b)
        else:
            lowers.append(b)
    return lowers, uppers


def _extreme(vals, provider, want: int):
    best = vals[0]
    for v in vals[1:]:
        if compare_values(v, best, provider) == want:
            best = v
    return best


def pick_between(lowers, uppers, provider: AlphaProvider) -> AlphaRat:
    """A value strictly above every lower bound and strictly below every upper bound."""
    lo = _extreme(lowers, provider, 1) if lowers else None
    hi = _extreme(uppers, provider, -1) if uppers else None
    if lo is not None and hi is not None:
        return (lo + hi) / 2
    if lo is not None:
        return lo + 1
    if hi is not None:
        return hi - 1
    return AlphaRat(0)


@dataclass
class FMResult:
    feasible: bool
    sample: dict | None
    certificate: list[str]


def _cost(system, v, provider) -> int:
    p = n = 0
    for q in system:
        s = sign_at_alpha(q.coeff(v), provider)
        p += s > 0
        n += s < 0
    return p * n - p - n


def fm_solve(ineqs, variables, provider: AlphaProvider, order=None) -> FMResult:
    """Decide feasibility of a strict system and produce a sample point.

    Without an explicit order, variables are eliminated greedily to keep
    the number of generated inequalities small.
    """
    ineqs = with_support([q if q.origin else Ineq(q.coeffs, q.rhs, f"h{i}") for i, q in enumerate(ineqs)])
    variables = list(variables)
    stages = [dedupe(ineqs, provider)]
    remaining = list(variables)
    order = list(order) if order is not None else []
    fixed = bool(order)
    while remaining:
        if fixed:
            v = order[len(stages) - 1]
        else:
            v = min(remaining, key=lambda v: (_cost(stages[-1], v, provider), remaining.index(v)))
            order.append(v)
        remaining.remove(v)
        stages.append(eliminate(stages[-1], v, provider, step=len(stages) - 1))
    for q in stages[-1]:
        if sign_at_alpha(q.rhs, provider) <= 0:
            cert = [f"eliminated {', '.join(map(str, order)) or 'nothing'}",
                    f"derived 0 < {q.rhs}, refuted: {q.rhs} <= 0",
                    f"derivation {q.origin}"]
            return FMResult(False, None, cert)
    sample: dict = {}
    for i in range(len(order) - 1, -1, -1):
        v = order[i]
        sys_i = stages[i]
        for w, val in sample.items():
            sys_i = substitute(sys_i, w, val)
        lowers, uppers = bounds(sys_i, v, provider)
        sample[v] = pick_between(lowers, uppers, provider)
    cert = [f"eliminated {', '.join(map(str, order)) or 'nothing'}; all residuals positive"]
    return FMResult(True, {v: sample[v] for v in variables}, cert)
