"""Exact semantics of f(x) = floor(alpha*x) and of fractional parts [alpha*t]."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .alpha import (
    ALPHA,
    START_BITS,
    AlphaPoly,
    AlphaProvider,
    AlphaRat,
    ceil_value,
    floor_value,
    sign_at_alpha,
    upper_bound,
)
from .syntax import Add, F, FracItem, IntLit, NonAlg, AlgEq, Neg, ScalarMul, Term, Var


class UnboundVariable(KeyError):
    pass


class BeattyCtx:
    """An alpha provider together with fast exact routines for f."""

    def __init__(self, provider: AlphaProvider):
        self.provider = provider
        lo, hi, scale = provider.dyadic(START_BITS)
        self.alpha_float = (lo + hi) / 2 / (1 << scale)
        self.alpha_floor = floor_value(ALPHA, provider)

    @classmethod
    def named(cls, spec: str = "pi", **kw) -> "BeattyCtx":
        return cls(AlphaProvider.from_spec(spec, **kw))

    @property
    def alpha(self) -> AlphaPoly:
        return ALPHA

    @property
    def precision_bits(self) -> int:
        return self.provider.max_bits

    def floor_mul(self, x: int) -> int:
        """floor(alpha * x), exactly."""
        if x == 0:
            return 0
        bits = max(START_BITS, 2 * abs(x).bit_length() + 16)
        while True:
            lo, hi, s = self.provider.dyadic(bits)
            if x > 0:
                a, b = (lo * x) >> s, (hi * x) >> s
            else:
                a, b = (hi * x) >> s, (lo * x) >> s
            if a == b:
                return a
            bits *= 2

    def frac_between(self, y: int, lo, hi) -> bool:
        """Whether lo < [alpha*y] < hi; the bounds are rationals or AlphaPolys."""
        d = AlphaPoly.linear(y, -self.floor_mul(y))
        return (sign_at_alpha(d - lo, self.provider) > 0
                and sign_at_alpha(AlphaPoly.lift(hi) - d, self.provider) > 0)

    def frac_float(self, y: int) -> float:
        """Fast floating approximation of [alpha*y] (for prefiltering only)."""
        v = self.alpha_float * y
        return v - math.floor(v)


def apply_f(ctx: BeattyCtx, x: int) -> int:
    return ctx.floor_mul(x)


def iterate_f(ctx: BeattyCtx, x: int, k: int) -> int:
    for _ in range(k):
        x = ctx.floor_mul(x)
    return x


def eval_term(ctx: BeattyCtx, t: Term, env: dict[str, int]) -> int:
    if isinstance(t, IntLit):
        return t.value
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, Add):
        return eval_term(ctx, t.left, env) + eval_term(ctx, t.right, env)
    if isinstance(t, Neg):
        return -eval_term(ctx, t.arg, env)
    if isinstance(t, ScalarMul):
        return t.coeff * eval_term(ctx, t.arg, env)
    if isinstance(t, F):
        return iterate_f(ctx, eval_term(ctx, t.arg, env), t.power)
    raise TypeError(f"not a term: {t!r}")


@dataclass(frozen=True)
class FracValue:
    """The fractional part [alpha*c] = alpha*c - floor(alpha*c) as a polynomial."""

    value: AlphaPoly

    @classmethod
    def of_int(cls, ctx: BeattyCtx, c: int) -> "FracValue":
        return cls(AlphaPoly.linear(c, -ctx.floor_mul(c)))

    def check(self, ctx: BeattyCtx) -> "FracValue":
        p = ctx.provider
        if sign_at_alpha(self.value, p) < 0 or sign_at_alpha(self.value - 1, p) >= 0:
            raise ArithmeticError(f"{self.value} is not in [0, 1)")
        return self


def frac_of(ctx: BeattyCtx, t: Term, env: dict[str, int]) -> FracValue:
    return FracValue.of_int(ctx, eval_term(ctx, t, env))


def frac_compare(ctx: BeattyCtx, u: FracValue, v: FracValue) -> int:
    return sign_at_alpha(u.value - v.value, ctx.provider)


def frac_sum(ctx: BeattyCtx, items, env) -> AlphaPoly:
    """Exact value of a sum of coeff*frac(term) items and integers."""
    acc = AlphaPoly()
    for it in items:
        if it.term is None:
            acc = acc + it.coeff
        else:
            acc = acc + frac_of(ctx, it.term, env).value * it.coeff
    return acc


# Beatty-sequence identities ------------------------------------------------------------------


def _fsum_bounds(coeffs) -> tuple[int, int]:
    """Every sum of c*[..] over coeffs lies in the open interval (lo, hi) or equals 0."""
    pos = sum(c for c in coeffs if c > 0)
    neg = sum(-c for c in coeffs if c < 0)
    return -neg, pos


@dataclass(frozen=True)
class ConstAtom:
    """An atom with a fixed truth value."""

    value: bool

    def variables(self) -> list[str]:
        return []

    def __str__(self):
        return "0 = 0" if self.value else "0 = 1"


def encode_psi_ell(m: list[int], n: list[int], ell: int):
    """The atom  sum m_i*[alpha*a_i] < sum n_i*[alpha*b_i] + ell  over fresh a_i, b_i.

    When the bounds of the two sums decide the comparison for every
    parameter value, a constant atom is returned instead.
    """
    lo, hi = _fsum_bounds(list(m) + [-c for c in n])
    # the difference lies in (lo, hi) or is exactly 0
    if hi <= ell and ell > 0:
        return ConstAtom(True)
    if ell <= lo and ell <= 0:
        return ConstAtom(False)
    lhs = tuple(FracItem(c, Var(f"a{i + 1}")) for i, c in enumerate(m))
    rhs = tuple(FracItem(c, Var(f"b{i + 1}")) for i, c in enumerate(n)) + (FracItem(ell),)
    return NonAlg(lhs or (FracItem(0),), "<", rhs)


def encode_phi_ni(n: int, i: int):
    """The atom  f(n*a) = n*f(a) + i, i.e. [alpha*n*a] = n*[alpha*a] - i."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 <= i < n:
        raise IndexError(f"i must satisfy 0 <= i < {n}")
    if n == 1:
        return ConstAtom(True)
    a = Var("a")
    rhs = ScalarMul(n, F(a)) if i == 0 else Add(ScalarMul(n, F(a)), IntLit(i))
    return AlgEq(F(ScalarMul(n, a)), rhs)


def in_range_floorF(ctx: BeattyCtx, F_: AlphaPoly, A: int):
    """The least integer x with floor(F(alpha)*x) = A, or None.

    For F > 1 the solution is unique when it exists; for 0 < F < 1 the
    solutions form an interval and its least element is returned.
    """
    p = ctx.provider
    s = sign_at_alpha(F_, p)
    if s == 0:
        return None
    Fr = AlphaRat(F_)
    if s > 0:
        x = ceil_value(AlphaRat(A) / Fr, p)
        return x if floor_value(Fr * x, p) == A else None
    # floor(F x) = A with F < 0  <=>  floor(G y) = A with G = -F, y = -x;
    # the least x corresponds to the largest y.
    G = -Fr
    y = ceil_value(AlphaRat(A + 1) / G, p) - 1
    return -y if floor_value(G * y, p) == A else None


def in_range_all(ctx: BeattyCtx, F_: AlphaPoly, A: int) -> list[int]:
    """Every integer x with floor(F(alpha)*x) = A, in increasing order."""
    p = ctx.provider
    s = sign_at_alpha(F_, p)
    if s == 0:
        return []
    Fr = AlphaRat(F_)
    if s < 0:
        return sorted(-y for y in in_range_all(ctx, -F_, A))
    lo = ceil_value(AlphaRat(A) / Fr, p)
    hi = ceil_value(AlphaRat(A + 1) / Fr, p) - 1
    return list(range(lo, hi + 1))


@dataclass(frozen=True)
class KBound:
    term: object
    K: int


def step_bounds(ctx: BeattyCtx, scale: int, depth: int) -> list[int]:
    """S_0..S_depth with |f^k(x + d) - f^k(x)| <= S_k whenever |d| <= |scale|.

    S_0 = |scale| and S_k = ceil(ub(alpha) * S_{k-1}) + 1.
    """
    ub = upper_bound(ALPHA, ctx.provider)
    out = [abs(scale)]
    for _ in range(depth):
        out.append(math.ceil(ub * out[-1]) + 1)
    return out


def step_bound_K(ctx: BeattyCtx, H) -> KBound:
    """A window size K such that every K consecutive integers meet the range of H.

    H is a one-variable term sum n_i * f^{k_i}(c_i * x) (or its linear form).
    Consecutive values H(x), H(x+1) differ by at most K - 1.
    """
    from .normalize import linear_form_of

    form = linear_form_of(ctx, H) if isinstance(H, Term) else H
    if len(form.variables()) != 1:
        raise ValueError("step_bound_K needs a term in exactly one variable")
    K = 1
    for leaf, n in form.items():
        K += abs(n) * step_bounds(ctx, leaf.scale, leaf.power)[-1]
    return KBound(H, K)


def delta_bounds(ctx: BeattyCtx, depth: int) -> list[Fraction]:
    """Delta_1..Delta_depth with 0 <= alpha^i*c*x - f^i(c*x) < Delta_i."""
    ub = upper_bound(ALPHA, ctx.provider)
    out = [Fraction(1)]
    while len(out) < depth:
        out.append(1 + ub * out[-1])
    return out[:depth]
