"""Randomised invariant suites behind ``check-axioms``.

Each suite draws from a seeded generator and returns (passed, failed,
first failure) so repeated runs print identical reports.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .alg import axiom4_constants
from .alpha import AlphaPoly, sign_at_alpha
from .beatty import BeattyCtx, FracValue, frac_compare
from .nonalg import kronecker_search
from .syntax import parse_term
from .oracle import brute_image

SUITES = ("order", "kronecker", "range", "K")
TERM_FAMILY = ("f(x)", "f(f(x))", "f(x) + x", "2*f(x) - x", "f(f(x)) + f(x)")


@dataclass
class SuiteReport:
    suite: str
    passed: int
    failed: int
    first_failure: str | None = None

    def line(self) -> str:
        verdict = "pass" if self.failed == 0 else "FAIL"
        tail = f" (first failure: {self.first_failure})" if self.first_failure else ""
        return f"{self.suite}: {verdict} {self.passed} passed, {self.failed} failed{tail}"


class _Tally:
    def __init__(self, suite: str):
        self.report = SuiteReport(suite, 0, 0)

    def __call__(self, ok: bool, what):
        if ok:
            self.report.passed += 1
        else:
            self.report.failed += 1
            if self.report.first_failure is None:
                self.report.first_failure = str(what() if callable(what) else what)


def check_order(ctx: BeattyCtx, samples: int, seed: int = 0) -> SuiteReport:
    """Additivity of f up to a carry, and the decimal order being strict and transitive."""
    rng = random.Random(seed)
    tally = _Tally("order")
    one = AlphaPoly.const(1)
    for _ in range(samples):
        a, b, c = (rng.randint(-500, 500) for _ in range(3))
        carry = ctx.floor_mul(a + b) - ctx.floor_mul(a) - ctx.floor_mul(b)
        fa, fb, fc = (FracValue.of_int(ctx, v) for v in (a, b, c))
        below = sign_at_alpha(fa.value + fb.value - one, ctx.provider) < 0
        tally(carry in (0, 1) and (carry == 0) == below, (a, b))
        ab, bc, ac = frac_compare(ctx, fa, fb), frac_compare(ctx, fb, fc), frac_compare(ctx, fa, fc)
        trans_ok = not (ab < 0 and bc < 0) or ac < 0
        distinct_ok = (ab == 0) == (a == b)
        tally(trans_ok and distinct_ok, (a, b, c))
    return tally.report


def random_box(rng: random.Random, min_width: Fraction = Fraction(1, 20)):
    """Targets for levels 0 and/or 1, each of width at least min_width."""
    levels = rng.choice([[0], [1], [0, 1]])
    targets = {}
    for lv in levels:
        w = Fraction(rng.randint(int(min_width * 400), 400), 400)
        lo = Fraction(rng.randint(0, int((1 - w) * 400)), 400)
        targets[lv] = (lo, lo + w)
    return targets


def check_kronecker(ctx: BeattyCtx, samples: int, seed: int = 0, budget: int = 10 ** 6,
                    workers: int = 1) -> SuiteReport:
    rng = random.Random(seed)
    tally = _Tally("kronecker")
    for _ in range(samples):
        targets = random_box(rng)
        x = kronecker_search(ctx, "x", targets, budget, workers)
        ok = x is not None
        if ok:
            y = x
            for lv in range(max(targets) + 1):
                if lv in targets and not ctx.frac_between(y, *targets[lv]):
                    ok = False
                y = ctx.floor_mul(y)
        tally(ok, lambda: (targets, x))
    return tally.report


def check_range(ctx: BeattyCtx, samples: int, seed: int = 0) -> SuiteReport:
    """f(x+1) - f(x) is floor(alpha) or floor(alpha) + 1."""
    rng = random.Random(seed)
    tally = _Tally("range")
    k = ctx.alpha_floor
    for _ in range(samples):
        x = rng.randint(-10 ** 6, 10 ** 6)
        d = ctx.floor_mul(x + 1) - ctx.floor_mul(x)
        tally(d in (k, k + 1), x)
    return tally.report


def window_violations(ctx: BeattyCtx, text: str, lo: int = -10 ** 4, hi: int = 10 ** 4):
    """(K, window misses, reverse-bound misses) for H on lo..hi.

    A window miss is a run of K consecutive integers inside [lo, hi] that
    avoids the values of H; a reverse miss is a pair x, x' in [lo, hi]
    with |H(x) - H(x')| <= K but |x - x'| > K.
    """
    import numpy as np

    H = parse_term(text)
    K = axiom4_constants(ctx, H)
    # values hitting [lo, hi] come from arguments well inside this wider domain
    _, wide = brute_image(ctx, H, lo - 10 * abs(lo) - K, hi + 10 * abs(hi) + K)
    values = np.unique(wide[(wide >= lo - 1) & (wide <= hi + 1)])
    padded = np.concatenate(([lo - 1], values, [hi + 1]))
    window_miss = int(np.count_nonzero(np.diff(np.unique(padded)) > K))
    xs, vals = brute_image(ctx, H, lo, hi)
    idx = np.argsort(vals, kind="stable")
    sv, sx = vals[idx], xs[idx]
    reverse_miss = 0
    shift = 1
    while shift < len(sv):
        close = (sv[shift:] - sv[:-shift]) <= K
        if not close.any():
            break
        reverse_miss += int(np.count_nonzero(close & (np.abs(sx[shift:] - sx[:-shift]) > K)))
        shift += 1
    return K, window_miss, reverse_miss


def check_K(ctx: BeattyCtx, samples: int = 0, seed: int = 0) -> SuiteReport:
    tally = _Tally("K")
    for text in TERM_FAMILY:
        K, wm, rm = window_violations(ctx, text)
        tally(wm == 0 and rm == 0, f"{text}: K={K}, window misses {wm}, reverse misses {rm}")
    return tally.report


def run_suite(ctx: BeattyCtx, suite: str, samples: int, seed: int = 0, workers: int = 1) -> SuiteReport:
    if suite == "order":
        return check_order(ctx, samples, seed)
    if suite == "kronecker":
        return check_kronecker(ctx, samples, seed, workers=workers)
    if suite == "range":
        return check_range(ctx, samples, seed)
    if suite == "K":
        return check_K(ctx, samples, seed)
    raise ValueError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
