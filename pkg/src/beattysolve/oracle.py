"""Brute-force reference: evaluate every atom at every point of a box.

Only the arithmetic kernel and f itself are shared with the solver.
Evaluation is vectorised: f is computed in float64 with a margin and
recomputed exactly wherever alpha*v is too close to an integer. A sum of
fractional parts is alpha*A - B for integers A, B, so every comparison
reduces to comparing B with floor(alpha*A).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alpha import AlphaPoly, sign_at_alpha
from .beatty import BeattyCtx, eval_term
from .syntax import F, Add, AlgEq, Cong, IntLit, Neg, NonAlg, ScalarMul, System, Term, Var

DEFAULT_LIMIT = 10 ** 8
ROW_CHUNK = 1 << 20
EXACT_LIMIT = 1 << 50


class BoxTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SearchBox:
    """Inclusive integer ranges, one per variable, in declared order."""

    ranges: tuple[tuple[str, int, int], ...]

    def __post_init__(self):
        for v, lo, hi in self.ranges:
            if lo > hi:
                raise ValueError(f"empty range for {v}: {lo}..{hi}")

    @classmethod
    def uniform(cls, variables, bound: int) -> "SearchBox":
        return cls(tuple((v, -bound, bound) for v in variables))

    @classmethod
    def parse(cls, text: str) -> "SearchBox":
        """``x=-100..100,y=0..5``."""
        out = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            name, rng = part.split("=")
            lo, hi = rng.split("..")
            out.append((name.strip(), int(lo), int(hi)))
        return cls(tuple(out))

    def count(self) -> int:
        n = 1
        for _, lo, hi in self.ranges:
            n *= hi - lo + 1
        return n

    def bound_of(self, v: str) -> tuple[int, int]:
        for name, lo, hi in self.ranges:
            if name == v:
                return lo, hi
        raise KeyError(f"box has no range for {v}")


# scalar check -------------------------------------------------------------------------------


def _fsum(ctx: BeattyCtx, items, env) -> AlphaPoly:
    acc = AlphaPoly()
    for it in items:
        if it.term is None:
            acc = acc + it.coeff
        else:
            v = eval_term(ctx, it.term, env)
            acc = acc + AlphaPoly.linear(v, -ctx.floor_mul(v)) * it.coeff
    return acc


def brute_check(ctx: BeattyCtx, s: System, env: dict[str, int]) -> bool:
    """Exact truth of every atom of s under env."""
    for a in s.atoms:
        if isinstance(a, AlgEq):
            ok = eval_term(ctx, a.lhs, env) == eval_term(ctx, a.rhs, env)
        elif isinstance(a, Cong):
            ok = (eval_term(ctx, a.lhs, env) - eval_term(ctx, a.rhs, env)) % a.modulus == 0
        elif isinstance(a, NonAlg):
            small, big = a.strict_less()
            ok = sign_at_alpha(_fsum(ctx, big, env) - _fsum(ctx, small, env), ctx.provider) > 0
        else:
            raise TypeError(f"unknown atom {a!r}")
        if not ok:
            return False
    return True


# vectorised evaluation -------------------------------------------------------------------------


def vfloor(ctx: BeattyCtx, v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(floor(alpha*v), float fractional part, error margin of that part)."""
    if v.size and int(np.abs(v).max()) > EXACT_LIMIT:
        raise OverflowError("values too large for vectorised evaluation")
    prod = ctx.alpha_float * v.astype(np.float64)
    fl = np.floor(prod)
    fr = prod - fl
    m = 4e-16 * (np.abs(prod) + 1.0)
    fl = fl.astype(np.int64)
    risky = np.nonzero((fr < m) | (fr > 1 - m))[0]
    for k in risky:
        fl[k] = ctx.floor_mul(int(v[k]))
    if len(risky):
        fr[risky] = np.clip(prod[risky] - fl[risky], 0.0, 1.0)
    return fl, fr, m


def veval(ctx: BeattyCtx, t: Term, env: dict[str, np.ndarray]) -> np.ndarray:
    """Value of t on broadcastable integer arrays (one axis per variable)."""
    if isinstance(t, IntLit):
        return np.int64(t.value)
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Add):
        return veval(ctx, t.left, env) + veval(ctx, t.right, env)
    if isinstance(t, Neg):
        return -veval(ctx, t.arg, env)
    if isinstance(t, ScalarMul):
        return t.coeff * veval(ctx, t.arg, env)
    if isinstance(t, F):
        v = np.asarray(veval(ctx, t.arg, env), dtype=np.int64)
        shape = v.shape
        v = v.ravel()
        for _ in range(t.power):
            v = vfloor(ctx, v)[0]
        return v.reshape(shape)
    raise TypeError(f"not a term: {t!r}")


def _vfsum(ctx: BeattyCtx, items, env):
    """(A, B) with sum of coeff*frac(term) + integers = alpha*A - B, as integer arrays."""
    A = np.int64(0)
    B = np.int64(0)
    for it in items:
        if it.term is None:
            B = B - it.coeff
            continue
        v = np.asarray(veval(ctx, it.term, env), dtype=np.int64)
        fv = vfloor(ctx, v.ravel())[0].reshape(v.shape)
        A = A + it.coeff * v
        B = B + it.coeff * fv
    return A, B


def positive_at_alpha(ctx: BeattyCtx, A, B):
    """Exact test alpha*A - B > 0 for integer arrays A, B.

    For A != 0, alpha*A is irrational, so B < alpha*A iff B <= floor(alpha*A).
    """
    A, B = np.broadcast_arrays(np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64))
    fA = vfloor(ctx, A.ravel())[0].reshape(A.shape)
    return np.where(A == 0, B < 0, B <= fA)


def _coords(env, names, shape, flat):
    """Assignments for flat indices into the open grid, as Python ints."""
    pos = np.unravel_index(flat, shape)
    cols = [env[v].ravel()[pos[k]].tolist() for k, v in enumerate(names)]
    return [dict(zip(names, vals)) for vals in zip(*cols)]


def _atom_mask(ctx: BeattyCtx, a, env, shape) -> np.ndarray:
    if isinstance(a, AlgEq):
        return np.broadcast_to(veval(ctx, a.lhs, env) == veval(ctx, a.rhs, env), shape)
    if isinstance(a, Cong):
        d = veval(ctx, a.lhs, env) - veval(ctx, a.rhs, env)
        return np.broadcast_to(d % a.modulus == 0, shape)
    small, big = a.strict_less()
    As, Bs = _vfsum(ctx, small, env)
    Ab, Bb = _vfsum(ctx, big, env)
    return np.broadcast_to(positive_at_alpha(ctx, Ab - As, Bb - Bs), shape)


def _axes(box: SearchBox, first_lo: int, first_hi: int):
    """Open grid over the box with the first variable restricted."""
    axes = []
    for k, (v, lo, hi) in enumerate(box.ranges):
        if k == 0:
            lo, hi = first_lo, first_hi
        axes.append(np.arange(lo, hi + 1, dtype=np.int64))
    grids = np.ix_(*axes)
    return {v: g for (v, _, _), g in zip(box.ranges, grids)}, tuple(len(a) for a in axes)


def brute_solve(ctx: BeattyCtx, s: System, box: SearchBox, limit: int = DEFAULT_LIMIT,
                first_only: bool = False, workers: int = 1) -> list[dict[str, int]]:
    """Every point of the box satisfying s, in lexicographic order of the declared variables."""
    missing = [v for v in s.variables if v not in {r[0] for r in box.ranges}]
    if missing:
        raise ValueError(f"box has no range for {', '.join(missing)}")
    box = SearchBox(tuple(r for v in s.variables for r in box.ranges if r[0] == v))
    total = box.count()
    if total > limit:
        raise BoxTooLarge(f"{total} candidates exceed the limit {limit}")
    if not box.ranges:
        return [{}] if brute_check(ctx, s, {}) else []
    names = [r[0] for r in box.ranges]
    _, lo0, hi0 = box.ranges[0]
    per_row = max(1, total // (hi0 - lo0 + 1))
    step = max(1, ROW_CHUNK // per_row)
    chunks = [(a, min(a + step - 1, hi0)) for a in range(lo0, hi0 + 1, step)]

    def run(chunk):
        env, shape = _axes(box, *chunk)
        mask = np.ones(shape, dtype=bool)
        for a in s.atoms:
            mask &= _atom_mask(ctx, a, env, shape)
            if not mask.any():
                break
        hits = np.flatnonzero(mask)
        return _coords(env, names, shape, hits[:1] if first_only else hits)

    out: list[dict[str, int]] = []
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i in range(0, len(chunks), workers):
                for got in pool.map(run, chunks[i:i + workers]):
                    out += got
                if first_only and out:
                    return out[:1]
        return out
    for ch in chunks:
        out += run(ch)
        if first_only and out:
            return out[:1]
    return out


def brute_image(ctx: BeattyCtx, H: Term, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """(xs, H(xs)) for the one-variable term H over lo..hi."""
    names = H.variables()
    if len(names) > 1:
        raise ValueError("brute_image needs a term in at most one variable")
    xs = np.arange(lo, hi + 1, dtype=np.int64)
    env = {names[0]: xs} if names else {}
    vals = np.broadcast_to(veval(ctx, H, env), xs.shape).astype(np.int64)
    return xs, vals


def brute_values(ctx: BeattyCtx, H: Term, lo: int, hi: int) -> dict[int, list[int]]:
    """Map each value of H on lo..hi to its ascending preimage."""
    xs, vals = brute_image(ctx, H, lo, hi)
    out: dict[int, list[int]] = {}
    for x, v in zip(xs.tolist(), vals.tolist()):
        out.setdefault(v, []).append(x)
    return out


def exists_in_box(ctx: BeattyCtx, s: System, bound: int, limit: int = DEFAULT_LIMIT) -> bool:
    return bool(brute_solve(ctx, s, SearchBox.uniform(s.variables, bound), limit, first_only=True))


__all__ = ["SearchBox", "BoxTooLarge", "brute_check", "brute_solve", "brute_image", "brute_values",
           "exists_in_box", "vfloor", "veval"]
