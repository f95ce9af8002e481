"""Vectorised candidate scans over x = 1, 2, ..., B, -1, -2, ..., -B.

For each candidate the chain x, f(x), f^2(x), ... and the fractional parts
[alpha*f^i(x)] are computed in float64 with a rigorous error margin;
entries within the margin of a decision boundary are recomputed exactly.
The first candidate (in scan order) passing the exact predicate wins.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .beatty import BeattyCtx

CHUNK = 4096


def scan_order(budget: int):
    """Chunks (start, stop, step) covering 1..budget then -1..-budget."""
    out = []
    for lo in range(1, budget + 1, CHUNK):
        out.append((lo, min(lo + CHUNK, budget + 1), 1))
    for lo in range(1, budget + 1, CHUNK):
        out.append((-lo, -min(lo + CHUNK, budget + 1), -1))
    return out


def chain_chunk(ctx: BeattyCtx, xs: np.ndarray, depth: int):
    """Exact chains (depth+1 levels) and float fractional parts with margins."""
    a = ctx.alpha_float
    ys = [xs]
    fracs, margins = [], []
    y = xs
    for lvl in range(depth + 1):
        prod = a * y.astype(np.float64)
        fl = np.floor(prod)
        fr = prod - fl
        m = 1e-15 * (np.abs(prod) + 1.0) * 4
        risky = np.nonzero((fr < m) | (fr > 1 - m))[0]
        fl = fl.astype(np.int64)
        for k in risky:
            fl[k] = ctx.floor_mul(int(y[k]))
        fr[risky] = np.clip(prod[risky] - fl[risky], 0.0, 1.0)
        fracs.append(fr)
        margins.append(m)
        if lvl < depth:
            y = fl
            ys.append(y)
    return ys, fracs, margins


def first_hit(ctx: BeattyCtx, depth: int, classify, exact, budget: int, workers: int = 1):
    """First x in scan order with exact(x) true.

    ``classify(fracs, margins)`` returns boolean arrays (sure, maybe) for a
    chunk; ``sure`` entries are accepted without the exact check only when
    ``exact`` is None.
    """
    chunks = scan_order(budget)

    def run(chunk):
        start, stop, step = chunk
        xs = np.arange(start, stop, step, dtype=np.int64)
        ys, fracs, margins = chain_chunk(ctx, xs, depth)
        sure, maybe = classify(fracs, margins)
        for k in np.nonzero(sure | maybe)[0]:
            x = int(xs[k])
            if exact(x):
                return x
        return None

    if workers <= 1:
        for ch in chunks:
            hit = run(ch)
            if hit is not None:
                return hit
        return None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for i in range(0, len(chunks), workers):
            wave = list(pool.map(run, chunks[i:i + workers]))
            for hit in wave:
                if hit is not None:
                    return hit
    return None
