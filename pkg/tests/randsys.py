"""Seeded random systems: at most two variables, one equation of f-depth <= 2,
two fractional-part atoms, coefficients in [-3, 3]."""

from __future__ import annotations

import random

VARS = ("x", "y")


def _coef(rng: random.Random) -> int:
    return rng.choice([-3, -2, -1, 1, 2, 3])


def _scaled(c: int, body: str) -> str:
    return body if c == 1 else f"-{body}" if c == -1 else f"{c}*{body}"


def _arg(rng: random.Random, names) -> str:
    v = rng.choice(names)
    kind = rng.random()
    if kind < 0.55:
        return v
    if kind < 0.8 or len(names) == 1:
        return f"{rng.choice([2, 3])}*{v}"
    a, b = names
    return f"{a} + {b}" if rng.random() < 0.5 else f"{a} - {b}"


def _eq_term(rng: random.Random, names) -> str:
    kind = rng.random()
    v = rng.choice(names)
    if kind < 0.2:
        return v
    if kind < 0.65:
        return f"f({_arg(rng, names)})"
    if kind < 0.85:
        return f"f(f({v}))"
    return f"f(f({v}) + {rng.choice(names)})"


def equation(rng: random.Random, names) -> str:
    parts = []
    for k in range(rng.randint(1, 3)):
        c = _coef(rng)
        t = _scaled(abs(c), _eq_term(rng, names))
        parts.append(("- " if c < 0 else "+ ") + t if k else ("-" if c < 0 else "") + t)
    return " ".join(parts) + f" = {rng.randint(-60, 60)}"


def _frac_atom(rng: random.Random, names) -> str:
    lhs = []
    for _ in range(rng.randint(1, 2)):
        v = rng.choice(names)
        body = rng.choice([f"frac({v})", f"frac({v})", f"frac(f({v}))", f"frac(2*{v})"] +
                          ([f"frac({names[0]} + {names[1]})"] if len(names) > 1 else []))
        c = _coef(rng)
        lhs.append((c, body))
    text = " ".join((("- " if c < 0 else "+ ") if k else ("-" if c < 0 else "")) + _scaled(abs(c), b)
                    for k, (c, b) in enumerate(lhs))
    rel = rng.choice(["<", ">"])
    r = rng.random()
    if r < 0.4:
        rhs = f"frac({rng.randint(1, 9)})"
    elif r < 0.7:
        rhs = f"{rng.randint(-2, 2)}"
    else:
        rhs = f"frac({rng.randint(1, 9)}) + {rng.randint(-1, 1)}"
    return f"{text} {rel} {rhs}"


def random_system(rng: random.Random) -> str:
    names = VARS[: rng.randint(1, 2)]
    atoms = []
    if rng.random() < 0.85:
        atoms.append(equation(rng, names))
    for _ in range(rng.randint(0 if atoms else 1, 2)):
        atoms.append(_frac_atom(rng, names))
    return "; ".join(atoms)


def corpus(seed: int, count: int) -> list[str]:
    rng = random.Random(seed)
    return [random_system(rng) for _ in range(count)]
