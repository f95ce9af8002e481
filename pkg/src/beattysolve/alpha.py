"""Exact arithmetic in Q[alpha] and Q(alpha) for one fixed transcendental alpha.

Because alpha is transcendental, Q[alpha] behaves like a polynomial ring:
two expressions are equal exactly when they are equal as polynomials.
Equality tests are therefore symbolic. Sign, order and floor questions are
settled by evaluating at alpha through a nested family of dyadic
enclosures, refined (64 bits, then doubled) until the answer is forced.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from pathlib import Path

import mpmath

START_BITS = 64
DEFAULT_PRECISION_CAP = 1 << 20


class PrecisionCapExceeded(ArithmeticError):
    """Raised when a query needs more bits of alpha than the cap allows."""


@dataclass(frozen=True)
class Interval:
    """Closed rational interval [lo, hi]."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


def _shift_floor(n: int, s: int) -> int:
    return n << s if s >= 0 else n >> -s


def _shift_ceil(n: int, s: int) -> int:
    return n << s if s >= 0 else -((-n) >> -s)


class AlphaProvider:
    """Nested dyadic enclosures of alpha.

    ``dyadic(bits)`` returns ``(lo, hi, scale)`` with
    ``lo / 2**scale <= alpha <= hi / 2**scale`` and width at most
    ``2**-bits``. Enclosures are computed at levels 64, 128, 256, ... and
    each level is intersected with the one below, so answers at a higher
    precision never contradict answers at a lower one.
    """

    def __init__(self, name: str, enclose, cap: int = DEFAULT_PRECISION_CAP):
        self.name = name
        self._enclose = enclose  # level -> (lo, hi, scale)
        self.cap = cap
        self._levels: dict[int, tuple[int, int, int]] = {}
        self._lock = threading.Lock()
        self.max_bits = 0

    # constructors -------------------------------------------------------

    @classmethod
    def named(cls, name: str, cap: int = DEFAULT_PRECISION_CAP) -> "AlphaProvider":
        consts = {"pi": "pi", "e": "e", "ln2": "ln2"}
        if name not in consts:
            raise ValueError(f"unknown constant {name!r}; expected pi, e or ln2")
        attr = consts[name]

        def enclose(level: int):
            with mpmath.workprec(level + 40):
                man, exp = mpmath.mpf(getattr(mpmath.mp, attr)).man_exp
                man, exp = int(man), int(exp)
            scale = level + 4
            # mpmath rounds its constants to within one ulp; allow two.
            s = exp + scale
            return _shift_floor(man - 2, s), _shift_ceil(man + 2, s), scale

        return cls(name, enclose, cap)

    @classmethod
    def from_digits(cls, integer_part: int, digits: str, cap: int = DEFAULT_PRECISION_CAP,
                    name: str = "digits") -> "AlphaProvider":
        """alpha = integer_part.digits..., the digit string being a truncation."""
        digits = "".join(digits.split())
        if not digits.isdigit():
            raise ValueError("digit string must contain decimal digits only")
        if integer_part < 0:
            raise ValueError("alpha must be positive")

        def enclose(level: int):
            n = math.ceil((level + 3) * math.log10(2)) + 1
            if n > len(digits):
                raise PrecisionCapExceeded(
                    f"{level} bits of alpha need {n} digits; the file has {len(digits)}")
            d = integer_part * 10 ** n + int(digits[:n])
            scale = level + 4
            lo = (d << scale) // 10 ** n
            hi = -((-(d + 1) << scale) // 10 ** n)
            return lo, hi, scale

        return cls(name, enclose, cap)

    @classmethod
    def from_digit_file(cls, path, cap: int = DEFAULT_PRECISION_CAP) -> "AlphaProvider":
        """Line 1 holds the integer part, line 2 the fractional digits."""
        lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
        if len(lines) < 2:
            raise ValueError(f"{path}: expected an integer line and a digit line")
        return cls.from_digits(int(lines[0]), "".join(lines[1:]), cap, name=f"digits:{path}")

    @classmethod
    def from_spec(cls, spec: str, cap: int = DEFAULT_PRECISION_CAP) -> "AlphaProvider":
        """Parse ``pi``, ``e``, ``ln2`` or ``digits:<path>``."""
        if spec.startswith("digits:"):
            return cls.from_digit_file(spec[len("digits:"):], cap)
        return cls.named(spec, cap)

    # enclosures ------------------------------------------------------------

    def _level(self, level: int) -> tuple[int, int, int]:
        got = self._levels.get(level)
        if got is not None:
            return got
        lo, hi, scale = self._enclose(level)
        if level > START_BITS:
            plo, phi, pscale = self._level(level // 2)
            s = scale - pscale
            lo, hi = max(lo, plo << s), min(hi, phi << s)
        if lo > hi:
            raise ArithmeticError("inconsistent enclosures of alpha")
        if lo <= 0:
            raise ValueError("alpha must be positive")
        self._levels[level] = (lo, hi, scale)
        return lo, hi, scale

    def dyadic(self, bits: int) -> tuple[int, int, int]:
        if bits > self.cap:
            raise PrecisionCapExceeded(f"{bits} bits requested, cap is {self.cap}")
        level = START_BITS
        while level < bits:
            level *= 2
        with self._lock:
            got = self._level(level)
            self.max_bits = max(self.max_bits, level)
        return got

    def refine(self, bits: int) -> Interval:
        lo, hi, scale = self.dyadic(bits)
        return Interval(Fraction(lo, 1 << scale), Fraction(hi, 1 << scale))

    def __repr__(self) -> str:
        return f"AlphaProvider({self.name!r})"


def refine_alpha(provider: AlphaProvider, bits: int) -> Interval:
    return provider.refine(bits)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


class AlphaPoly:
    """A polynomial in alpha with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs", "__dict__")

    def __init__(self, coeffs=()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def const(cls, c) -> "AlphaPoly":
        return cls((c,))

    @classmethod
    def linear(cls, a, b) -> "AlphaPoly":
        """The polynomial a*alpha + b."""
        return cls((b, a))

    @classmethod
    def lift(cls, x) -> "AlphaPoly":
        return x if isinstance(x, AlphaPoly) else cls.const(x)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def const_value(self) -> Fraction:
        if len(self.coeffs) > 1:
            raise ValueError(f"{self} is not a constant")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if i < len(self.coeffs) else Fraction(0)

    # ring operations -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, AlphaPoly):
            if isinstance(other, (int, Rational)):
                other = AlphaPoly.const(other)
            else:
                return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return AlphaPoly(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return AlphaPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, (AlphaPoly, int, Rational)):
            return NotImplemented
        return self + (-AlphaPoly.lift(other))

    def __rsub__(self, other):
        return AlphaPoly.lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return AlphaPoly(c * other for c in self.coeffs)
        if not isinstance(other, AlphaPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return ZERO
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return AlphaPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def divmod(self, other: "AlphaPoly") -> tuple["AlphaPoly", "AlphaPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.degree
        while len(rem) - 1 >= d and any(rem):
            shift = len(rem) - 1 - d
            c = rem[-1] / other.lead
            q[shift] = c
            for i, b in enumerate(other.coeffs):
                rem[shift + i] -= c * b
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return AlphaPoly(q), AlphaPoly(rem)

    def monic(self) -> "AlphaPoly":
        return self * (1 / self.lead) if self.coeffs else self

    def gcd(self, other: "AlphaPoly") -> "AlphaPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic() if not a.is_zero() else ONE

    # comparisons ------------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, AlphaPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Rational)):
            return self.coeffs == AlphaPoly.const(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(("AlphaPoly", self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    # evaluation ---------------------------------------------------------------

    @cached_property
    def _integral(self) -> tuple[int, tuple[int, ...]]:
        den = 1
        for c in self.coeffs:
            den = math.lcm(den, c.denominator)
        return den, tuple(int(c * den) for c in self.coeffs)

    def enclose(self, lo: int, hi: int, scale: int) -> tuple[int, int, int]:
        """Integer enclosure ``[L, H] / Q`` of the value at alpha.

        ``alpha`` is taken from ``[lo, hi] / 2**scale`` with ``lo > 0``.
        Returns ``(L, H, Q)``.
        """
        den, ints = self._integral
        if not ints:
            return 0, 0, 1
        d = len(ints) - 1
        L = H = 0
        plo = phi = 1
        for i, a in enumerate(ints):
            if a:
                s = scale * (d - i)
                if a > 0:
                    L += (a * plo) << s
                    H += (a * phi) << s
                else:
                    L += (a * phi) << s
                    H += (a * plo) << s
            plo *= lo
            phi *= hi
        return L, H, den << (scale * d)

    def interval(self, provider: AlphaProvider, bits: int = START_BITS) -> Interval:
        L, H, Q = self.enclose(*provider.dyadic(bits))
        return Interval(Fraction(L, Q), Fraction(H, Q))

    def approx(self, provider: AlphaProvider) -> float:
        iv = self.interval(provider, START_BITS)
        return float((iv.lo + iv.hi) / 2)

    def __float__(self):
        raise TypeError("use approx(provider) to evaluate an AlphaPoly")

    # display --------------------------------------------------------------------

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = "alpha" if i == 1 else f"alpha^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"AlphaPoly({str(self)!r})"


ZERO = AlphaPoly()
ONE = AlphaPoly.const(1)
ALPHA = AlphaPoly.linear(1, 0)


class AlphaRat:
    """An element of Q(alpha) as num/den in lowest terms with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = AlphaPoly.lift(num)
        den = ONE if den is None else AlphaPoly.lift(den)
        if den.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if den.is_const():
            num, den = num * (1 / den.coeffs[0]), ONE
        elif num.is_zero():
            den = ONE
        else:
            g = num.gcd(den)
            if not g.is_const():
                num, den = num.divmod(g)[0], den.divmod(g)[0]
            lc = den.lead
            if lc != 1:
                num, den = num * (1 / lc), den * (1 / lc)
        self.num: AlphaPoly = num
        self.den: AlphaPoly = den

    @classmethod
    def lift(cls, x) -> "AlphaRat":
        return x if isinstance(x, AlphaRat) else cls(x)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den == ONE

    def __add__(self, other):
        o = _rat_or_none(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return AlphaRat(self.num + o.num, self.den)
        return AlphaRat(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return AlphaRat(-self.num, self.den)

    def __sub__(self, other):
        o = _rat_or_none(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return AlphaRat.lift(other) - self

    def __mul__(self, other):
        o = _rat_or_none(other)
        if o is None:
            return NotImplemented
        return AlphaRat(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _rat_or_none(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero in Q(alpha)")
        return AlphaRat(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return AlphaRat.lift(other) / self

    def __eq__(self, other):
        o = _rat_or_none(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash(("AlphaRat", self.num.coeffs, self.den.coeffs))

    def interval(self, provider: AlphaProvider, bits: int = START_BITS) -> Interval:
        while True:
            dyad = provider.dyadic(bits)
            nl, nh, nq = self.num.enclose(*dyad)
            dl, dh, dq = self.den.enclose(*dyad)
            if dl > 0 or dh < 0:
                ends = [Fraction(a * dq, b * nq) for a in (nl, nh) for b in (dl, dh)]
                return Interval(min(ends), max(ends))
            bits *= 2

    def approx(self, provider: AlphaProvider) -> float:
        iv = self.interval(provider)
        return float((iv.lo + iv.hi) / 2)

    def __str__(self):
        if self.den == ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"AlphaRat({str(self)!r})"


def _rat_or_none(x):
    if isinstance(x, AlphaRat):
        return x
    if isinstance(x, (AlphaPoly, int, Rational)):
        return AlphaRat(x)
    return None


def alpharat_arith(a, b, op: str) -> AlphaRat:
    """Apply one of ``+ - * /`` to two elements of Q(alpha)."""
    a, b = AlphaRat.lift(a), AlphaRat.lift(b)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ValueError(f"unknown operator {op!r}")


# sign, order, floor ---------------------------------------------------------------


def _poly_sign(p: AlphaPoly, provider: AlphaProvider) -> int:
    if p.is_zero():
        return 0
    if p.is_const():
        return 1 if p.coeffs[0] > 0 else -1
    bits = START_BITS
    while True:
        L, H, _ = p.enclose(*provider.dyadic(bits))
        if L > 0:
            return 1
        if H < 0:
            return -1
        bits *= 2


def sign_at_alpha(v, provider: AlphaProvider) -> int:
    """Exact sign (-1, 0 or 1) of a value of Q(alpha) at alpha."""
    if isinstance(v, AlphaRat):
        return _poly_sign(v.num, provider) * _poly_sign(v.den, provider)
    if isinstance(v, AlphaPoly):
        return _poly_sign(v, provider)
    v = _frac(v)
    return (v > 0) - (v < 0)


def compare_values(a, b, provider: AlphaProvider) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b."""
    if isinstance(a, AlphaRat) or isinstance(b, AlphaRat):
        return sign_at_alpha(AlphaRat.lift(a) - AlphaRat.lift(b), provider)
    return sign_at_alpha(AlphaPoly.lift(a) - AlphaPoly.lift(b), provider)


def floor_value(v, provider: AlphaProvider) -> int:
    """Exact floor of a value of Q(alpha)."""
    if not isinstance(v, (AlphaRat, AlphaPoly)):
        return math.floor(_frac(v))
    v = AlphaRat.lift(v)
    if v.num.is_const() and v.den == ONE:
        return math.floor(v.num.const_value())
    bits = START_BITS
    while True:
        iv = v.interval(provider, bits)
        a, b = math.floor(iv.lo), math.floor(iv.hi)
        if a == b:
            return a
        if b == a + 1 and (v.num - v.den * b).is_zero():
            return b
        bits *= 2


def ceil_value(v, provider: AlphaProvider) -> int:
    if isinstance(v, (AlphaRat, AlphaPoly)):
        return -floor_value(-v, provider)
    return math.ceil(_frac(v))


def is_rational_multiple(F: AlphaPoly, G: AlphaPoly):
    """Return r with G = r * F exactly, or None. F must be nonzero."""
    if F.is_zero():
        raise ValueError("F must be a nonzero polynomial")
    if G.is_zero():
        return Fraction(0)
    if G.degree != F.degree:
        return None
    r = G.lead / F.lead
    return r if G == F * r else None


def upper_bound(v, provider: AlphaProvider, bits: int = START_BITS) -> Fraction:
    """A rational upper bound of the value at alpha."""
    if isinstance(v, (AlphaPoly, AlphaRat)):
        return v.interval(provider, bits).hi
    return _frac(v)
