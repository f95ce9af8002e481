"""Terms, atoms and systems of the language <Z, +, 0, 1, f>, with a parser and printer.

Concrete syntax (whitespace-insensitive)::

    system     := constraint { ";" constraint } [";"]
    constraint := sum "=" sum | sum "=" sum "mod" INT | fsum ("<"|">") fsum
    sum        := prod { ("+"|"-") prod }
    prod       := INT ["*" fapp] | fapp
    fapp       := "f" ["^" INT] "(" sum ")" | VAR | INT | "(" sum ")"
    fsum       := fitem { ("+"|"-") fitem }
    fitem      := [INT "*"] "frac" "(" sum ")" | INT

A leading minus in front of any product is accepted as negation, and
``#`` starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


# terms -------------------------------------------------------------------------


class Term:
    __slots__ = ()

    def variables(self) -> list[str]:
        out: list[str] = []
        _collect_vars(self, out)
        return out

    def __add__(self, other):
        return Add(self, other)

    def __sub__(self, other):
        return Add(self, Neg(other))

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True, slots=True)
class IntLit(Term):
    value: int


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Neg(Term):
    arg: Term


@dataclass(frozen=True, slots=True)
class ScalarMul(Term):
    coeff: int
    arg: Term


@dataclass(frozen=True, slots=True)
class F(Term):
    """``f^power(arg)``; power is at least 1."""

    arg: Term
    power: int = 1

    def __post_init__(self):
        if self.power < 1:
            raise ValueError("F.power must be at least 1")


def f_pow(t: Term, k: int) -> Term:
    return t if k == 0 else F(t, k)


def _collect_vars(t: Term, out: list[str]) -> None:
    if isinstance(t, Var):
        if t.name not in out:
            out.append(t.name)
    elif isinstance(t, Add):
        _collect_vars(t.left, out)
        _collect_vars(t.right, out)
    elif isinstance(t, (Neg, ScalarMul, F)):
        _collect_vars(t.arg, out)


def substitute(t: Term, env: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return env.get(t.name, t)
    if isinstance(t, Add):
        return Add(substitute(t.left, env), substitute(t.right, env))
    if isinstance(t, Neg):
        return Neg(substitute(t.arg, env))
    if isinstance(t, ScalarMul):
        return ScalarMul(t.coeff, substitute(t.arg, env))
    if isinstance(t, F):
        return F(substitute(t.arg, env), t.power)
    return t


def _show_prod(t: Term) -> str:
    """Render t where the grammar expects a product."""
    if isinstance(t, (Add, Neg)):
        return f"({show_term(t)})"
    return show_term(t)


def _show_fapp(t: Term) -> str:
    """Render t where the grammar expects an fapp."""
    if isinstance(t, (Add, Neg, ScalarMul)):
        return f"({show_term(t)})"
    return show_term(t)


def show_term(t: Term) -> str:
    if isinstance(t, IntLit):
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, F):
        head = "f" if t.power == 1 else f"f^{t.power}"
        return f"{head}({show_term(t.arg)})"
    if isinstance(t, ScalarMul):
        return f"{t.coeff}*{_show_fapp(t.arg)}"
    if isinstance(t, Neg):
        return f"-{_show_prod(t.arg)}"
    if isinstance(t, Add):
        left = show_term(t.left)
        if isinstance(t.right, Neg):
            return f"{left} - {_show_prod(t.right.arg)}"
        return f"{left} + {_show_prod(t.right)}"
    raise TypeError(f"not a term: {t!r}")


# atoms ------------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgEq:
    """``lhs = rhs``."""

    lhs: Term
    rhs: Term

    def variables(self) -> list[str]:
        return _merge(self.lhs.variables(), self.rhs.variables())

    def __str__(self):
        return f"{show_term(self.lhs)} = {show_term(self.rhs)}"


@dataclass(frozen=True)
class Cong:
    """``lhs = rhs mod modulus``, i.e. lhs - rhs is divisible by modulus."""

    lhs: Term
    rhs: Term
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")

    def normalized(self) -> tuple[Term, int]:
        """(term, residue) with term = residue (mod modulus) and 0 <= residue < modulus."""
        if isinstance(self.rhs, IntLit):
            return self.lhs, self.rhs.value % self.modulus
        return Add(self.lhs, Neg(self.rhs)), 0

    def variables(self) -> list[str]:
        return _merge(self.lhs.variables(), self.rhs.variables())

    def __str__(self):
        return f"{show_term(self.lhs)} = {show_term(self.rhs)} mod {self.modulus}"


@dataclass(frozen=True)
class FracItem:
    """``coeff * frac(term)``, or the integer ``coeff`` when term is None."""

    coeff: int
    term: Term | None = None

    def __str__(self):
        if self.term is None:
            return str(self.coeff)
        body = f"frac({show_term(self.term)})"
        if self.coeff == 1:
            return body
        if self.coeff == -1:
            return f"-{body}"
        return f"{self.coeff}*{body}"


@dataclass(frozen=True)
class NonAlg:
    """A strict comparison between two sums of fractional parts and integers."""

    lhs: tuple[FracItem, ...]
    rel: str
    rhs: tuple[FracItem, ...]

    def __post_init__(self):
        if self.rel not in ("<", ">"):
            raise ValueError("NonAlg relation must be strict")

    def strict_less(self) -> tuple[tuple[FracItem, ...], tuple[FracItem, ...]]:
        """(small, big) with the atom meaning sum(small) < sum(big)."""
        return (self.lhs, self.rhs) if self.rel == "<" else (self.rhs, self.lhs)

    def variables(self) -> list[str]:
        out: list[str] = []
        for it in self.lhs + self.rhs:
            if it.term is not None:
                out = _merge(out, it.term.variables())
        return out

    def __str__(self):
        return f"{_show_fsum(self.lhs)} {self.rel} {_show_fsum(self.rhs)}"


def _show_fsum(items) -> str:
    if not items:
        return "0"
    out = str(items[0])
    for it in items[1:]:
        if it.coeff < 0:
            out += " - " + str(FracItem(-it.coeff, it.term))
        else:
            out += " + " + str(it)
    return out


def _merge(a: list[str], b: list[str]) -> list[str]:
    out = list(a)
    for v in b:
        if v not in out:
            out.append(v)
    return out


@dataclass(frozen=True)
class System:
    """A finite conjunction of atoms over the declared variables."""

    atoms: tuple
    variables: tuple[str, ...] = field(default=None)

    def __post_init__(self):
        if self.variables is None:
            vs: list[str] = []
            for a in self.atoms:
                vs = _merge(vs, a.variables())
            object.__setattr__(self, "variables", tuple(vs))

    def __str__(self):
        return "; ".join(str(a) for a in self.atoms)


# parser -------------------------------------------------------------------------


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        extra = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"line {line}, column {column}: {message}{extra}")


_TOKEN = re.compile(r"\s*(?:(#[^\n]*)|(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")
KEYWORDS = frozenset({"f", "frac", "mod"})
_VAR = re.compile(r"[a-z][a-z0-9_]*\Z")


@dataclass(frozen=True)
class _Tok:
    kind: str  # INT, NAME, SYM, EOF
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only whitespace remains
            for k in range(pos, len(text)):
                if text[k] == "\n":
                    line, line_start = line + 1, k + 1
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        # account for newlines skipped as whitespace
        for k in range(pos, start):
            if text[k] == "\n":
                line, line_start = line + 1, k + 1
        pos = m.end()
        if m.lastindex is None:
            break
        col = start - line_start + 1
        if m.group(1):
            continue
        if m.group(2):
            toks.append(_Tok("INT", m.group(2), line, col))
        elif m.group(3):
            toks.append(_Tok("NAME", m.group(3), line, col))
        else:
            toks.append(_Tok("SYM", m.group(4), line, col))
    toks.append(_Tok("EOF", "", line, len(text) - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, expected=()):
        t = self.tok
        raise FormulaSyntaxError(msg, t.line, t.col, expected)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("SYM", "NAME") and self.tok.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            found = repr(self.tok.text) if self.tok.kind != "EOF" else "end of input"
            self.error(f"unexpected {found}", {repr(text)})
        t = self.tok
        self.i += 1
        return t

    def integer(self) -> int:
        neg = False
        if self.at("-") and self.peek().kind == "INT":
            neg = True
            self.i += 1
        if self.tok.kind != "INT":
            self.error("expected an integer", {"INT"})
        v = int(self.tok.text)
        self.i += 1
        return -v if neg else v

    # grammar ----------------------------------------------------------------

    def system(self) -> System:
        atoms = [self.constraint()]
        while self.at(";"):
            self.i += 1
            if self.tok.kind == "EOF":
                break
            atoms.append(self.constraint())
        if self.tok.kind != "EOF":
            self.error(f"unexpected {self.tok.text!r}", {"';'", "end of input"})
        return System(tuple(atoms))

    def constraint(self):
        lhs = self.side()
        if self.at("="):
            self.i += 1
            rhs = self.side()
            lt, rt = self._as_term(lhs), self._as_term(rhs)
            if self.at("mod"):
                self.i += 1
                mtok = self.tok
                m = self.integer()
                if m < 1:
                    raise FormulaSyntaxError("modulus must be positive", mtok.line, mtok.col)
                return Cong(lt, rt, m)
            return AlgEq(lt, rt)
        if self.at("<") or self.at(">"):
            rel = self.tok.text
            self.i += 1
            rhs = self.side()
            return NonAlg(self._as_fsum(lhs), rel, self._as_fsum(rhs))
        self.error("expected a relation", {"'='", "'<'", "'>'"})

    # A side is parsed generically as signed items and then checked against
    # the sort the relation demands.

    def side(self):
        items = [self.item(first=True)]
        while self.at("+") or self.at("-"):
            sign = -1 if self.tok.text == "-" else 1
            self.i += 1
            items.append((sign, self.item(first=False)))
        first = items[0]
        return [(1, first)] + items[1:]

    def item(self, first: bool):
        tok = self.tok
        if self.at("-") and self.peek().kind != "INT":
            self.i += 1
            inner = self.item(first=False)
            return ("neg", inner, tok)
        if self.tok.kind == "INT" or (self.at("-") and self.peek().kind == "INT"):
            n = self.integer()
            if self.at("*"):
                self.i += 1
                if self.at("frac"):
                    return ("frac", n, self.frac_call(), tok)
                return ("term", ScalarMul(n, self.fapp()), tok)
            return ("int", n, tok)
        if self.at("frac"):
            return ("frac", 1, self.frac_call(), tok)
        return ("term", self.fapp(), tok)

    def frac_call(self) -> Term:
        self.expect("frac")
        self.expect("(")
        t = self.sum()
        self.expect(")")
        return t

    def sum(self) -> Term:
        acc = self.prod(first=True)
        while self.at("+") or self.at("-"):
            neg = self.tok.text == "-"
            self.i += 1
            p = self.prod(first=False)
            acc = Add(acc, Neg(p) if neg else p)
        return acc

    def prod(self, first: bool) -> Term:
        if self.at("-") and self.peek().kind != "INT":
            self.i += 1
            return Neg(self.prod(first=False))
        if self.tok.kind == "INT" or (self.at("-") and self.peek().kind == "INT"):
            n = self.integer()
            if self.at("*"):
                self.i += 1
                return ScalarMul(n, self.fapp())
            return IntLit(n)
        return self.fapp()

    def fapp(self) -> Term:
        tok = self.tok
        if self.at("f"):
            self.i += 1
            power = 1
            if self.at("^"):
                self.i += 1
                if self.tok.kind != "INT":
                    self.error("expected an exponent", {"INT"})
                power = int(self.tok.text)
                self.i += 1
            self.expect("(")
            t = self.sum()
            self.expect(")")
            return f_pow(t, power)
        if self.at("("):
            self.i += 1
            t = self.sum()
            self.expect(")")
            return t
        if tok.kind == "INT":
            self.i += 1
            return IntLit(int(tok.text))
        if tok.kind == "NAME" and tok.text not in KEYWORDS:
            if not _VAR.match(tok.text):
                self.error(f"invalid variable name {tok.text!r}", {"VAR"})
            self.i += 1
            return Var(tok.text)
        found = repr(tok.text) if tok.kind != "EOF" else "end of input"
        self.error(f"unexpected {found}", {"'f'", "'('", "INT", "VAR"})

    # sort checks ---------------------------------------------------------------

    def _as_term(self, items) -> Term:
        acc = None
        for sign, it in items:
            kind = it[0]
            if kind == "frac":
                t = it[-1]
                raise FormulaSyntaxError("frac(...) may only appear in a strict comparison",
                                         t.line, t.col)
            if kind == "neg":
                inner = self._as_term([(1, it[1])])
                t = inner if isinstance(inner, Neg) else Neg(inner)
            elif kind == "int":
                t = IntLit(it[1])
            else:
                t = it[1]
            if acc is None:
                acc = t if sign == 1 else Neg(t)
            else:
                acc = Add(acc, Neg(t) if sign == -1 else t)
        return acc

    def _as_fsum(self, items) -> tuple[FracItem, ...]:
        out = []
        for sign, it in items:
            kind = it[0]
            if kind == "neg":
                sub = self._as_fsum([(1, it[1])])
                out.extend(FracItem(-sign * x.coeff, x.term) for x in sub)
            elif kind == "frac":
                out.append(FracItem(sign * it[1], it[2]))
            elif kind == "int":
                out.append(FracItem(sign * it[1]))
            else:
                t = it[-1]
                raise FormulaSyntaxError("only frac(...) terms and integers may appear "
                                         "in a strict comparison", t.line, t.col)
        return tuple(out)


def parse_formula(text: str) -> System:
    """Parse a ``;``-separated conjunction of constraints."""
    return _Parser(text).system()


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.sum()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.text!r}", {"end of input"})
    return t


def pretty(s) -> str:
    """Render a system, atom or term back in the concrete syntax."""
    if isinstance(s, Term):
        return show_term(s)
    return str(s)
