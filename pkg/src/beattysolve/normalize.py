"""Canonical forms: congruence removal and flattening of f over sums.

After flattening every f-application is a chain ``f^k(c*x)`` and every
fractional part is ``frac(f^k(c*x))`` for a single variable x.
Canonical atoms are

* ``CanonEq``:   sum coeff * leaf + const = 0
* ``CanonIneq``: sum coeff * [alpha*leaf] < sum b_a * [alpha*a] + ell

where a leaf is ``f^k(c*x)`` (``k = 0`` means the variable itself).
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

from .alpha import AlphaPoly, sign_at_alpha
from .beatty import BeattyCtx, ConstAtom, FracValue, iterate_f
from .syntax import (
    Add,
    AlgEq,
    Cong,
    F,
    FracItem,
    IntLit,
    Neg,
    NonAlg,
    ScalarMul,
    System,
    Term,
    Var,
    f_pow,
    substitute,
)

log = logging.getLogger(__name__)

CASE_WARN = 4096
DEFAULT_CASE_LIMIT = 1 << 20


class CaseExplosion(RuntimeError):
    pass


# leaves and linear forms ----------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Leaf:
    """``f^power(scale * var)``.

    Scaled power-0 leaves only occur inside fractional parts; linear forms
    store ``c*x`` as the coefficient c on the bare variable.
    """

    var: str
    scale: int = 1
    power: int = 0

    def __post_init__(self):
        if self.scale == 0:
            raise ValueError("leaf scale must be nonzero")

    def term(self) -> Term:
        base = Var(self.var) if self.scale == 1 else ScalarMul(self.scale, Var(self.var))
        return f_pow(base, self.power)

    def value(self, ctx: BeattyCtx, env: dict[str, int]) -> int:
        return iterate_f(ctx, self.scale * env[self.var], self.power)

    def __str__(self):
        if self.power == 0:
            return self.var
        head = "f" if self.power == 1 else f"f^{self.power}"
        inner = self.var if self.scale == 1 else f"{self.scale}*{self.var}"
        return f"{head}({inner})"


class LinForm:
    """An integer combination of leaves plus an integer constant."""

    __slots__ = ("terms", "const")

    def __init__(self, terms=None, const: int = 0):
        items: dict[Leaf, int] = {}
        for k, v in dict(terms or {}).items():
            if k.power == 0 and k.scale != 1:
                k, v = Leaf(k.var), v * k.scale
            items[k] = items.get(k, 0) + v
        self.terms: tuple[tuple[Leaf, int], ...] = tuple(sorted((k, v) for k, v in items.items() if v))
        self.const = const

    @classmethod
    def leaf(cls, lf: Leaf, coeff: int = 1) -> "LinForm":
        return cls({lf: coeff})

    @classmethod
    def constant(cls, c: int) -> "LinForm":
        return cls({}, c)

    def items(self):
        return self.terms

    def as_dict(self) -> dict[Leaf, int]:
        return dict(self.terms)

    def is_const(self) -> bool:
        return not self.terms

    def variables(self) -> list[str]:
        out: list[str] = []
        for lf, _ in self.terms:
            if lf.var not in out:
                out.append(lf.var)
        return out

    def __add__(self, other: "LinForm") -> "LinForm":
        d = self.as_dict()
        for k, v in other.terms:
            d[k] = d.get(k, 0) + v
        return LinForm(d, self.const + other.const)

    def __neg__(self) -> "LinForm":
        return self.scale(-1)

    def __sub__(self, other: "LinForm") -> "LinForm":
        return self + (-other)

    def scale(self, c: int) -> "LinForm":
        return LinForm({k: c * v for k, v in self.terms}, c * self.const)

    def value(self, ctx: BeattyCtx, env: dict[str, int]) -> int:
        return sum(c * lf.value(ctx, env) for lf, c in self.terms) + self.const

    def __eq__(self, other):
        return isinstance(other, LinForm) and self.terms == other.terms and self.const == other.const

    def __hash__(self):
        return hash((self.terms, self.const))

    def __str__(self):
        parts = []
        for lf, c in self.terms:
            parts.append((c, str(lf)))
        if self.const or not parts:
            parts.append((self.const, None))
        out = ""
        for i, (c, body) in enumerate(parts):
            mag = abs(c)
            txt = str(mag) if body is None else (body if mag == 1 else f"{mag}*{body}")
            if i == 0:
                out = ("-" if c < 0 else "") + txt
            else:
                out += (" - " if c < 0 else " + ") + txt
        return out

    __repr__ = __str__


# canonical atoms ----------------------------------------------------------------------


@dataclass(frozen=True)
class CanonEq:
    """form = 0."""

    form: LinForm

    def variables(self) -> list[str]:
        return self.form.variables()

    def holds(self, ctx: BeattyCtx, env) -> bool:
        return self.form.value(ctx, env) == 0

    def __str__(self):
        lhs = LinForm(self.form.as_dict())
        return f"{lhs} = {-self.form.const}"


@dataclass(frozen=True)
class CanonIneq:
    """sum lhs[leaf]*[alpha*leaf] < sum fracs[a]*[alpha*a] + ell."""

    lhs: tuple[tuple[Leaf, int], ...]
    fracs: tuple[tuple[int, int], ...] = ()
    ell: int = 0

    @classmethod
    def build(cls, lhs: dict, fracs: dict, ell: int) -> "CanonIneq":
        return cls(tuple(sorted((k, v) for k, v in lhs.items() if v)),
                   tuple(sorted((k, v) for k, v in fracs.items() if v and k)), ell)

    def variables(self) -> list[str]:
        out: list[str] = []
        for lf, _ in self.lhs:
            if lf.var not in out:
                out.append(lf.var)
        return out

    def rhs_value(self, ctx: BeattyCtx) -> AlphaPoly:
        acc = AlphaPoly.const(self.ell)
        for a, c in self.fracs:
            acc = acc + FracValue.of_int(ctx, a).value * c
        return acc

    def lhs_value(self, ctx: BeattyCtx, env) -> AlphaPoly:
        acc = AlphaPoly()
        for lf, c in self.lhs:
            acc = acc + FracValue.of_int(ctx, lf.value(ctx, env)).value * c
        return acc

    def holds(self, ctx: BeattyCtx, env) -> bool:
        return sign_at_alpha(self.rhs_value(ctx) - self.lhs_value(ctx, env), ctx.provider) > 0

    def __str__(self):
        left = [FracItem(c, lf.term()) for lf, c in self.lhs] or [FracItem(0)]
        right = [FracItem(c, IntLit(a)) for a, c in self.fracs]
        if self.ell or not right:
            right.append(FracItem(self.ell))
        return str(NonAlg(tuple(left), "<", tuple(right)))


def atom_holds(ctx: BeattyCtx, atom, env: dict[str, int]) -> bool:
    """Exact truth of any atom (surface or canonical) under env."""
    from .beatty import eval_term, frac_sum

    if isinstance(atom, (CanonEq, CanonIneq)):
        return atom.holds(ctx, env)
    if isinstance(atom, ConstAtom):
        return atom.value
    if isinstance(atom, AlgEq):
        return eval_term(ctx, atom.lhs, env) == eval_term(ctx, atom.rhs, env)
    if isinstance(atom, Cong):
        t, r = atom.normalized()
        return (eval_term(ctx, t, env) - r) % atom.modulus == 0
    if isinstance(atom, NonAlg):
        small, big = atom.strict_less()
        diff = frac_sum(ctx, big, env) - frac_sum(ctx, small, env)
        return sign_at_alpha(diff, ctx.provider) > 0
    raise TypeError(f"not an atom: {atom!r}")


def system_holds(ctx: BeattyCtx, s: System, env: dict[str, int]) -> bool:
    return all(atom_holds(ctx, a, env) for a in s.atoms)


# congruences -----------------------------------------------------------------------------


@dataclass
class WitnessMap:
    """Recovers values of the original variables from a desugared witness."""

    original: tuple[str, ...]
    substitutions: list[tuple[str, int, int, str]] = field(default_factory=list)

    def apply(self, env: dict[str, int]) -> dict[str, int]:
        env = dict(env)
        for var, m, r, fresh in reversed(self.substitutions):
            env[var] = m * env.get(fresh, 0) + r
        return {v: env.get(v, 0) for v in self.original}


def _fresh(base: str, taken: set[str]) -> str:
    k = 1
    while f"{base}_{k}" in taken:
        k += 1
    name = f"{base}_{k}"
    taken.add(name)
    return name


def _subst_atom(atom, env: dict[str, Term]):
    if isinstance(atom, AlgEq):
        return AlgEq(substitute(atom.lhs, env), substitute(atom.rhs, env))
    if isinstance(atom, Cong):
        return Cong(substitute(atom.lhs, env), substitute(atom.rhs, env), atom.modulus)
    if isinstance(atom, NonAlg):
        sub = lambda items: tuple(FracItem(i.coeff, None if i.term is None else substitute(i.term, env))
                                  for i in items)
        return NonAlg(sub(atom.lhs), atom.rel, sub(atom.rhs))
    return atom


def desugar_congruences(s: System) -> tuple[System, WitnessMap]:
    """Replace every congruence by equations.

    ``x = r mod m`` on a bare variable substitutes ``x := m*x' + r``
    everywhere; any other ``t = r mod m`` becomes ``t - m*q = r`` with a
    fresh q.
    """
    wm = WitnessMap(s.variables)
    taken = set(s.variables)
    atoms = list(s.atoms)
    out = []
    variables = list(s.variables)
    while atoms:
        a = atoms.pop(0)
        if not isinstance(a, Cong):
            out.append(a)
            continue
        t, r = a.normalized()
        m = a.modulus
        if m == 1:
            continue
        if isinstance(t, Var):
            fresh = _fresh(t.name, taken)
            env = {t.name: Add(ScalarMul(m, Var(fresh)), IntLit(r)) if r else ScalarMul(m, Var(fresh))}
            atoms = [_subst_atom(x, env) for x in atoms]
            out = [_subst_atom(x, env) for x in out]
            wm.substitutions.append((t.name, m, r, fresh))
            variables = [fresh if v == t.name else v for v in variables]
        else:
            q = _fresh("q", taken)
            out.append(AlgEq(Add(t, Neg(ScalarMul(m, Var(q)))), IntLit(r)))
            variables.append(q)
    return System(tuple(out), tuple(variables)), wm


# flattening ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class CaseSplit:
    cases: tuple[System, ...]
    provenance: tuple[tuple[str, ...], ...]

    def __len__(self):
        return len(self.cases)


@dataclass
class _Alt:
    """One alternative produced while expanding a term: value plus side conditions."""

    value: object
    eqs: tuple = ()      # LinForms that must vanish
    guards: tuple = ()   # (items, ell): sum coeff*frac(LinForm) < ell
    prov: tuple = ()


def _combine(alts_a, alts_b, join):
    for a in alts_a:
        for b in alts_b:
            yield _Alt(join(a.value, b.value), a.eqs + b.eqs, a.guards + b.guards, a.prov + b.prov)


class _Flattener:
    def __init__(self, ctx: BeattyCtx):
        self.ctx = ctx

    # f and frac applied to linear forms ---------------------------------------------------

    def linearize(self, t: Term) -> list[_Alt]:
        if isinstance(t, IntLit):
            return [_Alt(LinForm.constant(t.value))]
        if isinstance(t, Var):
            return [_Alt(LinForm.leaf(Leaf(t.name)))]
        if isinstance(t, Add):
            return list(_combine(self.linearize(t.left), self.linearize(t.right), LinForm.__add__))
        if isinstance(t, Neg):
            return [_Alt(-a.value, a.eqs, a.guards, a.prov) for a in self.linearize(t.arg)]
        if isinstance(t, ScalarMul):
            return [_Alt(a.value.scale(t.coeff), a.eqs, a.guards, a.prov) for a in self.linearize(t.arg)]
        if isinstance(t, F):
            alts = self.linearize(t.arg)
            for _ in range(t.power):
                alts = [self._extend(a, b) for a in alts for b in self.fapply(a.value)]
            return alts
        raise TypeError(f"not a term: {t!r}")

    @staticmethod
    def _extend(a: _Alt, b: _Alt) -> _Alt:
        return _Alt(b.value, a.eqs + b.eqs, a.guards + b.guards, a.prov + b.prov)

    def fapply(self, L: LinForm) -> list[_Alt]:
        """Alternatives for f(L)."""
        if L.is_const():
            return [_Alt(LinForm.constant(self.ctx.floor_mul(L.const)))]
        if len(L.terms) == 1 and L.const == 0:
            (lf, k), = L.terms
            if lf.power == 0:
                return [_Alt(LinForm.leaf(Leaf(lf.var, k, 1)))]
            if k == 1:
                return [_Alt(LinForm.leaf(Leaf(lf.var, lf.scale, lf.power + 1)))]
            u = LinForm.leaf(lf)
            if k >= 2:
                fu = LinForm.leaf(Leaf(lf.var, lf.scale, lf.power + 1))
                out = []
                for i in range(k):
                    guards = [(((k, u),), i + 1)]
                    if i:
                        guards.append((((-k, u),), -i))
                    out.append(_Alt(fu.scale(k) + LinForm.constant(i), (), tuple(guards),
                                    (f"f({L}): carry {i}",)))
                return out
            T = L.scale(-1)
            out = [_Alt(-b.value - LinForm.constant(1), b.eqs,
                        b.guards + ((((-1, T),), 0),), (f"f({L}): nonzero",) + b.prov)
                   for b in self.fapply(T)]
            out.append(_Alt(LinForm.constant(0), (T,), (), (f"f({L}): zero",)))
            return out
        L1, L2 = self._split(L)
        out = []
        for carry in (0, 1):
            guard = (((1, L1), (1, L2)), 1) if carry == 0 else (((-1, L1), (-1, L2)), -1)
            for a in _combine(self.fapply(L1), self.fapply(L2), LinForm.__add__):
                out.append(_Alt(a.value + LinForm.constant(carry), a.eqs, a.guards + (guard,),
                                (f"f({L}): carry {carry}",) + a.prov))
        out.append(_Alt(LinForm.constant(0), (L,), ((((-1, L1),), 0),), (f"f({L}): boundary",)))
        return out

    @staticmethod
    def _split(L: LinForm) -> tuple[LinForm, LinForm]:
        (lf, k), rest = L.terms[0], L.terms[1:]
        return LinForm.leaf(lf, k), LinForm(dict(rest), L.const)

    def fracexp(self, L: LinForm) -> list[_Alt]:
        """Alternatives for frac(L); values are (leaf coeffs, const fracs, offset)."""
        if L.is_const():
            fr = {L.const: 1} if L.const else {}
            return [_Alt(({}, fr, 0))]
        if len(L.terms) == 1 and L.const == 0:
            (lf, k), = L.terms
            if k == 1:
                return [_Alt(({lf: 1}, {}, 0))]
            if lf.power == 0:
                return [_Alt(({Leaf(lf.var, k, 0): 1}, {}, 0))]
            u = LinForm.leaf(lf)
            if k >= 2:
                out = []
                for i in range(k):
                    guards = [(((k, u),), i + 1)]
                    if i:
                        guards.append((((-k, u),), -i))
                    out.append(_Alt(({lf: k}, {}, -i), (), tuple(guards), (f"frac({L}): carry {i}",)))
                return out
            T = L.scale(-1)
            out = []
            for b in self.fracexp(T):
                lhs, fr, off = b.value
                out.append(_Alt(({a: -c for a, c in lhs.items()}, {a: -c for a, c in fr.items()}, 1 - off),
                                b.eqs, b.guards + ((((-1, T),), 0),), (f"frac({L}): nonzero",) + b.prov))
            out.append(_Alt(({}, {}, 0), (T,), (), (f"frac({L}): zero",)))
            return out
        L1, L2 = self._split(L)
        out = []
        for carry in (0, 1):
            guard = (((1, L1), (1, L2)), 1) if carry == 0 else (((-1, L1), (-1, L2)), -1)
            for a in _combine(self.fracexp(L1), self.fracexp(L2), _add_fracs):
                lhs, fr, off = a.value
                out.append(_Alt((lhs, fr, off - carry), a.eqs, a.guards + (guard,),
                                (f"frac({L}): carry {carry}",) + a.prov))
        out.append(_Alt(({}, {}, 0), (L,), ((((-1, L1),), 0),), (f"frac({L}): boundary",)))
        return out

    def guard_alts(self, items, ell: int) -> list[_Alt]:
        """Alternatives for sum coeff*frac(L) < ell; values are CanonIneq."""
        alts = [_Alt(({}, {}, 0))]
        for coeff, L in items:
            sub = [_Alt(({k: coeff * v for k, v in a.value[0].items()},
                         {k: coeff * v for k, v in a.value[1].items()}, coeff * a.value[2]),
                        a.eqs, a.guards, a.prov) for a in self.fracexp(L)]
            alts = list(_combine(alts, sub, _add_fracs))
        out = []
        for a in alts:
            lhs, fr, off = a.value
            atom = CanonIneq.build(lhs, {k: -v for k, v in fr.items()}, ell - off)
            out.append(_Alt(atom, a.eqs, a.guards, a.prov))
        return out

    # whole atoms ----------------------------------------------------------------------------

    def atom_alts(self, atom) -> list[_Alt]:
        if isinstance(atom, AlgEq):
            return [_Alt(CanonEq(a.value), a.eqs, a.guards, a.prov)
                    for a in self.linearize(Add(atom.lhs, Neg(atom.rhs)))]
        if isinstance(atom, NonAlg):
            small, big = atom.strict_less()
            ell = 0
            lin_alts = [_Alt([])]
            for sign, group in ((1, small), (-1, big)):
                for it in group:
                    if it.term is None:
                        ell -= sign * it.coeff
                        continue
                    coeff = sign * it.coeff
                    lin_alts = [_Alt(a.value + [(coeff, b.value)], a.eqs + b.eqs, a.guards + b.guards,
                                     a.prov + b.prov)
                                for a in lin_alts for b in self.linearize(it.term)]
            out = []
            for a in lin_alts:
                for g in self.guard_alts(a.value, ell):
                    out.append(_Alt(g.value, a.eqs + g.eqs, a.guards + g.guards, a.prov + g.prov))
            return out
        if isinstance(atom, (CanonEq, CanonIneq, ConstAtom)):
            return [_Alt(atom)]
        if isinstance(atom, Cong):
            raise ValueError("desugar congruences before flattening")
        raise TypeError(f"not an atom: {atom!r}")


def _add_fracs(a, b):
    lhs = dict(a[0])
    for k, v in b[0].items():
        lhs[k] = lhs.get(k, 0) + v
    fr = dict(a[1])
    for k, v in b[1].items():
        fr[k] = fr.get(k, 0) + v
    return lhs, fr, a[2] + b[2]


def closed_truth(ctx: BeattyCtx, atom):
    """True/False for an atom without variables, None otherwise."""
    if isinstance(atom, ConstAtom):
        return atom.value
    if isinstance(atom, CanonEq):
        return atom.form.const == 0 if atom.form.is_const() else None
    if isinstance(atom, CanonIneq):
        if atom.lhs:
            return None
        return sign_at_alpha(atom.rhs_value(ctx), ctx.provider) > 0
    return None


def flatten_floors(ctx: BeattyCtx, s: System, case_limit: int = DEFAULT_CASE_LIMIT) -> CaseSplit:
    """Split a congruence-free system into canonical cases.

    The source system holds under an assignment exactly when one of the
    cases does. Cases containing an atom that is false without variables
    are dropped; closed true atoms are removed.
    """
    fl = _Flattener(ctx)
    cases: list[System] = []
    provs: list[tuple[str, ...]] = []

    def emit(atoms, prov):
        if len(cases) >= case_limit:
            raise CaseExplosion(f"more than {case_limit} cases")
        cases.append(System(tuple(atoms), s.variables))
        provs.append(tuple(prov))
        if len(cases) == CASE_WARN + 1:
            warnings.warn(f"flattening produced more than {CASE_WARN} cases", RuntimeWarning)

    # Depth-first over a worklist: ("atom", atom) | ("eq", LinForm) | ("guard", items, ell).
    def walk(work, atoms, seen, prov):
        if not work:
            emit(atoms, prov)
            return
        item, rest = work[0], work[1:]
        if item[0] == "eq":
            alts = [_Alt(CanonEq(item[1]))]
        elif item[0] == "guard":
            alts = fl.guard_alts(item[1], item[2])
        else:
            alts = fl.atom_alts(item[1])
        for a in alts:
            atom = a.value
            truth = closed_truth(ctx, atom)
            if truth is False:
                continue
            new_atoms, new_seen = atoms, seen
            if truth is None and atom not in seen:
                new_atoms = atoms + [atom]
                new_seen = seen | {atom}
            extra = [("eq", e) for e in a.eqs] + [("guard", g[0], g[1]) for g in a.guards]
            walk(extra + rest, new_atoms, new_seen, prov + list(a.prov))

    walk([("atom", a) for a in s.atoms], [], frozenset(), [])
    log.debug("flattened %d atoms into %d cases", len(s.atoms), len(cases))
    return CaseSplit(tuple(cases), tuple(provs))


def linear_form_of(ctx: BeattyCtx, t: Term) -> LinForm:
    """The linear form of a term that needs no case split (canonical shape)."""
    alts = _Flattener(ctx).linearize(t)
    if len(alts) != 1 or alts[0].eqs or alts[0].guards:
        raise ValueError(f"{t} is not in canonical form (f is applied to a compound argument)")
    return alts[0].value


def substitute_case(ctx: BeattyCtx, case: System, var: str, value: int) -> System:
    """Fix var := value in a canonical system."""
    out = []
    for atom in case.atoms:
        if isinstance(atom, CanonEq):
            d, const = {}, atom.form.const
            for lf, c in atom.form.terms:
                if lf.var == var:
                    const += c * lf.value(ctx, {var: value})
                else:
                    d[lf] = c
            atom = CanonEq(LinForm(d, const))
        elif isinstance(atom, CanonIneq):
            lhs, fr = {}, dict(atom.fracs)
            for lf, c in atom.lhs:
                if lf.var == var:
                    a = lf.value(ctx, {var: value})
                    if a:
                        fr[a] = fr.get(a, 0) - c
                else:
                    lhs[lf] = c
            atom = CanonIneq.build(lhs, fr, atom.ell)
        truth = closed_truth(ctx, atom)
        if truth is False:
            out.append(ConstAtom(False))
        elif truth is None:
            out.append(atom)
    return System(tuple(out), tuple(v for v in case.variables if v != var))
