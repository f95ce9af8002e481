"""Exact decision procedure and witness search for Z with f(x) = floor(alpha*x).

Typical use::

    from beattysolve import BeattyCtx, solve
    ctx = BeattyCtx.named("pi")
    solve(ctx, "f(x) + f(y) = 40; frac(x) < frac(y)")
"""

from .alg import (
    ALL_INTEGERS,
    FloorForm,
    Progression,
    axiom4_constants,
    dependence_classes,
    find_progression,
    reduce_cross_class,
    reduce_same_class,
    solve,
    solve_case,
    solve_congruence_pair,
    solve_multi_equation,
    solve_one_var,
    solve_system,
    to_floor_form,
)
from .alpha import (
    AlphaPoly,
    AlphaProvider,
    AlphaRat,
    Interval,
    PrecisionCapExceeded,
    alpharat_arith,
    compare_values,
    floor_value,
    is_rational_multiple,
    refine_alpha,
    sign_at_alpha,
)
from .beatty import (
    BeattyCtx,
    FracValue,
    KBound,
    apply_f,
    encode_phi_ni,
    encode_psi_ell,
    eval_term,
    frac_compare,
    frac_of,
    in_range_floorF,
    iterate_f,
    step_bound_K,
)
from .fm import Ineq, fm_solve
from .nonalg import BoxVar, RealRelaxation, build_relaxation, fm_feasible, kronecker_search, solve_nonalg, targets_from_sample
from .normalize import CaseExplosion, CaseSplit, desugar_congruences, flatten_floors
from .oracle import BoxTooLarge, SearchBox, brute_check, brute_solve
from .outcome import NO_WITNESS, SAT, UNSAT, SolveOutcome
from .syntax import FormulaSyntaxError, System, parse_formula, parse_term, pretty

apply_f_pow = iterate_f

__version__ = "0.1.0"

__all__ = [
    "ALL_INTEGERS",
    "FloorForm",
    "Progression",
    "axiom4_constants",
    "dependence_classes",
    "find_progression",
    "reduce_cross_class",
    "reduce_same_class",
    "solve",
    "solve_case",
    "solve_congruence_pair",
    "solve_multi_equation",
    "solve_one_var",
    "solve_system",
    "to_floor_form",
    "AlphaPoly",
    "AlphaProvider",
    "AlphaRat",
    "Interval",
    "PrecisionCapExceeded",
    "alpharat_arith",
    "compare_values",
    "floor_value",
    "is_rational_multiple",
    "refine_alpha",
    "sign_at_alpha",
    "BeattyCtx",
    "FracValue",
    "KBound",
    "apply_f",
    "encode_phi_ni",
    "encode_psi_ell",
    "eval_term",
    "frac_compare",
    "frac_of",
    "in_range_floorF",
    "iterate_f",
    "step_bound_K",
    "Ineq",
    "fm_solve",
    "BoxVar",
    "RealRelaxation",
    "build_relaxation",
    "fm_feasible",
    "kronecker_search",
    "solve_nonalg",
    "targets_from_sample",
    "CaseExplosion",
    "CaseSplit",
    "desugar_congruences",
    "flatten_floors",
    "BoxTooLarge",
    "SearchBox",
    "brute_check",
    "brute_solve",
    "NO_WITNESS",
    "SAT",
    "UNSAT",
    "SolveOutcome",
    "FormulaSyntaxError",
    "System",
    "parse_formula",
    "parse_term",
    "pretty",
    "apply_f_pow",
]
