from __future__ import annotations

from dataclasses import dataclass, field

SAT = "sat"
UNSAT = "unsat"
NO_WITNESS = "feasible-no-witness"


@dataclass
class SolveOutcome:
    """Verdict of a decision procedure.

    ``witness`` is set exactly when status is sat. ``feasible-no-witness``
    means the real relaxation is feasible (so integer solutions exist)
    but the search budget ran out before one was found.
    """

    status: str
    witness: dict[str, int] | None = None
    cases_explored: int = 0
    certificate: list[str] = field(default_factory=list)
    precision_bits: int = 0

    def __post_init__(self):
        if self.status not in (SAT, UNSAT, NO_WITNESS):
            raise ValueError(f"bad status {self.status!r}")
        if (self.status == SAT) != (self.witness is not None):
            raise ValueError("a witness accompanies exactly the sat verdict")

    @property
    def sat(self) -> bool:
        return self.status == SAT
