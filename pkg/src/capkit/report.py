"""Verified inequality instances."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

#: tolerance for inequalities, relative to max(1, |rhs|): two nested solves at 1e-8 each
INEQ_TOL = 1e-7
#: default tolerance for capacity-based equalities, relative to max(1, |rhs|)
EQ_TOL = 1e-8


@dataclass(frozen=True)
class BoundReport:
    """One checked instance ``lhs >= rhs`` (or ``lhs == rhs``).

    ``holds`` is decided once, at construction, from ``slack`` and ``tol``.
    ``trivial`` marks instances where one side vanishes because a capacity
    argument fell outside its Newton polytope.
    """

    lhs: float
    rhs: float
    slack: float
    holds: bool
    context: str = ""
    tag: str = ""
    kind: str = "inequality"
    tol: float = INEQ_TOL
    trivial: bool = False
    exact_slack: Any = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def inequality(cls, lhs, rhs, tol: float = INEQ_TOL, absolute: bool = False,
                   context: str = "", tag: str = "", trivial: bool = False,
                   exact_slack=None, **extra) -> "BoundReport":
        lhs, rhs = float(lhs), float(rhs)
        slack = lhs - rhs
        bound = tol if absolute else tol * max(1.0, abs(rhs))
        holds = (slack if exact_slack is None else exact_slack) >= -bound
        return cls(lhs, rhs, slack, bool(holds), context, tag, "inequality", tol, trivial,
                   exact_slack, dict(extra))

    @classmethod
    def equality(cls, lhs, rhs, tol: float = EQ_TOL, context: str = "", tag: str = "",
                 trivial: bool = False, exact: bool = False, **extra) -> "BoundReport":
        if exact:
            diff = lhs - rhs
            return cls(float(lhs), float(rhs), float(diff), diff == 0, context, tag, "exact",
                       0.0, trivial, diff, dict(extra))
        lhs, rhs = float(lhs), float(rhs)
        slack = lhs - rhs
        holds = abs(slack) <= tol * max(1.0, abs(rhs))
        return cls(lhs, rhs, slack, bool(holds), context, tag, "equality", tol, trivial,
                   None, dict(extra))

    def to_dict(self) -> dict:
        out = {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "kind": self.kind,
            "trivial": self.trivial,
            "tag": self.tag,
            "context": self.context,
        }
        if self.exact_slack is not None:
            out["exact_slack"] = str(self.exact_slack)
        for k, v in self.extra.items():
            out[k] = v
        return out


def chain_holds(reports) -> bool:
    return all(r.holds for r in reports)


def trivial_report(context: str, tag: str = "", rhs: float = 0.0, lhs: Optional[float] = None):
    """Instance made vacuous by an out-of-polytope capacity."""
    lhs = rhs if lhs is None else lhs
    return BoundReport(float(lhs), float(rhs), float(lhs) - float(rhs), True, context, tag,
                       "inequality", INEQ_TOL, True)
