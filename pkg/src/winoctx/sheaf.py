"""Global-assignment analysis of empirical models.

A model is noncontextual when one distribution over global outcome
assignments reproduces every context's distribution at once.  The
contextual fraction asks the quantitative version: how much probability
mass can such a global distribution explain?

    maximize  sum(w)   s.t.   M w <= b,  w >= 0

where M is the 0/1 incidence of assignments against (context, outcome)
rows and b stacks the empirical probabilities.  cf = 1 - optimum.  Every
solve carries a dual certificate; `CfResult.gap` reports how tight it is.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .empirical import EmpiricalModel, outcome_tuples, signalling
from .linprog import INFEASIBLE, OPTIMAL, LpProblem, solve
from .scenario import Context, MeasurementScenario, maximal_contexts

MAX_ASSIGNMENTS = 65536


class ScenarioTooLargeError(ValueError):
    """The scenario's global-assignment space exceeds the documented cap."""


class SignallingModelError(ValueError):
    """The question needs consistent marginals and the model has none."""


def global_assignments(scenario: MeasurementScenario) -> list[tuple[str, ...]]:
    """Every total outcome assignment, aligned with scenario.observables.

    Enumerated lexicographically in outcome declaration order.
    """
    n = len(scenario.observables)
    count = len(scenario.outcomes) ** n
    if count > MAX_ASSIGNMENTS:
        raise ScenarioTooLargeError(
            f"{count} global assignments exceed the cap of {MAX_ASSIGNMENTS}"
        )
    return list(product(scenario.outcomes, repeat=n))


@dataclass(frozen=True)
class IncidenceSystem:
    """Rows are (context, joint outcome) pairs in a fixed order; columns are
    global assignments.  matrix[r, g] = 1 when assignment g restricts to
    row r's outcome."""

    rows: tuple[tuple[Context, tuple[str, ...]], ...]
    assignments: tuple[tuple[str, ...], ...]
    matrix: np.ndarray


def incidence(scenario: MeasurementScenario) -> IncidenceSystem:
    assignments = global_assignments(scenario)
    order = {obs: i for i, obs in enumerate(scenario.observables)}
    rows: list[tuple[Context, tuple[str, ...]]] = []
    for ctx in maximal_contexts(scenario):
        for joint in outcome_tuples(scenario.outcomes, len(ctx)):
            rows.append((ctx, joint))
    matrix = np.zeros((len(rows), len(assignments)))
    for g, assignment in enumerate(assignments):
        for r, (ctx, joint) in enumerate(rows):
            restricted = tuple(assignment[order[obs]] for obs in ctx)
            if restricted == joint:
                matrix[r, g] = 1.0
    return IncidenceSystem(
        rows=tuple(rows), assignments=tuple(assignments), matrix=matrix
    )


@dataclass(frozen=True)
class CfResult:
    cf: float
    ncf_weight: float                      # LP optimum, the explainable mass
    witness: np.ndarray                    # sub-distribution over assignments
    assignments: tuple[tuple[str, ...], ...]
    dual_certificate: np.ndarray           # row multipliers proving optimality
    gap: float                             # |primal - dual|, should be <= 1e-7
    signalling: float                      # max marginal mismatch of the input
    reliable: bool                         # False when the input signals


def _rhs(model: EmpiricalModel, system: IncidenceSystem) -> np.ndarray:
    b = np.array([model.distribution(ctx).prob(joint) for ctx, joint in system.rows])
    # model validation admits entries down to -tol; those are rounding noise
    # and would make the program infeasible, so floor at zero
    return np.maximum(b, 0.0)


def contextual_fraction(model: EmpiricalModel, tol: float = 1e-9) -> CfResult:
    """Largest sub-probability explainable by global assignments; cf is the
    rest.  Well-behaved (in [0, 1], convex, 0 iff noncontextual) only for
    non-signalling models; `reliable` is False otherwise but the LP value is
    still returned."""
    system = incidence(model.scenario)
    b = _rhs(model, system)
    n = system.matrix.shape[1]
    problem = LpProblem(
        objective=np.ones(n),
        lhs=system.matrix,
        rhs=b,
        relations=("<=",) * len(b),
    )
    solution = solve(problem)
    if solution.status != OPTIMAL:
        # M w <= b with w >= 0 always admits w = 0 and sum(w) <= 1.
        raise RuntimeError(f"consistency program ended {solution.status}; cannot happen")
    explained = min(solution.objective_value, 1.0)
    sig = signalling(model).max_discrepancy
    return CfResult(
        cf=1.0 - explained,
        ncf_weight=explained,
        witness=solution.x,
        assignments=system.assignments,
        dual_certificate=solution.dual,
        gap=solution.gap,
        signalling=sig,
        reliable=sig <= tol,
    )


def is_noncontextual(
    model: EmpiricalModel, tol: float = 1e-7
) -> tuple[bool, Optional[dict[tuple[str, ...], float]]]:
    """Does some global distribution reproduce every context exactly?

    Feasibility is checked with a +-tol band around each empirical
    probability so that honest float rounding does not flip the verdict.
    Signalling models are refused: no global distribution can match
    marginals that disagree with each other.
    """
    sig = signalling(model).max_discrepancy
    if sig > tol:
        raise SignallingModelError(
            f"marginals disagree by {sig:.3e} (> {tol:.1e}); "
            "global-distribution question is void"
        )
    system = incidence(model.scenario)
    b = _rhs(model, system)
    m, n = system.matrix.shape
    lhs = np.vstack([system.matrix, -system.matrix, np.ones((1, n))])
    rhs = np.concatenate([b + tol, -(b - tol), [1.0]])
    relations = ("<=",) * (2 * m) + ("=",)
    problem = LpProblem(
        objective=np.zeros(n), lhs=lhs, rhs=rhs, relations=relations
    )
    solution = solve(problem)
    if solution.status == INFEASIBLE:
        return False, None
    weights = {
        assignment: float(w)
        for assignment, w in zip(system.assignments, solution.x)
        if w > 0.0
    }
    return True, weights
