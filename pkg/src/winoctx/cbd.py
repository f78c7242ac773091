"""Cyclic systems of binary measurements and their contextuality measure.

A rank-n cyclic system has contents x_1..x_n and contexts K_i = {x_i, x_i+1}
(indices mod n).  The measure used here is

    cnt1 = s_odd(correlations) - delta - (n - 2)

where s_odd is the largest odd-signed sum of the cycle correlations and
delta accumulates how much each content's expectation moves between its two
contexts.  Positive cnt1 means contextual.  For rank 4 with delta = 0 this
is exactly the amount by which the classical correlation bound (2) is
exceeded, so `cnt1` and `chsh_violation` agree digit for digit on
non-signalling input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .empirical import EmpiricalModel
from .scenario import Context, Observable, cyclic_structure

MAX_RANK = 32


class CyclicSystemError(ValueError):
    pass


def s_odd(values: Sequence[float]) -> float:
    """Max of sum(sign_j * v_j) over sign vectors with an odd number of -1s.

    Exhaustive over all 2^(k-1) odd-parity sign vectors; the reference
    implementation that the closed form is tested against.
    """
    v = np.asarray(values, dtype=float)
    k = v.size
    if k < 1:
        raise CyclicSystemError("s_odd needs at least one value")
    if k > MAX_RANK:
        raise CyclicSystemError(f"enumeration capped at {MAX_RANK} values, got {k}")
    best = -math.inf
    for mask in range(1 << k):
        if bin(mask).count("1") % 2 == 1:
            total = math.fsum(-v[j] if mask >> j & 1 else v[j] for j in range(k))
            best = max(best, total)
    return best


def s_odd_closed_form(values: Sequence[float]) -> float:
    """s_odd without enumeration.

    Flipping the sign on every negative entry yields sum |v_j|; if that used
    an even number of flips, one extra flip is forced and it is cheapest on
    the smallest |v_j|.
    """
    v = [float(x) for x in values]
    if not v:
        raise CyclicSystemError("s_odd needs at least one value")
    magnitudes = [abs(x) for x in v]
    negatives = sum(1 for x in v if x < 0)
    if negatives % 2 == 1:
        return math.fsum(magnitudes)
    return math.fsum(magnitudes + [-2.0 * min(magnitudes)])


def s_odd_rows(rows: np.ndarray) -> np.ndarray:
    """Closed-form s_odd applied to each row of a 2-d array.

    Uses plain reductions (no BLAS) so results do not depend on thread
    count; bootstrap determinism relies on that.
    """
    a = np.asarray(rows, dtype=float)
    if a.ndim != 2:
        raise CyclicSystemError("expected a 2-d array of sign-sum inputs")
    mags = np.abs(a)
    totals = mags.sum(axis=1)
    smallest = mags.min(axis=1)
    odd = (a < 0).sum(axis=1) % 2 == 1
    return np.where(odd, totals, totals - 2.0 * smallest)


@dataclass(frozen=True)
class CyclicSystem:
    """Cycle-ordered correlations plus each content's two expectations.

    contents[i] sits in contexts[i-1] and contexts[i]; expectations[i] holds
    its expectation in those two contexts, in that order.
    """

    contents: tuple[Observable, ...]
    contexts: tuple[Context, ...]
    correlations: tuple[float, ...]
    expectations: tuple[tuple[float, float], ...]

    @property
    def rank(self) -> int:
        return len(self.contents)

    def __post_init__(self):
        n = len(self.contents)
        if n < 3:
            raise CyclicSystemError(f"cyclic systems need rank >= 3, got {n}")
        if n > MAX_RANK:
            raise CyclicSystemError(f"rank capped at {MAX_RANK}, got {n}")
        if not (len(self.contexts) == len(self.correlations) == len(self.expectations) == n):
            raise CyclicSystemError("contents/contexts/correlations/expectations must align")

    @classmethod
    def from_model(cls, model: EmpiricalModel) -> "CyclicSystem":
        structure = cyclic_structure(model.scenario)
        if structure is None:
            raise CyclicSystemError("model's scenario is not a cycle of binary contexts")
        order = structure.ordering
        n = structure.rank
        by_members = {frozenset(ctx): ctx for ctx in model.contexts}
        contexts = []
        for i in range(n):
            members = frozenset((order[i], order[(i + 1) % n]))
            contexts.append(by_members[members])
        sign = model.sign
        correlations = tuple(
            model.distribution(ctx).correlation(sign) for ctx in contexts
        )
        expectations = []
        for i, content in enumerate(order):
            before = contexts[(i - 1) % n]
            after = contexts[i]
            expectations.append(
                (
                    model.distribution(before).expectation(content, sign),
                    model.distribution(after).expectation(content, sign),
                )
            )
        return cls(
            contents=order,
            contexts=tuple(contexts),
            correlations=correlations,
            expectations=tuple(expectations),
        )

    @property
    def delta(self) -> float:
        """Total movement of content expectations across their two contexts."""
        return math.fsum(abs(a - b) for a, b in self.expectations)

    @property
    def cnt1(self) -> float:
        # left-to-right: when delta is exactly 0.0 this is bit-identical
        # to the rank-4 correlation-bound excess below
        return s_odd(self.correlations) - self.delta - (self.rank - 2)

    @property
    def contextual(self) -> bool:
        return self.cnt1 > 0.0


def cnt1(model: EmpiricalModel) -> float:
    return CyclicSystem.from_model(model).cnt1


def chsh_violation(model: EmpiricalModel) -> float:
    """Excess of the best odd-signed correlation sum over the classical
    bound of 2.  Defined for rank-4 cycles only; negative means no
    violation."""
    system = CyclicSystem.from_model(model)
    if system.rank != 4:
        raise CyclicSystemError(
            f"correlation-bound statistic needs a rank-4 cycle, got rank {system.rank}"
        )
    return s_odd(system.correlations) - 2


def chsh_pattern(correlations: Sequence[float]) -> tuple[int, ...]:
    """The odd-parity sign vector attaining s_odd (certificate for reports)."""
    v = [float(x) for x in correlations]
    best = None
    best_val = -math.inf
    k = len(v)
    for mask in range(1 << k):
        if bin(mask).count("1") % 2 == 1:
            signs = tuple(-1 if mask >> j & 1 else 1 for j in range(k))
            total = math.fsum(s * x for s, x in zip(signs, v))
            if total > best_val:
                best_val = total
                best = signs
    assert best is not None
    return best
