"""Foundational value types and order/closeness predicates.

Distributions over a finite output space are compared through their
prefix sums: the dominance (partial) order, the lexicographic (total)
order it refines, and the (epsilon,delta)-closeness relation that
defines differential privacy edgewise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_TOL = 1e-12

# Published boundary vectors are often rounded to 4 decimals, so their
# entries can miss 1.0 by up to a few 1e-4. Anything beyond this window
# is treated as a genuinely invalid distribution.
SUM_WINDOW = 1e-3

# Entries this far below zero are float noise from prefix differencing
# and get clamped; anything lower is rejected.
NEGATIVE_WINDOW = 1e-9


@dataclass(frozen=True)
class ColorSpace:
    """The ordered finite output space; index order is canonical."""

    colors: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "colors", tuple(self.colors))
        if len(self.colors) < 2:
            raise ValueError("color space needs at least 2 colors")
        if len(set(self.colors)) != len(self.colors):
            raise ValueError("color identifiers must be distinct")
        if any(not c for c in self.colors):
            raise ValueError("color identifiers must be nonempty")

    @property
    def q(self) -> int:
        return len(self.colors)

    def index_of(self, color: str) -> int:
        return self.colors.index(color)


@dataclass(frozen=True)
class Rainbow:
    """A total preference order: ``order[k]`` is the canonical index of
    the k-th most preferred color."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError(f"not a permutation of 0..{len(self.order) - 1}: {self.order}")

    @property
    def q(self) -> int:
        return len(self.order)

    def color_names(self, space: ColorSpace) -> tuple[str, ...]:
        """Color identifiers in preference order (most preferred first)."""
        return tuple(space.colors[i] for i in self.order)


@dataclass(frozen=True)
class SimplexVector:
    """A probability distribution over the output space.

    Entries are stored in canonical color order unless a call site says
    otherwise. Construction clamps float-noise negatives to zero and
    renormalizes sums within SUM_WINDOW of 1; worse inputs are rejected.
    """

    p: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = [float(x) for x in self.p]
        if len(vals) < 2:
            raise ValueError("distribution needs at least 2 entries")
        for x in vals:
            if not math.isfinite(x) or x < -NEGATIVE_WINDOW or x > 1.0 + NEGATIVE_WINDOW:
                raise ValueError(f"entry {x!r} outside [0, 1]")
        vals = [min(max(x, 0.0), 1.0) for x in vals]
        total = sum(vals)
        if abs(total - 1.0) > SUM_WINDOW:
            raise ValueError(f"entries sum to {total!r}, not 1")
        object.__setattr__(self, "p", tuple(x / total for x in vals))

    def __len__(self) -> int:
        return len(self.p)

    def __iter__(self):
        return iter(self.p)

    def __getitem__(self, k: int) -> float:
        return self.p[k]


@dataclass(frozen=True)
class PrivacyBudget:
    """An (epsilon, delta) privacy budget."""

    epsilon: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValueError("epsilon must be finite and >= 0")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must be in [0, 1]")

    @property
    def exp_epsilon(self) -> float:
        return math.exp(self.epsilon)


def _require_same_length(x: Sequence[float], y: Sequence[float]) -> None:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")


def prefix_sums(p: SimplexVector | Iterable[float]) -> tuple[float, ...]:
    """Running sums s_1..s_q of the entries; s_q lands on 1 for any
    valid distribution."""
    out = []
    acc = 0.0
    for x in p:
        acc += x
        out.append(acc)
    return tuple(out)


def dominates(x: SimplexVector, y: SimplexVector, tol: float = DEFAULT_TOL) -> bool:
    """True iff x is at least y in the dominance order: every prefix sum
    of x is >= the matching prefix sum of y, up to tol.

    Both inputs must already be expressed in the comparison (preference)
    order; callers permute first when needed.
    """
    _require_same_length(x, y)
    sx = prefix_sums(x)
    sy = prefix_sums(y)
    return all(a >= b - tol for a, b in zip(sx, sy))


def lex_precedes(x: SimplexVector, y: SimplexVector, tol: float = DEFAULT_TOL) -> bool:
    """True iff x <= y lexicographically on prefix sums.

    At the first index where the prefixes differ by more than tol, x's
    must be the smaller one; sequences equal everywhere count as True.
    """
    _require_same_length(x, y)
    for a, b in zip(prefix_sums(x), prefix_sums(y)):
        if abs(a - b) > tol:
            return a < b
    return True


def subset_excess(p: SimplexVector, q_: SimplexVector, exp_epsilon: float) -> float:
    """max over outcome subsets S of P(S) - e^eps * Q(S).

    The maximizing S is exactly the set of outcomes with positive
    margin, so the supremum is a sum of per-element positive parts and
    the check is O(q) instead of O(2^q).
    """
    _require_same_length(p, q_)
    total = 0.0
    for a, b in zip(p, q_):
        m = a - exp_epsilon * b
        if m > 0.0:
            total += m
    return total


def is_close(
    p: SimplexVector,
    q_: SimplexVector,
    budget: PrivacyBudget,
    tol: float = DEFAULT_TOL,
) -> bool:
    """True iff P(S) <= e^eps Q(S) + delta and symmetrically, for every
    outcome subset S (computed without subset enumeration)."""
    e = budget.exp_epsilon
    bound = budget.delta + tol
    return subset_excess(p, q_, e) <= bound and subset_excess(q_, p, e) <= bound


def tv_distance(p: SimplexVector, q_: SimplexVector) -> float:
    """Total variation distance: half the L1 distance between the two
    distributions, in [0, 1]."""
    _require_same_length(p, q_)
    return 0.5 * sum(abs(a - b) for a, b in zip(p, q_))
