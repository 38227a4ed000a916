"""The one-step prefix operator, its closed-form trajectories, and the
optimal mechanism construction for rainbow graphs.

The operator acts on prefix sums of a distribution written in
preference order:

    s'_k = min(1, e^eps * s_k + delta, 1 - e^-eps * (1 - s_k - delta))

Each prefix is pushed to the largest value any (eps,delta)-close
distribution can reach: the first bound is the closeness constraint on
the prefix itself, the second is the constraint on its complement
(which is why the cap at 1 engages exactly when the remaining mass
drops to delta). Iterating from a boundary distribution yields, at
distance d from the boundary, the unique close distribution dominating
every other one. Each prefix follows a two-phase closed form:
exponential growth (with an affine drift rho = delta / (e^eps - 1)) up
to a crossing step, then exponential approach to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (
    DEFAULT_TOL,
    ColorSpace,
    PrivacyBudget,
    Rainbow,
    SimplexVector,
    dominates,
    is_close,
    prefix_sums,
    subset_excess,
)
from .graph import RainbowGraph, boundary_distances, decompose_regions

INFINITE = math.inf

# Below this mass the growth phase is evaluated in log space to dodge
# overflow in exp(t * eps) for extremely small prefixes.
_LOG_FORM_THRESHOLD = 1e-8


class EpsilonZero(ValueError):
    """The tau machinery needs eps > 0; the eps = 0 recurrence is handled
    directly by closed_form_prefix."""


class MissingRainbow(LookupError):
    """A bounded region's rainbow is absent from the boundary condition."""

    def __init__(self, rainbows: Sequence[Rainbow]):
        self.rainbows = tuple(rainbows)
        super().__init__(f"boundary condition missing {len(self.rainbows)} rainbow(s)")


class InvalidBoundary(ValueError):
    """Some pair of adjacent regions has boundary values that are not
    (eps,delta)-close."""

    def __init__(self, violations: Sequence[tuple[Rainbow, Rainbow]]):
        self.violations = tuple(violations)
        super().__init__(f"boundary condition violates closeness on {len(self.violations)} region pair(s)")


@dataclass(frozen=True, eq=False)
class Mechanism:
    """A distribution per node, stored in canonical color order."""

    assignment: Mapping[str, SimplexVector]
    color_space: ColorSpace

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", dict(self.assignment))
        for d, vec in self.assignment.items():
            if len(vec) != self.color_space.q:
                raise ValueError(f"distribution for node {d!r} has wrong length")

    def distribution(self, node: str) -> SimplexVector:
        return self.assignment[node]


@dataclass(frozen=True, eq=False)
class BoundaryCondition:
    """One distribution per rainbow, in canonical color order."""

    values: Mapping[Rainbow, SimplexVector]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", dict(self.values))
        for c, vec in self.values.items():
            if len(vec) != c.q:
                raise ValueError("boundary vector length does not match its rainbow")


@dataclass(frozen=True)
class TauProfile:
    """Per-prefix phase-transition indices plus the drift rho."""

    rho: float
    tau: tuple[float, ...]
    epsilon: float
    delta: float


@dataclass(frozen=True)
class TrajectoryRow:
    t: float
    k: int
    color: str
    p: float
    s: float


@dataclass(frozen=True)
class TrajectoryTable:
    rows: tuple[TrajectoryRow, ...]


def to_preference_order(vec: SimplexVector, rainbow: Rainbow) -> SimplexVector:
    """Reindex a canonical-order distribution so entry k is the mass of
    the k-th preferred color."""
    return SimplexVector(tuple(vec.p[i] for i in rainbow.order))


def from_preference_order(vec: SimplexVector, rainbow: Rainbow) -> SimplexVector:
    """Inverse of to_preference_order."""
    out = [0.0] * len(vec)
    for k, i in enumerate(rainbow.order):
        out[i] = vec.p[k]
    return SimplexVector(tuple(out))


def t_step_prefixes(s: Sequence[float], budget: PrivacyBudget) -> tuple[float, ...]:
    """One operator step applied to a prefix-sum sequence."""
    if budget.epsilon == 0.0:
        return tuple(min(1.0, sk + budget.delta) for sk in s)
    e = budget.exp_epsilon
    ei = math.exp(-budget.epsilon)
    d = budget.delta
    return tuple(min(1.0, e * sk + d, 1.0 - ei * (1.0 - sk - d)) for sk in s)


def t_step(p: SimplexVector, budget: PrivacyBudget) -> SimplexVector:
    """Apply the operator once to a distribution in preference order.

    The output is a valid distribution, is (eps,delta)-close to the
    input, and dominates both the input and every distribution close to
    the input.
    """
    if budget.epsilon == 0.0 and budget.delta == 0.0:
        return p
    sp = t_step_prefixes(prefix_sums(p), budget)
    out = []
    prev = 0.0
    for v in sp:
        out.append(v - prev)
        prev = v
    return SimplexVector(tuple(out))


def _tau_of_prefix(s0k: float, budget: PrivacyBudget, rho: float) -> float:
    if s0k + rho <= 0.0:
        return INFINITE
    threshold = 1.0 / (budget.exp_epsilon + 1.0)
    val = math.log((threshold + rho) / (s0k + rho)) / budget.epsilon + 1.0
    return float(math.floor(max(val, 0.0)))


def _crossing_tau(s0k: float, budget: PrivacyBudget, rho: float) -> float:
    # Last step of the growth phase: the operator's two bounds cross at
    # s = (1 - delta) / (e^eps + 1), which in drift-shifted coordinates
    # is 1/(e^eps + 1) + 2 delta / (e^(2 eps) - 1).
    if s0k + rho <= 0.0:
        return INFINITE
    e = budget.exp_epsilon
    shifted = 1.0 / (e + 1.0) + 2.0 * budget.delta / (e * e - 1.0)
    val = math.log(shifted / (s0k + rho)) / budget.epsilon + 1.0
    return float(math.floor(max(val, 0.0)))


def tau_profile(m: SimplexVector, budget: PrivacyBudget) -> TauProfile:
    """Phase-transition index per prefix of a preference-order boundary
    distribution.

    tau_k = floor(max(log(((e^eps+1)^-1 + rho) / (s0_k + rho)) / eps + 1, 0))

    with rho = delta / (e^eps - 1); at delta = 0 this reduces to
    floor(max(-log(s0_k (e^eps+1)) / eps + 1, 0)). Prefixes with
    s0_k + rho = 0 never transition and get the INFINITE sentinel.

    tau_k marks the growth step on which prefix k reaches the weight
    1/(e^eps + 1). At delta = 0 that is exactly where the operator
    switches from growth to approach; at delta > 0 the switch happens
    slightly earlier (see closed_form_prefix), so tau is the reported
    transition landmark, not the internal branch point.
    """
    if budget.epsilon == 0.0:
        raise EpsilonZero("tau profile is undefined at epsilon = 0")
    rho = budget.delta / (budget.exp_epsilon - 1.0)
    tau = tuple(_tau_of_prefix(sk, budget, rho) for sk in prefix_sums(m))
    return TauProfile(rho=rho, tau=tau, epsilon=budget.epsilon, delta=budget.delta)


def _growth_phase(s0k: float, rho: float, eps: float, t: float) -> float:
    # s^t = e^(t eps) (s0 + rho) - rho, capped at 1.
    base = s0k + rho
    if base <= 0.0:
        return 0.0
    if base >= _LOG_FORM_THRESHOLD:
        val = math.exp(t * eps) * base - rho
    else:
        val = math.exp(t * eps + math.log(base)) - rho
    return min(1.0, val)


def closed_form_prefix(
    m: SimplexVector, budget: PrivacyBudget, t: float
) -> tuple[float, ...]:
    """Prefix sums after t operator steps, in closed form.

    At integer t this equals the iterated operator; fractional t
    interpolates along the same two-phase curves. For eps = 0 the
    recurrence collapses to s^t_k = min(1, s0_k + t delta).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    s0 = prefix_sums(m)
    if t == 0:
        return s0
    eps = budget.epsilon
    if eps == 0.0:
        return tuple(min(1.0, sk + t * budget.delta) for sk in s0)
    e = budget.exp_epsilon
    rho = budget.delta / (e - 1.0)
    out = []
    for sk in s0:
        tau = _crossing_tau(sk, budget, rho)
        if t <= tau:
            out.append(_growth_phase(sk, rho, eps, t))
        else:
            s_tau = sk if tau == 0 else _growth_phase(sk, rho, eps, tau)
            val = 1.0 + rho - math.exp(-eps * (t - tau)) * (1.0 + rho - s_tau)
            out.append(min(1.0, val))
    return tuple(out)


def _distribution_at(m: SimplexVector, budget: PrivacyBudget, t: int) -> SimplexVector:
    if t == 0:
        return m
    s = closed_form_prefix(m, budget, t)
    out = []
    prev = 0.0
    for v in s:
        out.append(v - prev)
        prev = v
    return SimplexVector(tuple(out))


def _identity_space(q: int) -> ColorSpace:
    return ColorSpace(tuple(str(k) for k in range(1, q + 1)))


def line_mechanism(m: SimplexVector, budget: PrivacyBudget, n: int) -> Mechanism:
    """The unique optimal mechanism on the path 0..n with boundary m at
    node 0: node i receives the i-th operator power of m.

    m is taken in preference order (the caller applies the rainbow);
    node distributions use the closed form, which avoids accumulating
    float error over long lines.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    assignment: dict[str, SimplexVector] = {}
    prev: SimplexVector | None = None
    for i in range(n + 1):
        cur = _distribution_at(m, budget, i)
        if prev is not None:
            stepped = t_step(prev, budget)
            assert all(
                abs(a - b) <= 1e-9 for a, b in zip(cur, stepped)
            ), f"closed form diverged from iteration at node {i}"
        assignment[str(i)] = cur
        prev = cur
    return Mechanism(assignment, _identity_space(len(m)))


@dataclass(frozen=True)
class BoundaryReport:
    valid: bool
    violations: tuple[tuple[Rainbow, Rainbow], ...]


def validate_boundary_condition(
    graph: RainbowGraph, bc: BoundaryCondition, budget: PrivacyBudget
) -> BoundaryReport:
    """Check the boundary condition: every pair of regions joined by an
    edge must carry (eps,delta)-close boundary distributions.

    Raises MissingRainbow when a rainbow with nonempty boundary has no
    boundary vector; closeness failures are reported, not raised.
    """
    regions = decompose_regions(graph)
    required = [c for c in graph.rainbows() if regions.boundary(c)]
    missing = [c for c in required if c not in bc.values]
    if missing:
        raise MissingRainbow(missing)

    adjacent_pairs: set[tuple[Rainbow, Rainbow]] = set()
    for a, b in graph.edges:
        ca, cb = graph.preference[a], graph.preference[b]
        if ca != cb:
            pair = (ca, cb) if ca.order < cb.order else (cb, ca)
            adjacent_pairs.add(pair)
    violations = tuple(
        (ca, cb)
        for ca, cb in sorted(adjacent_pairs, key=lambda pr: (pr[0].order, pr[1].order))
        if not is_close(bc.values[ca], bc.values[cb], budget)
    )
    return BoundaryReport(valid=not violations, violations=violations)


def optimal_mechanism(
    graph: RainbowGraph, bc: BoundaryCondition, budget: PrivacyBudget
) -> Mechanism:
    """Construct the unique optimal (eps,delta)-DP mechanism for a valid
    homogeneous boundary condition.

    Each node's distribution is the boundary vector of its rainbow,
    taken to preference order, advanced by the operator as many times as
    the node's distance to its region's boundary, and permuted back to
    canonical order. The result is boundary homogeneous, satisfies the
    privacy constraint on every edge, and dominates every valid
    mechanism with the same boundary values.
    """
    report = validate_boundary_condition(graph, bc, budget)
    if not report.valid:
        raise InvalidBoundary(report.violations)
    regions = decompose_regions(graph)
    dist = boundary_distances(graph, regions)

    tilde: dict[Rainbow, SimplexVector] = {}
    assignment: dict[str, SimplexVector] = {}
    for d in graph.nodes:
        c = graph.preference[d]
        if dist[d] == 0:
            assignment[d] = bc.values[c]
            continue
        if c not in tilde:
            tilde[c] = to_preference_order(bc.values[c], c)
        advanced = _distribution_at(tilde[c], budget, dist[d])
        assignment[d] = from_preference_order(advanced, c)
    return Mechanism(assignment, graph.color_space)


@dataclass(frozen=True)
class DpViolation:
    edge: tuple[str, str]
    direction: tuple[str, str]
    margin: float


@dataclass(frozen=True)
class DpReport:
    valid: bool
    violations: tuple[DpViolation, ...]


def verify_dp(
    graph: RainbowGraph,
    mech: Mechanism,
    budget: PrivacyBudget,
    tol: float = DEFAULT_TOL,
) -> DpReport:
    """Check closeness on every edge of the graph.

    A violation records the edge, the failing direction (P, Q), and the
    margin by which delta is exceeded.
    """
    violations: list[DpViolation] = []
    e = budget.exp_epsilon
    for a, b in sorted(graph.edges):
        for src, dst in ((a, b), (b, a)):
            try:
                p = mech.assignment[src]
                q_ = mech.assignment[dst]
            except KeyError as exc:
                raise KeyError(f"mechanism has no distribution for node {exc.args[0]!r}") from None
            margin = subset_excess(p, q_, e) - budget.delta
            if margin > tol:
                violations.append(DpViolation((a, b), (src, dst), margin))
    return DpReport(valid=not violations, violations=tuple(violations))


def is_boundary_homogeneous(
    graph: RainbowGraph, mech: Mechanism, tol: float = DEFAULT_TOL
) -> bool:
    """True iff within each rainbow's boundary all node distributions
    agree entrywise within tol."""
    regions = decompose_regions(graph)
    for c in graph.rainbows():
        boundary = sorted(regions.boundary(c))
        if len(boundary) < 2:
            continue
        ref = mech.assignment[boundary[0]]
        for d in boundary[1:]:
            vec = mech.assignment[d]
            if any(abs(x - y) > tol for x, y in zip(ref, vec)):
                return False
    return True


def utility_eval(
    graph: RainbowGraph,
    mech: Mechanism,
    weights: Mapping[str, Sequence[float]],
) -> float:
    """Expected total utility of a mechanism under per-node weights.

    weights[d][k] is the payoff when node d's output is its k-th
    preferred color; each weight sequence must be nonincreasing in k.
    """
    total = 0.0
    for d in graph.nodes:
        w = weights[d]
        if len(w) != graph.color_space.q:
            raise ValueError(f"weight sequence for node {d!r} has wrong length")
        if any(w[i] < w[i + 1] - 1e-12 for i in range(len(w) - 1)):
            raise ValueError(f"weight sequence for node {d!r} is not nonincreasing")
        vec = mech.assignment[d]
        order = graph.preference[d].order
        total += sum(w[k] * vec.p[i] for k, i in enumerate(order))
    return total


def mechanism_dominates(
    graph: RainbowGraph, a: Mechanism, b: Mechanism, tol: float = DEFAULT_TOL
) -> bool:
    """Nodewise dominance of mechanism a over b, compared on the
    preference-order view of each node."""
    for d in graph.nodes:
        c = graph.preference[d]
        va = to_preference_order(a.assignment[d], c)
        vb = to_preference_order(b.assignment[d], c)
        if not dominates(va, vb, tol):
            return False
    return True


def build_trajectory(
    m: SimplexVector,
    budget: PrivacyBudget,
    steps: int,
    substeps: int = 1,
    colors: Sequence[str] | None = None,
) -> TrajectoryTable:
    """Sample the closed-form trajectory of m on the grid
    t = 0, 1/substeps, ..., steps."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    q = len(m)
    names = list(colors) if colors is not None else [str(k) for k in range(1, q + 1)]
    if len(names) != q:
        raise ValueError("colors length does not match the distribution")
    rows: list[TrajectoryRow] = []
    for i in range(steps * substeps + 1):
        t = i / substeps
        s = closed_form_prefix(m, budget, t)
        prev = 0.0
        for k, sk in enumerate(s, start=1):
            rows.append(TrajectoryRow(t=t, k=k, color=names[k - 1], p=sk - prev, s=sk))
            prev = sk
    return TrajectoryTable(tuple(rows))
