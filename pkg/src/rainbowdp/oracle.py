"""Independent verification oracles: exhaustive subset closeness, seeded
sampling of close distributions, dominance falsification, and the
pentagon demonstration that non-homogeneous boundary conditions can
admit valid mechanisms but no optimal one.

All randomness flows through explicitly seeded 64-bit PCG64 generators;
there is no global RNG state anywhere in this module.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    DEFAULT_TOL,
    ColorSpace,
    PrivacyBudget,
    Rainbow,
    SimplexVector,
    is_close,
    prefix_sums,
)
from .graph import RainbowGraph
from .mechanism import (
    BoundaryCondition,
    Mechanism,
    is_boundary_homogeneous,
    optimal_mechanism,
    t_step,
    t_step_prefixes,
    verify_dp,
)

_MAX_BRUTEFORCE_Q = 20


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


@functools.lru_cache(maxsize=None)
def _subset_masks(q: int) -> np.ndarray:
    # Rows are the indicator vectors of all 2^q outcome subsets.
    idx = np.arange(2**q, dtype=np.uint32)
    return ((idx[:, None] >> np.arange(q)) & 1).astype(np.float64)


def is_close_bruteforce(
    p: SimplexVector,
    q_: SimplexVector,
    budget: PrivacyBudget,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Closeness by literal quantification over all 2^q outcome subsets.

    Semantically identical to core.is_close; exists as an independent
    cross-check of the per-element shortcut.
    """
    if len(p) != len(q_):
        raise ValueError(f"length mismatch: {len(p)} vs {len(q_)}")
    if len(p) > _MAX_BRUTEFORCE_Q:
        raise ValueError(f"alphabet too large for subset enumeration: {len(p)}")
    masks = _subset_masks(len(p))
    pa = np.asarray(p.p)
    qa = np.asarray(q_.p)
    ps = masks @ pa
    qs = masks @ qa
    e = budget.exp_epsilon
    bound = budget.delta + tol
    return float(np.max(ps - e * qs)) <= bound and float(np.max(qs - e * ps)) <= bound


@dataclass(frozen=True)
class CloseSamples:
    """Output of sample_close. degenerate_budget is set when the budget
    admits no distribution other than p itself."""

    vectors: tuple[SimplexVector, ...]
    degenerate_budget: bool = False


def _accept_mask(cand: np.ndarray, pa: np.ndarray, budget: PrivacyBudget) -> np.ndarray:
    # Strict closeness (no tolerance slack) so the vectors still pass
    # is_close after construction-time renormalization.
    e = budget.exp_epsilon
    ex1 = np.maximum(cand - e * pa, 0.0).sum(axis=1)
    ex2 = np.maximum(pa - e * cand, 0.0).sum(axis=1)
    return (ex1 <= budget.delta) & (ex2 <= budget.delta)


def _raw_close_samples(
    p: SimplexVector, budget: PrivacyBudget, n: int, rng: np.random.Generator
) -> np.ndarray:
    """n accepted candidates, as rows. Candidates mix p toward a uniform
    simplex draw with a random weight; rejected rows have their weight
    halved until they pass, which terminates because the close set
    contains a neighborhood of p (within its support) whenever eps > 0
    or delta > 0."""
    q = len(p)
    pa = np.asarray(p.p)
    if budget.delta > 0.0:
        support = np.ones(q, dtype=bool)
    else:
        support = pa > 0.0
    gam = np.zeros((n, q))
    gam[:, support] = rng.gamma(1.0, 1.0, size=(n, int(support.sum())))
    u = gam / gam.sum(axis=1, keepdims=True)
    lam = rng.uniform(0.0, 1.0, size=n)

    cand = pa + lam[:, None] * (u - pa)
    for _ in range(200):
        bad = ~_accept_mask(cand, pa, budget)
        if not bad.any():
            break
        lam[bad] *= 0.5
        cand[bad] = pa + lam[bad, None] * (u[bad] - pa)
    else:
        cand[~_accept_mask(cand, pa, budget)] = pa
    return cand


def sample_close(
    p: SimplexVector, budget: PrivacyBudget, count: int, seed: int
) -> CloseSamples:
    """Deterministic sample of `count` distributions, each (eps,delta)-
    close to p. The first sample is always p and the second is t_step(p);
    the rest come from seeded rejection sampling.

    A (0,0) budget admits only p itself: the result is [p] with the
    degenerate flag set when more was requested.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if budget.epsilon == 0.0 and budget.delta == 0.0:
        return CloseSamples((p,), degenerate_budget=count > 1)
    vectors: list[SimplexVector] = [p]
    if count >= 2:
        vectors.append(t_step(p, budget))
    if count > 2:
        raw = _raw_close_samples(p, budget, count - 2, _rng(seed))
        vectors.extend(SimplexVector(tuple(row)) for row in raw)
    return CloseSamples(tuple(vectors))


@dataclass(frozen=True)
class Counterexample:
    vector: SimplexVector
    prefix_index: int
    margin: float


@dataclass(frozen=True)
class FalsificationReport:
    trials: int
    counterexample: Counterexample | None
    seed: int


def dominance_falsify(
    p: SimplexVector,
    budget: PrivacyBudget,
    trials: int,
    seed: int,
    step_fn: Callable[[SimplexVector, PrivacyBudget], SimplexVector] | None = None,
    tol: float = DEFAULT_TOL,
) -> FalsificationReport:
    """Search for a close distribution that the operator output fails to
    dominate.

    Each sampled close p'' is checked against the prefix sums of
    step_fn(p) and against the analytic envelope
    min(1, min(e^eps s_k, 1 - e^-eps (1 - s_k)) + delta). For the real
    operator the two coincide and no counterexample exists; the hook
    exists so a deliberately corrupted operator can be fed to the same
    harness. A reported counterexample is re-verified (closeness to p
    and the violated prefix) before being returned.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    op = step_fn if step_fn is not None else t_step
    target = np.asarray(prefix_sums(op(p, budget)))
    envelope = np.asarray(t_step_prefixes(prefix_sums(p), budget))
    bound = np.minimum(target, envelope)

    samples = sample_close(p, budget, trials, seed).vectors
    rows = np.asarray([vec.p for vec in samples])
    prefixes = np.cumsum(rows, axis=1)
    excess = prefixes - bound[None, :]
    worst_k = np.argmax(excess, axis=1)
    worst = excess[np.arange(len(samples)), worst_k]
    hits = np.nonzero(worst > tol)[0]

    counterexample = None
    if hits.size:
        i = int(hits[0])
        vec = samples[i]
        k = int(worst_k[i])
        margin = float(worst[i])
        if not is_close(vec, p, budget):
            raise RuntimeError("falsifier produced a sample that is not close to p")
        if prefix_sums(vec)[k] <= min(target[k], envelope[k]) + tol:
            raise RuntimeError("falsifier counterexample failed re-verification")
        counterexample = Counterexample(vector=vec, prefix_index=k, margin=margin)
    return FalsificationReport(trials=len(samples), counterexample=counterexample, seed=seed)


def _drop_delta_step(p: SimplexVector, budget: PrivacyBudget) -> SimplexVector:
    """Deliberately corrupted operator that forgets the +delta term.

    Kept here for harness self-validation: when delta > 0 the falsifier
    must catch this mutant quickly.
    """
    stripped = PrivacyBudget(budget.epsilon, 0.0)
    return t_step(p, stripped)


def pentagon_graph() -> RainbowGraph:
    """Five datasets on a cycle: d1..d4 prefer (1,2,3), d5 prefers (1,3,2)."""
    space = ColorSpace(("1", "2", "3"))
    c123 = Rainbow((0, 1, 2))
    c132 = Rainbow((0, 2, 1))
    nodes = ("d1", "d2", "d3", "d4", "d5")
    edges = frozenset(
        (("d1", "d2"), ("d2", "d3"), ("d3", "d4"), ("d4", "d5"), ("d1", "d5"))
    )
    preference = {d: c123 for d in ("d1", "d2", "d3", "d4")}
    preference["d5"] = c132
    return RainbowGraph(nodes, edges, preference, space)


# Non-homogeneous boundary of the pentagon. The cycle leaves d5's value
# unpinned; (0.3, 0.1, 0.6) is close to both neighbors at e^eps = 2,
# delta = 0, so every verdict below is about the interior nodes.
_PENTAGON_BOUNDARY = {
    "d1": (0.2, 0.1, 0.7),
    "d4": (0.4, 0.1, 0.5),
    "d5": (0.3, 0.1, 0.6),
}


@dataclass(frozen=True, eq=False)
class NoOptimalReport:
    budget: PrivacyBudget
    graph: RainbowGraph
    mech1: Mechanism
    mech2: Mechanism
    mech3: Mechanism
    mech1_valid: bool
    mech2_valid: bool
    mech3_valid: bool
    violating_edge: tuple[str, str] | None
    margin: float | None
    boundary_homogeneous: bool


def no_optimal_demo(budget: PrivacyBudget | None = None) -> NoOptimalReport:
    """Exhibit a non-homogeneous boundary condition with valid mechanisms
    but no optimal one.

    Two valid completions of the pentagon boundary are built; the
    mechanism forced by dominance against both (d2 from the first, d3
    from the second) violates closeness on edge (d2, d3). At the
    canonical budget e^eps = 2, delta = 0 the verdict triple is
    (valid, valid, invalid).
    """
    if budget is None:
        budget = PrivacyBudget(math.log(2.0), 0.0)
    graph = pentagon_graph()
    space = graph.color_space
    base = {d: SimplexVector(v) for d, v in _PENTAGON_BOUNDARY.items()}

    mech1 = Mechanism(
        {**base, "d2": SimplexVector((0.4, 0.2, 0.4)), "d3": SimplexVector((0.4, 0.2, 0.4))},
        space,
    )
    mech2 = Mechanism(
        {**base, "d2": SimplexVector((0.4, 0.1, 0.5)), "d3": SimplexVector((0.7, 0.05, 0.25))},
        space,
    )
    mech3 = Mechanism(
        {**base, "d2": mech1.assignment["d2"], "d3": mech2.assignment["d3"]},
        space,
    )

    r1 = verify_dp(graph, mech1, budget)
    r2 = verify_dp(graph, mech2, budget)
    r3 = verify_dp(graph, mech3, budget)
    edge = r3.violations[0].edge if r3.violations else None
    margin = r3.violations[0].margin if r3.violations else None
    return NoOptimalReport(
        budget=budget,
        graph=graph,
        mech1=mech1,
        mech2=mech2,
        mech3=mech3,
        mech1_valid=r1.valid,
        mech2_valid=r2.valid,
        mech3_valid=r3.valid,
        violating_edge=edge,
        margin=margin,
        boundary_homogeneous=is_boundary_homogeneous(graph, mech1),
    )


def homogenized_pentagon(budget: PrivacyBudget | None = None) -> tuple[RainbowGraph, Mechanism]:
    """The same pentagon with the boundary made homogeneous
    (d1 = d4 = (0.4, 0.1, 0.5)); here the optimal mechanism exists."""
    if budget is None:
        budget = PrivacyBudget(math.log(2.0), 0.0)
    graph = pentagon_graph()
    c123 = graph.preference["d1"]
    c132 = graph.preference["d5"]
    bc = BoundaryCondition(
        {
            c123: SimplexVector((0.4, 0.1, 0.5)),
            c132: SimplexVector((0.3, 0.1, 0.6)),
        }
    )
    return graph, optimal_mechanism(graph, bc, budget)
