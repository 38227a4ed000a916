"""Shared builders for the test suite: seeded RNGs, random graphs with
solvable boundary structure, random valid boundary conditions, and the
competitor mechanisms used for optimality checks."""

from __future__ import annotations

from collections import deque
from itertools import permutations

import numpy as np

import rainbowdp as r


def rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def sv(*vals) -> r.SimplexVector:
    return r.SimplexVector(tuple(vals))


def random_simplex(g: np.random.Generator, q: int, zero_rate: float = 0.0) -> r.SimplexVector:
    w = g.gamma(1.0, 1.0, q)
    if zero_rate > 0.0:
        mask = g.random(q) < zero_rate
        if mask.all():
            mask[int(g.integers(q))] = False
        w[mask] = 0.0
    if w.sum() == 0.0:
        w[0] = 1.0
    return r.SimplexVector(tuple(w / w.sum()))


def random_budget(
    g: np.random.Generator,
    e_eps_range=(1.01, 10.0),
    delta_range=(0.0, 0.2),
    zero_delta_rate=0.3,
) -> r.PrivacyBudget:
    e_eps = g.uniform(*e_eps_range)
    delta = 0.0 if g.random() < zero_delta_rate else g.uniform(*delta_range)
    return r.PrivacyBudget(float(np.log(e_eps)), float(delta))


def distinct_rainbows(g: np.random.Generator, q: int, count: int) -> list[r.Rainbow]:
    if q <= 5:
        pool = list(permutations(range(q)))
        idx = g.choice(len(pool), size=count, replace=False)
        return [r.Rainbow(pool[i]) for i in idx]
    seen: set[tuple[int, ...]] = set()
    while len(seen) < count:
        seen.add(tuple(int(i) for i in g.permutation(q)))
    return [r.Rainbow(o) for o in sorted(seen)]


def random_solvable_graph(
    g: np.random.Generator,
    max_nodes: int = 40,
    max_rainbows: int = 4,
    q_choices=(3, 4, 5),
) -> r.RainbowGraph:
    """Connected graph with at least two rainbow classes, so every class
    has a nonempty boundary."""
    q = int(g.choice(list(q_choices)))
    space = r.ColorSpace(tuple(f"c{i}" for i in range(1, q + 1)))
    n_rainbows = int(g.integers(2, max_rainbows + 1))
    rainbows = distinct_rainbows(g, q, n_rainbows)
    n = int(g.integers(max(3, n_rainbows), max_nodes + 1))
    nodes = tuple(f"d{i:02d}" for i in range(n))
    edges: set[tuple[str, str]] = set()
    for i in range(1, n):
        j = int(g.integers(0, i))
        a, b = sorted((nodes[i], nodes[j]))
        edges.add((a, b))
    for _ in range(int(g.integers(0, n))):
        i, j = g.integers(0, n, size=2)
        if i != j:
            a, b = sorted((nodes[int(i)], nodes[int(j)]))
            edges.add((a, b))
    labels = [rainbows[int(g.integers(n_rainbows))] for _ in range(n)]
    if len(set(labels)) == 1:
        labels[-1] = next(c for c in rainbows if c != labels[0])
    return r.RainbowGraph(nodes, frozenset(edges), dict(zip(nodes, labels)), space)


def random_homogeneous_bc(
    g: np.random.Generator, graph: r.RainbowGraph, budget: r.PrivacyBudget
) -> r.BoundaryCondition:
    """Random per-rainbow boundary vectors, shrunk toward a common base
    until every adjacent region pair is close under the budget."""
    q = graph.color_space.q
    base = g.dirichlet(np.ones(q))
    targets = {c: g.dirichlet(np.ones(q)) for c in graph.rainbows()}
    lam = 0.5
    while True:
        bc = r.BoundaryCondition(
            {c: r.SimplexVector(tuple(base + lam * (t - base))) for c, t in targets.items()}
        )
        if r.validate_boundary_condition(graph, bc, budget).valid:
            return bc
        lam *= 0.5


def boundary_line_mechanisms(
    graph: r.RainbowGraph, bc: r.BoundaryCondition, budget: r.PrivacyBudget
) -> tuple[r.Mechanism, r.BoundaryGraph]:
    """Per-rainbow chains of iterated operator steps on the boundary
    graph; pulling this back along the boundary morphism yields a valid
    mechanism on the source graph."""
    bg = r.build_boundary_graph(graph)
    assign: dict[str, r.SimplexVector] = {}
    for c, depth in bg.depths.items():
        cur = r.to_preference_order(bc.values[c], c)
        for i in range(depth + 1):
            assign[bg.node_id(c, i)] = r.from_preference_order(cur, c)
            cur = r.t_step(cur, budget)
    return r.Mechanism(assign, graph.color_space), bg


def components(graph: r.RainbowGraph) -> list[list[str]]:
    seen: set[str] = set()
    out: list[list[str]] = []
    for start in graph.nodes:
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            d = queue.popleft()
            for nb in graph.neighbors(d):
                if nb not in seen:
                    seen.add(nb)
                    comp.append(nb)
                    queue.append(nb)
        out.append(sorted(comp))
    return out


def bfs_depths(graph: r.RainbowGraph, root: str) -> dict[str, int]:
    depth = {root: 0}
    queue = deque([root])
    while queue:
        d = queue.popleft()
        for nb in graph.neighbors(d):
            if nb not in depth:
                depth[nb] = depth[d] + 1
                queue.append(nb)
    return depth


def random_dp_mechanism(
    g: np.random.Generator, graph: r.RainbowGraph, budget: r.PrivacyBudget
) -> r.Mechanism:
    """A nontrivial mechanism that satisfies the budget by construction:
    each component's nodes get operator powers of a random base, indexed
    by breadth-first depth (adjacent depths differ by at most one)."""
    q = graph.color_space.q
    assign: dict[str, r.SimplexVector] = {}
    for comp in components(graph):
        base = random_simplex(g, q)
        depth = bfs_depths(graph, comp[0])
        powers = [base]
        max_depth = max(depth[d] for d in comp)
        for _ in range(max_depth):
            powers.append(r.t_step(powers[-1], budget))
        for d in comp:
            assign[d] = powers[depth[d]]
    return r.Mechanism(assign, graph.color_space)


def random_blowup_morphism(
    g: np.random.Generator, codomain: r.RainbowGraph
) -> r.Morphism:
    """A random morphism onto `codomain`: each codomain node explodes
    into 1..3 chained copies, and each codomain edge is realized by at
    least one copy pair."""
    nodes: list[str] = []
    mapping: dict[str, str] = {}
    copies: dict[str, list[str]] = {}
    preference: dict[str, r.Rainbow] = {}
    edges: set[tuple[str, str]] = set()
    for v in codomain.nodes:
        k = int(g.integers(1, 4))
        copies[v] = []
        for i in range(k):
            name = f"{v}/{i}"
            nodes.append(name)
            mapping[name] = v
            preference[name] = codomain.preference[v]
            copies[v].append(name)
        for i in range(k - 1):
            a, b = sorted((copies[v][i], copies[v][i + 1]))
            edges.add((a, b))
    for u, v in codomain.edges:
        picks = int(g.integers(1, 3))
        for _ in range(picks):
            a = copies[u][int(g.integers(len(copies[u])))]
            b = copies[v][int(g.integers(len(copies[v])))]
            a, b = sorted((a, b))
            edges.add((a, b))
    domain = r.RainbowGraph(tuple(nodes), frozenset(edges), preference, codomain.color_space)
    return r.Morphism(domain, codomain, mapping)


def path5_graph() -> r.RainbowGraph:
    space = r.ColorSpace(("1", "2", "3"))
    b = r.Rainbow((0, 1, 2))
    red = r.Rainbow((1, 0, 2))
    nodes = ("n0", "n1", "n2", "n3", "n4")
    edges = frozenset((("n0", "n1"), ("n1", "n2"), ("n2", "n3"), ("n3", "n4")))
    pref = {"n0": b, "n1": b, "n2": b, "n3": red, "n4": red}
    return r.RainbowGraph(nodes, edges, pref, space)


def path5_bc() -> r.BoundaryCondition:
    graph = path5_graph()
    b = graph.preference["n0"]
    red = graph.preference["n3"]
    return r.BoundaryCondition(
        {b: sv(0.2, 0.1, 0.7), red: sv(0.4, 0.2, 0.4)}
    )
