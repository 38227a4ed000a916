"""Rainbow graphs, region topology, boundary graphs, and morphisms.

A rainbow graph is a simple undirected graph of datasets where every
node carries a preference order (rainbow) over the output colors. Each
rainbow's node class splits into interior (all neighbors share the
rainbow) and boundary (the rest). The boundary graph compresses each
class to a chain indexed by distance-to-boundary, and the boundary
morphism sends a node to its (rainbow, distance) pair.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .core import ColorSpace, Rainbow


class UnconstrainedRegion(RuntimeError):
    """A rainbow class with no boundary: nothing ties its distributions
    to the rest of the graph, so no unique optimum exists there."""

    def __init__(self, rainbow: Rainbow, space: ColorSpace | None = None):
        self.rainbow = rainbow
        label = ",".join(space.colors[i] for i in rainbow.order) if space else str(rainbow.order)
        super().__init__(f"rainbow ({label}) has an empty boundary in some component")


def _normalize_edge(a: str, b: str) -> tuple[str, str]:
    if a == b:
        raise ValueError(f"self-loop on node {a!r}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True, eq=False)
class RainbowGraph:
    """Datasets, symmetric neighbor edges, and a rainbow per dataset."""

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    preference: Mapping[str, Rainbow]
    color_space: ColorSpace

    def __post_init__(self) -> None:
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if len(set(nodes)) != len(nodes):
            raise ValueError("duplicate node identifiers")
        node_set = set(nodes)
        edges = frozenset(_normalize_edge(a, b) for a, b in self.edges)
        object.__setattr__(self, "edges", edges)
        for a, b in edges:
            if a not in node_set or b not in node_set:
                raise ValueError(f"edge ({a!r}, {b!r}) references an undeclared node")
        pref = dict(self.preference)
        object.__setattr__(self, "preference", pref)
        if set(pref) != node_set:
            raise ValueError("preference must assign a rainbow to exactly the declared nodes")
        for d, c in pref.items():
            if c.q != self.color_space.q:
                raise ValueError(f"rainbow of node {d!r} has wrong length")

    @cached_property
    def adjacency(self) -> dict[str, tuple[str, ...]]:
        nbrs: dict[str, list[str]] = {d: [] for d in self.nodes}
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return {d: tuple(sorted(v)) for d, v in nbrs.items()}

    def neighbors(self, node: str) -> tuple[str, ...]:
        return self.adjacency[node]

    def rainbows(self) -> tuple[Rainbow, ...]:
        """Distinct rainbows occurring in the graph, in a deterministic order."""
        return tuple(sorted({c for c in self.preference.values()}, key=lambda c: c.order))


@dataclass(frozen=True)
class Region:
    members: frozenset[str]
    interior: frozenset[str]
    boundary: frozenset[str]


@dataclass(frozen=True, eq=False)
class RegionDecomposition:
    """Per-rainbow node class with its interior/boundary split."""

    regions: Mapping[Rainbow, Region]

    def __post_init__(self) -> None:
        object.__setattr__(self, "regions", dict(self.regions))

    def members(self, c: Rainbow) -> frozenset[str]:
        return self.regions[c].members

    def interior(self, c: Rainbow) -> frozenset[str]:
        return self.regions[c].interior

    def boundary(self, c: Rainbow) -> frozenset[str]:
        return self.regions[c].boundary


def decompose_regions(graph: RainbowGraph) -> RegionDecomposition:
    """Partition the nodes by rainbow and classify each node as interior
    (every neighbor shares its rainbow) or boundary (some neighbor does
    not)."""
    regions: dict[Rainbow, Region] = {}
    for c in graph.rainbows():
        members = frozenset(d for d in graph.nodes if graph.preference[d] == c)
        interior = frozenset(
            d for d in members
            if all(graph.preference[n] == c for n in graph.neighbors(d))
        )
        regions[c] = Region(members, interior, members - interior)
    return RegionDecomposition(regions)


def boundary_distances(
    graph: RainbowGraph, regions: RegionDecomposition
) -> dict[str, int]:
    """Shortest-path distance from each node to the boundary of its own
    rainbow class.

    Distances are measured in the full graph (paths may leave the
    class); a multi-source breadth-first search from each boundary set
    covers one rainbow at a time. Raises UnconstrainedRegion when a
    class has nodes that no boundary node of the same rainbow can reach,
    which includes the empty-boundary case.
    """
    dist: dict[str, int] = {}
    for c, region in sorted(regions.regions.items(), key=lambda kv: kv[0].order):
        if not region.members:
            continue
        if not region.boundary:
            raise UnconstrainedRegion(c, graph.color_space)
        seen = {d: 0 for d in region.boundary}
        queue = deque(sorted(region.boundary))
        while queue:
            d = queue.popleft()
            for n in graph.neighbors(d):
                if n not in seen:
                    seen[n] = seen[d] + 1
                    queue.append(n)
        for d in region.members:
            if d not in seen:
                # Some component of the class sits in a component of the
                # graph with no boundary for this rainbow.
                raise UnconstrainedRegion(c, graph.color_space)
            dist[d] = seen[d]
    return dist


@dataclass(eq=False)
class Morphism:
    """A candidate graph map; validity is judged by check_morphism."""

    domain: RainbowGraph
    codomain: RainbowGraph
    mapping: Mapping[str, str]

    def __post_init__(self) -> None:
        self.mapping = dict(self.mapping)
        missing = [d for d in self.domain.nodes if d not in self.mapping]
        if missing:
            raise ValueError(f"mapping not total on domain nodes: missing {missing[:3]}")
        bad = [d for d, v in self.mapping.items() if v not in set(self.codomain.nodes)]
        if bad:
            raise ValueError(f"mapping leaves the codomain at {bad[:3]}")

    def __call__(self, node: str) -> str:
        return self.mapping[node]


@dataclass(frozen=True)
class MorphismReport:
    is_morphism: bool
    is_rainbow_preserving: bool
    violations: tuple[tuple, ...]


def check_morphism(m: Morphism) -> MorphismReport:
    """Report whether every domain edge maps to a codomain edge or
    collapses, and whether rainbows are preserved under the map.

    Violations are data, not errors: ("edge", a, b) for an edge sent to
    distinct non-adjacent images, ("rainbow", d) for a node whose
    rainbow differs from its image's.
    """
    violations: list[tuple] = []
    cod_edges = m.codomain.edges
    for a, b in sorted(m.domain.edges):
        ga, gb = m.mapping[a], m.mapping[b]
        if ga != gb and _normalize_edge(ga, gb) not in cod_edges:
            violations.append(("edge", a, b))
    edge_ok = not violations
    for d in sorted(m.domain.nodes):
        if m.domain.preference[d] != m.codomain.preference[m.mapping[d]]:
            violations.append(("rainbow", d))
    rainbow_ok = all(v[0] != "rainbow" for v in violations)
    return MorphismReport(edge_ok, rainbow_ok, tuple(violations))


def boundary_node_id(space: ColorSpace, rainbow: Rainbow, i: int) -> str:
    """Identifier of the boundary-graph node for (rainbow, distance i)."""
    return ",".join(rainbow.color_names(space)) + f"@{i}"


@dataclass(eq=False)
class BoundaryGraph:
    """One chain per rainbow, indexed by distance to boundary, with head
    edges between rainbows whose classes touch in the source graph."""

    graph: RainbowGraph
    depths: dict[Rainbow, int]
    morphism: Morphism
    pairs: dict[str, tuple[Rainbow, int]]

    def node_id(self, rainbow: Rainbow, i: int) -> str:
        return boundary_node_id(self.graph.color_space, rainbow, i)


def line_graph(space: ColorSpace, rainbow: Rainbow, n: int) -> RainbowGraph:
    """The path 0..n with every node carrying the same rainbow; node 0
    plays the role of the boundary."""
    if n < 0:
        raise ValueError("n must be >= 0")
    nodes = tuple(str(i) for i in range(n + 1))
    edges = frozenset((str(i), str(i + 1)) for i in range(n))
    return RainbowGraph(nodes, edges, {d: rainbow for d in nodes}, space)


def build_boundary_graph(graph: RainbowGraph) -> BoundaryGraph:
    """Compress a rainbow graph to its boundary graph.

    Per rainbow c the chain (c,0)-(c,1)-...-(c,depth_c) is created,
    depth_c being the largest distance-to-boundary inside the class.
    Heads (c,0), (c',0) are joined exactly when some source edge joins
    the two classes. The returned morphism sends d to
    (rainbow of d, distance of d), and is rainbow-preserving.
    """
    regions = decompose_regions(graph)
    dist = boundary_distances(graph, regions)
    space = graph.color_space

    depths: dict[Rainbow, int] = {}
    for c in graph.rainbows():
        depths[c] = max(dist[d] for d in regions.members(c))

    nodes: list[str] = []
    pairs: dict[str, tuple[Rainbow, int]] = {}
    preference: dict[str, Rainbow] = {}
    edges: set[tuple[str, str]] = set()
    for c in graph.rainbows():
        for i in range(depths[c] + 1):
            nid = boundary_node_id(space, c, i)
            nodes.append(nid)
            pairs[nid] = (c, i)
            preference[nid] = c
        for i in range(depths[c]):
            edges.add(_normalize_edge(boundary_node_id(space, c, i), boundary_node_id(space, c, i + 1)))
    for a, b in graph.edges:
        ca, cb = graph.preference[a], graph.preference[b]
        if ca != cb:
            edges.add(_normalize_edge(boundary_node_id(space, ca, 0), boundary_node_id(space, cb, 0)))

    bgraph = RainbowGraph(tuple(nodes), frozenset(edges), preference, space)
    mapping = {d: boundary_node_id(space, graph.preference[d], dist[d]) for d in graph.nodes}
    morphism = Morphism(graph, bgraph, mapping)
    report = check_morphism(morphism)
    if not (report.is_morphism and report.is_rainbow_preserving):
        raise AssertionError(f"boundary morphism failed validation: {report.violations}")
    return BoundaryGraph(bgraph, depths, morphism, pairs)


def pullback(mechanism_on_codomain, morphism: Morphism):
    """Transport a mechanism from the morphism's codomain to its domain
    by composition: node d receives the distribution of its image."""
    assignment = {}
    for d in morphism.domain.nodes:
        target = morphism.mapping[d]
        if target not in mechanism_on_codomain.assignment:
            raise KeyError(f"codomain node {target!r} has no distribution")
        assignment[d] = mechanism_on_codomain.assignment[target]
    return dataclasses.replace(mechanism_on_codomain, assignment=assignment)
