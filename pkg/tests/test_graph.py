import math

import pytest

import rainbowdp as r
from helpers import (
    bfs_depths,
    boundary_line_mechanisms,
    path5_bc,
    path5_graph,
    random_blowup_morphism,
    random_budget,
    random_dp_mechanism,
    random_solvable_graph,
    rng,
    sv,
)


def triangle_graph():
    space = r.ColorSpace(("1", "2", "3"))
    c = r.Rainbow((0, 1, 2))
    nodes = ("a", "b", "c")
    edges = frozenset((("a", "b"), ("b", "c"), ("a", "c")))
    return r.RainbowGraph(nodes, edges, {d: c for d in nodes}, space), c


def test_rainbow_graph_validation():
    space = r.ColorSpace(("1", "2"))
    c = r.Rainbow((0, 1))
    with pytest.raises(ValueError):
        r.RainbowGraph(("a", "a"), frozenset(), {"a": c}, space)
    with pytest.raises(ValueError):
        r.RainbowGraph(("a",), frozenset((("a", "a"),)), {"a": c}, space)
    with pytest.raises(ValueError):
        r.RainbowGraph(("a", "b"), frozenset((("a", "z"),)), {"a": c, "b": c}, space)
    with pytest.raises(ValueError):
        r.RainbowGraph(("a", "b"), frozenset(), {"a": c}, space)


def test_decompose_regions_path5():
    graph = path5_graph()
    b = graph.preference["n0"]
    red = graph.preference["n3"]
    regions = r.decompose_regions(graph)
    assert regions.members(b) == frozenset({"n0", "n1", "n2"})
    assert regions.boundary(b) == frozenset({"n2"})
    assert regions.interior(b) == frozenset({"n0", "n1"})
    assert regions.members(red) == frozenset({"n3", "n4"})
    assert regions.boundary(red) == frozenset({"n3"})
    assert regions.interior(red) == frozenset({"n4"})


def test_decompose_regions_single_rainbow_triangle():
    graph, c = triangle_graph()
    regions = r.decompose_regions(graph)
    assert regions.boundary(c) == frozenset()
    assert regions.interior(c) == frozenset(graph.nodes)


def test_decompose_regions_pentagon():
    graph = r.pentagon_graph()
    c123 = graph.preference["d1"]
    regions = r.decompose_regions(graph)
    assert regions.boundary(c123) == frozenset({"d1", "d4"})
    assert regions.interior(c123) == frozenset({"d2", "d3"})


def test_decompose_regions_partitions_nodes():
    g = rng(20)
    for _ in range(30):
        graph = random_solvable_graph(g, max_nodes=25)
        regions = r.decompose_regions(graph)
        seen: set[str] = set()
        for c in graph.rainbows():
            members = regions.members(c)
            assert regions.interior(c) | regions.boundary(c) == members
            assert not regions.interior(c) & regions.boundary(c)
            assert not members & seen
            seen |= members
        assert seen == set(graph.nodes)


def test_boundary_distances_path5():
    graph = path5_graph()
    dist = r.boundary_distances(graph, r.decompose_regions(graph))
    assert dist == {"n0": 2, "n1": 1, "n2": 0, "n3": 0, "n4": 1}


def test_boundary_distances_errors_on_unconstrained_region():
    graph, c = triangle_graph()
    with pytest.raises(r.UnconstrainedRegion) as exc:
        r.boundary_distances(graph, r.decompose_regions(graph))
    assert exc.value.rainbow == c


def test_boundary_distances_errors_per_component():
    # A disconnected all-one-rainbow component is unconstrained even if
    # the same rainbow has a boundary elsewhere.
    space = r.ColorSpace(("1", "2"))
    c12 = r.Rainbow((0, 1))
    c21 = r.Rainbow((1, 0))
    nodes = ("a", "b", "x", "y")
    edges = frozenset((("a", "b"), ("x", "y")))
    pref = {"a": c12, "b": c21, "x": c12, "y": c12}
    graph = r.RainbowGraph(nodes, edges, pref, space)
    with pytest.raises(r.UnconstrainedRegion) as exc:
        r.boundary_distances(graph, r.decompose_regions(graph))
    assert exc.value.rainbow == c12


def test_boundary_distances_against_naive_bfs():
    g = rng(21)
    for _ in range(25):
        graph = random_solvable_graph(g, max_nodes=20)
        regions = r.decompose_regions(graph)
        dist = r.boundary_distances(graph, regions)
        for d in graph.nodes:
            c = graph.preference[d]
            depths = bfs_depths(graph, d)
            expected = min(depths[x] for x in regions.boundary(c) if x in depths)
            assert dist[d] == expected
        # Same-rainbow neighbors differ by at most one step.
        for a, b in graph.edges:
            if graph.preference[a] == graph.preference[b]:
                assert abs(dist[a] - dist[b]) <= 1


def test_build_boundary_graph_path5():
    graph = path5_graph()
    b = graph.preference["n0"]
    red = graph.preference["n3"]
    bg = r.build_boundary_graph(graph)
    assert bg.depths == {b: 2, red: 1}
    expected_nodes = {
        bg.node_id(b, 0), bg.node_id(b, 1), bg.node_id(b, 2),
        bg.node_id(red, 0), bg.node_id(red, 1),
    }
    assert set(bg.graph.nodes) == expected_nodes
    expected_edges = {
        tuple(sorted((bg.node_id(b, 0), bg.node_id(b, 1)))),
        tuple(sorted((bg.node_id(b, 1), bg.node_id(b, 2)))),
        tuple(sorted((bg.node_id(red, 0), bg.node_id(red, 1)))),
        tuple(sorted((bg.node_id(b, 0), bg.node_id(red, 0)))),
    }
    assert set(bg.graph.edges) == expected_edges
    assert bg.morphism.mapping["n0"] == bg.node_id(b, 2)
    assert bg.pairs[bg.node_id(b, 2)] == (b, 2)


def test_build_boundary_graph_depth_matches_chain():
    # Rainbow (blue, red, green) at depth 2 produces a 3-node chain.
    space = r.ColorSpace(("blue", "red", "green"))
    c = r.Rainbow((0, 1, 2))
    other = r.Rainbow((1, 0, 2))
    nodes = ("m0", "m1", "m2", "x")
    edges = frozenset((("m0", "m1"), ("m1", "m2"), ("m2", "x")))
    pref = {"m0": c, "m1": c, "m2": c, "x": other}
    bg = r.build_boundary_graph(r.RainbowGraph(nodes, edges, pref, space))
    assert bg.depths[c] == 2
    assert bg.node_id(c, 2) == "blue,red,green@2"


def test_boundary_morphism_validates_on_random_graphs():
    g = rng(22)
    for _ in range(30):
        graph = random_solvable_graph(g, max_nodes=30)
        bg = r.build_boundary_graph(graph)
        report = r.check_morphism(bg.morphism)
        assert report.is_morphism and report.is_rainbow_preserving


def test_boundary_graph_idempotent():
    g = rng(23)
    for _ in range(20):
        graph = random_solvable_graph(g, max_nodes=30)
        bg = r.build_boundary_graph(graph)
        bg2 = r.build_boundary_graph(bg.graph)
        assert bg2.depths == bg.depths
        assert set(bg2.graph.nodes) == set(bg.graph.nodes)
        assert bg2.graph.edges == bg.graph.edges
        # On a graph already in boundary form the morphism is injective.
        values = list(bg2.morphism.mapping.values())
        assert len(values) == len(set(values))


def test_check_morphism_identity_and_collapse():
    graph = path5_graph()
    ident = r.Morphism(graph, graph, {d: d for d in graph.nodes})
    report = r.check_morphism(ident)
    assert report == r.MorphismReport(True, True, ())

    collapse = r.Morphism(
        graph, graph, {"n0": "n1", "n1": "n1", "n2": "n2", "n3": "n3", "n4": "n4"}
    )
    assert r.check_morphism(collapse).is_morphism


def test_check_morphism_flags_broken_edge():
    graph = path5_graph()
    # n0 and n1 are adjacent but map to the non-adjacent pair (n0, n2).
    broken = r.Morphism(
        graph, graph, {"n0": "n0", "n1": "n2", "n2": "n2", "n3": "n3", "n4": "n4"}
    )
    report = r.check_morphism(broken)
    assert not report.is_morphism
    assert ("edge", "n0", "n1") in report.violations


def test_morphism_requires_total_map():
    graph = path5_graph()
    with pytest.raises(ValueError):
        r.Morphism(graph, graph, {"n0": "n0"})
    with pytest.raises(ValueError):
        r.Morphism(graph, graph, {d: "nope" for d in graph.nodes})


def test_pullback_identity_and_constant():
    graph = path5_graph()
    g = rng(24)
    mech = random_dp_mechanism(g, graph, r.PrivacyBudget(math.log(2.0), 0.0))
    ident = r.Morphism(graph, graph, {d: d for d in graph.nodes})
    pulled = r.pullback(mech, ident)
    assert pulled.assignment == mech.assignment

    constant = r.Morphism(graph, graph, {d: "n2" for d in graph.nodes})
    const_mech = r.pullback(mech, constant)
    assert all(v == mech.assignment["n2"] for v in const_mech.assignment.values())
    for _ in range(5):
        budget = random_budget(g)
        assert r.verify_dp(graph, const_mech, budget).valid


def test_pullback_missing_distribution():
    graph = path5_graph()
    mech = r.Mechanism({"n2": sv(0.3, 0.3, 0.4)}, graph.color_space)
    ident = r.Morphism(graph, graph, {d: d for d in graph.nodes})
    with pytest.raises(KeyError):
        r.pullback(mech, ident)


def test_pullback_of_boundary_lines_matches_optimal_mechanism():
    # Two independent routes to the same mechanism: closed-form per-node
    # construction vs iterated steps on the boundary graph pulled back.
    graph = path5_graph()
    bc = path5_bc()
    budget = r.PrivacyBudget(math.log(2.0), 0.0)
    direct = r.optimal_mechanism(graph, bc, budget)
    line_mech, bg = boundary_line_mechanisms(graph, bc, budget)
    pulled = r.pullback(line_mech, bg.morphism)
    for d in graph.nodes:
        for a, b in zip(direct.assignment[d], pulled.assignment[d]):
            assert abs(a - b) <= 1e-12


def test_pullback_preserves_dp_on_random_morphisms():
    g = rng(25)
    for _ in range(30):
        codomain = random_solvable_graph(g, max_nodes=12)
        budget = random_budget(g)
        mech = random_dp_mechanism(g, codomain, budget)
        assert r.verify_dp(codomain, mech, budget).valid
        morphism = random_blowup_morphism(g, codomain)
        assert r.check_morphism(morphism).is_morphism
        pulled = r.pullback(mech, morphism)
        assert r.verify_dp(morphism.domain, pulled, budget).valid


def test_line_graph_shape():
    space = r.ColorSpace(("1", "2"))
    c = r.Rainbow((0, 1))
    line = r.line_graph(space, c, 3)
    assert line.nodes == ("0", "1", "2", "3")
    assert ("0", "1") in line.edges and len(line.edges) == 3
    with pytest.raises(ValueError):
        r.line_graph(space, c, -1)
