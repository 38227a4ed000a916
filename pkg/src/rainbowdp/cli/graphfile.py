"""Line-oriented text format for rainbow graphs.

    colors <c1> <c2> ... <cq>            # canonical color order, first
    node <id> <r1> <r2> ... <rq>         # rainbow, most preferred first
    edge <idA> <idB>                     # undirected, idA != idB
    boundary <r1>,<r2>,...,<rq> <p1> ... <pq>
        # rainbow comma-separated in preference order;
        # probabilities in canonical color order

`#` starts a comment; tokens are whitespace-separated. The parser
round-trips with emit_graph_file.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import ColorSpace, Rainbow, SimplexVector
from ..graph import RainbowGraph
from ..mechanism import BoundaryCondition


class GraphFileError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True, eq=False)
class GraphFile:
    graph: RainbowGraph
    boundary: BoundaryCondition | None


def _tokenize(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = body.split()
        if tokens:
            out.append((lineno, tokens))
    return out


def _check_identifier(lineno: int, kind: str, ident: str) -> str:
    if "," in ident:
        raise GraphFileError(lineno, f"{kind} identifier {ident!r} may not contain a comma")
    return ident


def _parse_probability(lineno: int, token: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise GraphFileError(lineno, f"malformed probability {token!r}") from None
    if not value == value or value in (float("inf"), float("-inf")):
        raise GraphFileError(lineno, f"malformed probability {token!r}")
    return value


def _rainbow_from_names(
    lineno: int, names: list[str], space: ColorSpace
) -> Rainbow:
    for name in names:
        if name not in space.colors:
            raise GraphFileError(lineno, f"unknown color {name!r}")
    if len(names) != space.q or len(set(names)) != len(names):
        raise GraphFileError(lineno, f"rainbow {' '.join(names)!r} is not a permutation of the colors")
    return Rainbow(tuple(space.index_of(n) for n in names))


def parse_graph_file(text: str) -> GraphFile:
    """Parse and validate a graph file; diagnostics carry line numbers."""
    lines = _tokenize(text)
    if not lines:
        raise GraphFileError(0, "empty graph file")

    lineno, tokens = lines[0]
    if tokens[0] != "colors":
        raise GraphFileError(lineno, "first directive must be 'colors'")
    if len(tokens) < 3:
        raise GraphFileError(lineno, "need at least 2 colors")
    names = [_check_identifier(lineno, "color", t) for t in tokens[1:]]
    try:
        space = ColorSpace(tuple(names))
    except ValueError as exc:
        raise GraphFileError(lineno, str(exc)) from None

    nodes: list[str] = []
    preference: dict[str, Rainbow] = {}
    # First pass declares nodes so edges may reference them in any order.
    for lineno, tokens in lines[1:]:
        directive = tokens[0]
        if directive == "colors":
            raise GraphFileError(lineno, "'colors' may appear only once")
        if directive == "node":
            if len(tokens) != 2 + space.q:
                raise GraphFileError(lineno, f"node line needs an id and {space.q} colors")
            ident = _check_identifier(lineno, "node", tokens[1])
            if ident in preference:
                raise GraphFileError(lineno, f"duplicate node {ident!r}")
            preference[ident] = _rainbow_from_names(lineno, tokens[2:], space)
            nodes.append(ident)
        elif directive not in ("edge", "boundary"):
            raise GraphFileError(lineno, f"unknown directive {directive!r}")

    edges: set[tuple[str, str]] = set()
    boundary: dict[Rainbow, SimplexVector] = {}
    for lineno, tokens in lines[1:]:
        if tokens[0] == "edge":
            if len(tokens) != 3:
                raise GraphFileError(lineno, "edge line needs exactly two node ids")
            a, b = tokens[1], tokens[2]
            if a == b:
                raise GraphFileError(lineno, f"self-loop on node {a!r}")
            for ident in (a, b):
                if ident not in preference:
                    raise GraphFileError(lineno, f"edge references undeclared node {ident!r}")
            pair = (a, b) if a < b else (b, a)
            if pair in edges:
                raise GraphFileError(lineno, f"duplicate edge {a!r} {b!r}")
            edges.add(pair)
        elif tokens[0] == "boundary":
            if len(tokens) != 2 + space.q:
                raise GraphFileError(lineno, f"boundary line needs a rainbow and {space.q} probabilities")
            rainbow = _rainbow_from_names(lineno, tokens[1].split(","), space)
            if rainbow in boundary:
                raise GraphFileError(lineno, "duplicate boundary line for this rainbow")
            probs = [_parse_probability(lineno, t) for t in tokens[2:]]
            try:
                boundary[rainbow] = SimplexVector(tuple(probs))
            except ValueError as exc:
                raise GraphFileError(lineno, str(exc)) from None

    try:
        graph = RainbowGraph(tuple(nodes), frozenset(edges), preference, space)
    except ValueError as exc:
        raise GraphFileError(0, str(exc)) from None
    bc = BoundaryCondition(boundary) if boundary else None
    return GraphFile(graph, bc)


def emit_graph_file(gf: GraphFile) -> str:
    """Serialize a GraphFile; parse_graph_file(emit_graph_file(gf)) is
    semantically identical to gf."""
    from .tables import fmt

    space = gf.graph.color_space
    out = ["colors " + " ".join(space.colors)]
    for d in gf.graph.nodes:
        names = gf.graph.preference[d].color_names(space)
        out.append("node " + d + " " + " ".join(names))
    for a, b in sorted(gf.graph.edges):
        out.append(f"edge {a} {b}")
    if gf.boundary is not None:
        for c in sorted(gf.boundary.values, key=lambda r: r.order):
            label = ",".join(c.color_names(space))
            probs = " ".join(fmt(x) for x in gf.boundary.values[c])
            out.append(f"boundary {label} {probs}")
    return "\n".join(out) + "\n"
