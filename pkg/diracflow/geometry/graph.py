import os
from typing import FrozenSet, Iterable, Optional, Tuple

import networkx as nx

from diracflow.common.errors import ParseError, ValidationError

Edge = Tuple[int, int]


class Graph:
    """
    Finite simple graph on nonnegative integer labels

    :param vertices: Vertex labels
    :param edges: Unordered label pairs, stored with the smaller label first
    :type vertices: iterable of int
    :type edges: iterable of pairs
    """

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable[Edge] = ()):
        vertex_set = set()
        for v in vertices:
            vertex_set.add(_label(v))
        edge_set = set()
        for edge in edges:
            u, v = (_label(x) for x in edge)
            if u == v:
                raise ValidationError("self-loop at vertex {}".format(u))
            if u not in vertex_set or v not in vertex_set:
                raise ValidationError(
                    "edge ({}, {}) uses an undeclared vertex".format(u, v)
                )
            edge_set.add((min(u, v), max(u, v)))
        self._vertices = frozenset(vertex_set)
        self._edges = frozenset(edge_set)

    @property
    def vertices(self) -> FrozenSet[int]:
        return self._vertices

    @property
    def edges(self) -> FrozenSet[Edge]:
        return self._edges

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges))

    def __repr__(self) -> str:
        return "Graph(|V|={}, |E|={})".format(len(self.vertices), len(self.edges))

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(sorted(self.vertices))
        graph.add_edges_from(sorted(self.edges))
        return graph

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "Graph":
        return cls(graph.nodes(), graph.edges())


def _label(value) -> int:
    label = int(value)
    if label < 0:
        raise ValidationError("vertex labels must be nonnegative, got {}".format(label))
    return label


def parse_graph(text: str) -> Graph:
    """
    Parse an edge-list document

    Lines are "v <id>" or "e <id> <id>"; everything after '#' is ignored.
    Vertices referenced only by edges are declared implicitly.

    :param text: Document contents
    :type text: str
    :returns: The declared graph
    :rtype: Graph
    """
    vertices, edges = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind, args = tokens[0], tokens[1:]
        try:
            ids = [int(a) for a in args]
        except ValueError:
            raise ParseError("non-integer vertex id in {!r}".format(raw.strip()), lineno)
        if any(i < 0 for i in ids):
            raise ParseError("negative vertex id in {!r}".format(raw.strip()), lineno)
        if kind == "v" and len(ids) == 1:
            vertices.append(ids[0])
        elif kind == "e" and len(ids) == 2:
            if ids[0] == ids[1]:
                raise ValidationError("line {}: self-loop at vertex {}".format(lineno, ids[0]))
            vertices.extend(ids)
            edges.append((ids[0], ids[1]))
        else:
            raise ParseError("expected 'v <id>' or 'e <id> <id>', got {!r}".format(raw.strip()), lineno)
    return Graph(vertices, edges)


def read_graph(path: str) -> Graph:
    with open(path, "rb") as file:
        raw = file.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as err:
        raise ParseError("{} is not valid UTF-8: {}".format(path, err.reason), raw.count(b"\n", 0, err.start) + 1)
    return parse_graph(text)


def complete_graph(n: int) -> Graph:
    return Graph.from_networkx(nx.complete_graph(range(1, n + 1)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_networkx(nx.cycle_graph(range(1, n + 1)))


def path_graph(n: int) -> Graph:
    return Graph.from_networkx(nx.path_graph(range(1, n + 1)))


def star_graph(leaves: int) -> Graph:
    """Star with a hub labelled 0 and `leaves` leaves"""
    return Graph.from_networkx(nx.star_graph(leaves))


def empty_graph(n: int) -> Graph:
    return Graph(range(1, n + 1))


def random_graph(n: int, p: float, seed: int = 0) -> Graph:
    """Erdos-Renyi G(n, p) on labels 0..n-1, deterministic given seed"""
    return Graph.from_networkx(nx.gnp_random_graph(n, p, seed=seed))


def disjoint_union(g: Graph, h: Graph) -> Graph:
    """
    Disjoint union; the labels of h are shifted above the largest label of g
    """
    shift = max(g.vertices) + 1 if g.vertices else 0
    vertices = list(g.vertices) + [v + shift for v in h.vertices]
    edges = list(g.edges) + [(u + shift, v + shift) for u, v in h.edges]
    return Graph(vertices, edges)


graph_registry = {
    "complete": complete_graph,
    "cycle": cycle_graph,
    "path": path_graph,
    "star": star_graph,
    "empty": empty_graph,
    "random": random_graph,
}


def get_graph_builder_from_name(name: str):
    """
    Gets the graph builder given its name

    :param name: One of complete, cycle, path, star, empty, random
    :type name: string
    :returns: Builder function
    """
    if name not in graph_registry:
        raise NotImplementedError
    return graph_registry[name]


def graph_from_spec(spec: str, seed: Optional[int] = 0) -> Graph:
    """
    Resolve a file path or a builtin spec such as "cycle:4" or "random:8:0.5"

    :param spec: Path or builtin spec
    :param seed: Seed used by "random"
    :type spec: str
    :type seed: int
    :returns: Graph
    :rtype: Graph
    """
    if os.path.exists(spec):
        return read_graph(spec)
    name, _, rest = spec.partition(":")
    if name not in graph_registry or not rest:
        raise ValidationError("no graph file or builtin graph named {!r}".format(spec))
    args = rest.split(":")
    try:
        if name == "random":
            if len(args) != 2:
                raise ValueError("random needs n and p")
            return random_graph(int(args[0]), float(args[1]), seed=seed)
        if len(args) != 1:
            raise ValueError("{} takes one size argument".format(name))
        return get_graph_builder_from_name(name)(int(args[0]))
    except ValueError as err:
        raise ValidationError("bad graph spec {!r}: {}".format(spec, err))
