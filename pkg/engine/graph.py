"""
Edge-labeled directed graphs, paths over them and the TSV edge-list format.

Graph file, one entry per line:

    # comment
    Alice	friendOf	Bob
    node	Faythe

Three tab-separated fields declare an edge, `node <tab> id` declares a (possibly isolated)
node. Node ids are opaque tokens; internally they are interned to dense integers in order
of first appearance, which is also the node order used for every sorted output.
"""

from collections import defaultdict
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import NamedTuple

from app.logger_config import setup_logger
from engine.errors import GraphFormatError, UnknownNodeError

logger = setup_logger()

NODE_DECLARATION = "node"


class Edge(NamedTuple):
    source: str
    label: str
    target: str


@dataclass(frozen=True)
class Path:
    """An alternating node/label sequence `n1 l1 n2 ... l(i-1) ni`.

    Attributes:
        nodes (tuple[str, ...]): The visited nodes, at least one.
        labels (tuple[str, ...]): The edge labels, one fewer than nodes.
    """

    nodes: tuple[str, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.nodes or len(self.nodes) != len(self.labels) + 1:
            raise ValueError("A path needs exactly one more node than labels")

    @property
    def source(self) -> str:
        return self.nodes[0]

    @property
    def target(self) -> str:
        return self.nodes[-1]

    def __len__(self) -> int:
        """Number of edges."""
        return len(self.labels)

    def trace(self) -> tuple[str, ...]:
        """The labels read along the path."""
        return self.labels

    def edges(self) -> Iterator[Edge]:
        for i, label in enumerate(self.labels):
            yield Edge(self.nodes[i], label, self.nodes[i + 1])

    def __str__(self) -> str:
        parts = [self.nodes[0]]
        for label, node in zip(self.labels, self.nodes[1:]):
            parts.append(f"-[{label}]->")
            parts.append(node)
        return " ".join(parts)

    @classmethod
    def from_edges(cls, source: str, edges: Iterable[tuple[str, str, str]]) -> "Path":
        nodes = [source]
        labels = []
        for _, label, target in edges:
            labels.append(label)
            nodes.append(target)
        return cls(tuple(nodes), tuple(labels))

    @classmethod
    def parse(cls, line: str) -> "Path":
        """Reads a path back from its `n1 -[l1]-> n2` rendering."""
        tokens = line.split()
        if not tokens or len(tokens) % 2 == 0:
            raise ValueError(f"Malformed path line: {line!r}")
        nodes = tokens[0::2]
        labels = []
        for arrow in tokens[1::2]:
            if not (arrow.startswith("-[") and arrow.endswith("]->")) or len(arrow) <= 5:
                raise ValueError(f"Malformed path step {arrow!r}")
            labels.append(arrow[2:-3])
        return cls(tuple(nodes), tuple(labels))


class Graph:
    """An immutable edge-labeled directed graph.

    Attributes:
        nodes (tuple[str, ...]): Node ids; position = dense index.
        alphabet (tuple[str, ...]): Edge labels in order of first appearance.
        edges (tuple[Edge, ...]): Deduplicated edges in order of first appearance.
    """

    def __init__(self, edges: Iterable[tuple[str, str, str]] = (), nodes: Iterable[str] = ()) -> None:
        node_order: dict[str, None] = dict.fromkeys(nodes)
        unique: dict[Edge, None] = {}
        labels: dict[str, None] = {}
        for source, label, target in edges:
            node_order.setdefault(source)
            node_order.setdefault(target)
            labels.setdefault(label)
            unique.setdefault(Edge(source, label, target))

        clash = set(node_order).intersection(labels)
        if clash:
            error_msg = f"Ids used both as node and as label: {', '.join(sorted(clash))}"
            logger.error(error_msg)
            raise GraphFormatError(error_msg)

        self.nodes: tuple[str, ...] = tuple(node_order)
        self.alphabet: tuple[str, ...] = tuple(labels)
        self.edges: tuple[Edge, ...] = tuple(unique)
        self._index: dict[str, int] = {node: i for i, node in enumerate(self.nodes)}

        by_label: dict[str, list[tuple[int, int]]] = defaultdict(list)
        out_index: dict[tuple[int, str], list[int]] = defaultdict(list)
        in_index: dict[tuple[int, str], list[int]] = defaultdict(list)
        for source, label, target in self.edges:
            m, n = self._index[source], self._index[target]
            by_label[label].append((m, n))
            out_index[(m, label)].append(n)
            in_index[(n, label)].append(m)
        self._by_label = {k: tuple(v) for k, v in by_label.items()}
        self._out = {k: tuple(v) for k, v in out_index.items()}
        self._in = {k: tuple(v) for k, v in in_index.items()}
        self._edge_set = frozenset(self.edges)

        out_edges: dict[str, list[Edge]] = defaultdict(list)
        degree: dict[str, int] = defaultdict(int)
        for edge in self.edges:
            out_edges[edge.source].append(edge)
            degree[edge.source] += 1
            if edge.target != edge.source:
                degree[edge.target] += 1
        self._out_edges = {k: tuple(v) for k, v in out_edges.items()}
        self._degree = dict(degree)

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node: object) -> bool:
        return node in self._index

    def __repr__(self) -> str:
        return f"Graph({len(self.nodes)} nodes, {len(self.edges)} edges, {len(self.alphabet)} labels)"

    def index_of(self, node: str) -> int:
        """Returns the dense index of a node.

        Raises:
            UnknownNodeError: If the node is not part of the graph.
        """
        try:
            return self._index[node]
        except KeyError:
            error_msg = f"Unknown node: {node}"
            logger.error(error_msg)
            raise UnknownNodeError(error_msg) from None

    def has_edge(self, source: str, label: str, target: str) -> bool:
        return Edge(source, label, target) in self._edge_set

    def indexed_edges(self, label: str) -> tuple[tuple[int, int], ...]:
        """(source, target) index pairs of every edge carrying `label`."""
        return self._by_label.get(label, ())

    def successors(self, node: str, label: str) -> tuple[str, ...]:
        """delta(m, label): targets of `label`-edges leaving `node`."""
        m = self.index_of(node)
        return tuple(self.nodes[n] for n in self._out.get((m, label), ()))

    def out_edges(self, node: str) -> tuple[Edge, ...]:
        return self._out_edges.get(node, ())

    def reach(self, node: str, word: Sequence[str]) -> frozenset[str]:
        """delta*(m, w): nodes reachable from `node` by reading `word`."""
        current = {self.index_of(node)}
        for label in word:
            current = {n for m in current for n in self._out.get((m, label), ())}
        return frozenset(self.nodes[n] for n in current)

    def degree(self, node: str) -> int:
        return self._degree.get(node, 0)


def load_graph(text: str) -> Graph:
    """Parses a TSV graph document.

    Args:
        text (str): The UTF-8 document.

    Returns:
        Graph: Nodes are every endpoint plus every `node` declaration, in the order they
        first appear in the file; duplicate edge lines collapse into one edge.

    Raises:
        GraphFormatError: On a line that is neither an edge nor a node declaration.
    """
    edges: list[tuple[str, str, str]] = []
    nodes: dict[str, None] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [field.strip() for field in line.rstrip("\r\n").split("\t")]
        if len(fields) == 2 and fields[0] == NODE_DECLARATION and fields[1]:
            nodes.setdefault(fields[1])
        elif len(fields) == 3 and all(fields):
            edges.append((fields[0], fields[1], fields[2]))
            nodes.setdefault(fields[0])
            nodes.setdefault(fields[2])
        else:
            error_msg = f"expected 'source<TAB>label<TAB>target' or 'node<TAB>id', got {len(fields)} field(s)"
            logger.error("Graph line %d: %s", line_no, error_msg)
            raise GraphFormatError(error_msg, line_no)
    graph = Graph(edges, nodes)
    logger.debug("Loaded %r", graph)
    return graph


def serialize_graph(graph: Graph) -> str:
    """Renders a graph in the TSV format.

    When the graph has isolated nodes every node is declared up front, so reading the text
    back yields the same node order.
    """
    connected = {node for edge in graph.edges for node in (edge.source, edge.target)}
    declared = graph.nodes if connected != set(graph.nodes) else ()
    lines = [f"{NODE_DECLARATION}\t{node}\n" for node in declared]
    lines.extend(f"{edge.source}\t{edge.label}\t{edge.target}\n" for edge in graph.edges)
    return "".join(lines)


def validate_path(graph: Graph, path: Path) -> bool:
    """True iff every step of `path` is an edge of `graph`; a zero-edge path is trivially valid."""
    return all(graph.has_edge(*edge) for edge in path.edges())
