"""Generators for the benchmark and worked-example graphs."""

from app.logger_config import setup_logger
from engine.graph import Graph

logger = setup_logger()

FRIEND_OF = "friendOf"
SOCIAL_PEOPLE = ("Alice", "Bob", "Craig", "Dan", "Eve", "Faythe")
SOCIAL_EDGES = (
    ("Alice", "Bob"),
    ("Alice", "Craig"),
    ("Bob", "Dan"),
    ("Craig", "Eve"),
    ("Dan", "Eve"),
)


def gen_cycle(size: int, label: str = "s") -> Graph:
    """A single directed cycle n0 -> n1 -> ... -> n(size-1) -> n0, every edge labeled `label`.

    Args:
        size (int): Number of nodes (and edges), at least 1; size 1 is a self-loop.
        label (str): The edge label.

    Raises:
        ValueError: If size is smaller than 1.
    """
    if size < 1:
        error_msg = f"A cycle needs at least one node, got {size}"
        logger.error(error_msg)
        raise ValueError(error_msg)
    edges = [(f"n{i}", label, f"n{(i + 1) % size}") for i in range(size)]
    return Graph(edges)


def _cycle_through_center(center: str, prefix: str, length: int, label: str) -> list[tuple[str, str, str]]:
    ring = [center] + [f"{prefix}{i}" for i in range(1, length)]
    return [(ring[i], label, ring[(i + 1) % length]) for i in range(length)]


def gen_double_cycle(u: int, v: int, label1: str = "s1", label2: str = "s2") -> Graph:
    """Two cycles sharing node `c`: `u` edges labeled `label1` through m1..m(u-1) and
    `v` edges labeled `label2` through n1..n(v-1).

    The result has u + v - 1 nodes and u + v edges; when both cycles are longer than one
    edge, `c` is the only node with outgoing edges of both labels.

    Raises:
        ValueError: If u or v is smaller than 1, or both labels coincide.
    """
    if u < 1 or v < 1:
        error_msg = f"Both cycles need at least one edge, got u={u}, v={v}"
        logger.error(error_msg)
        raise ValueError(error_msg)
    if label1 == label2:
        error_msg = f"The two cycles need distinct labels, got {label1!r} twice"
        logger.error(error_msg)
        raise ValueError(error_msg)
    nodes = ["c"] + [f"m{i}" for i in range(1, u)] + [f"n{i}" for i in range(1, v)]
    edges = _cycle_through_center("c", "m", u, label1) + _cycle_through_center("c", "n", v, label2)
    return Graph(edges, nodes)


def gen_social_network() -> Graph:
    """The six-person friendOf network; Faythe has no friends in it."""
    return Graph(((a, FRIEND_OF, b) for a, b in SOCIAL_EDGES), SOCIAL_PEOPLE)
