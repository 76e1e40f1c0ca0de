"""
Network topology: nodes with roles and bidirectional links

Text format, one statement per line, '#' starts a comment:

    node <id> [consumer|producer|router]
    link <a> <b> <bandwidth_bps> <delay_ms>
"""
import logging
import os

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from .consts import (
    LINK_BANDWIDTH,
    LINK_DELAY,
    ROLE_CONSUMER,
    ROLE_PRODUCER,
    ROLE_ROUTER,
    ROLES,
    TOPOLOGY_LINKS,
    TOPOLOGY_NODES,
)
from .errors import ConfigurationError, TopologyParseError, UsageError

LOGGER = logging.getLogger(__name__)

BUILTIN_TOPOLOGIES = ("line", "grid", "tree", "random")


@dataclass(frozen=True)
class NodeSpec:
    """Topology node and its role."""

    node_id: str
    role: str = ROLE_ROUTER


@dataclass(frozen=True)
class LinkSpec:
    """Bidirectional link, bandwidth in bits/s and delay in seconds."""

    a: str
    b: str
    bandwidth: float = LINK_BANDWIDTH
    delay: float = LINK_DELAY


@dataclass
class Topology:
    """Directed graph G = (N, L) with every link materialized as two faces."""

    nodes: List[NodeSpec] = field(default_factory=list)
    links: List[LinkSpec] = field(default_factory=list)

    def __repr__(self) -> str:
        """Return the representation."""
        return f"<Topology nodes={len(self.nodes)} links={len(self.links)}>"

    @property
    def face_count(self) -> int:
        """
        Directed faces over all nodes
        """
        return 2 * len(self.links)

    def node_ids(self) -> List[str]:
        """
        Getter for node ids in declaration order
        """
        return [node.node_id for node in self.nodes]

    def role(self, node_id: str) -> str:
        """
        Getter for the role of a node
        """
        for node in self.nodes:
            if node.node_id == node_id:
                return node.role

        raise UsageError(f"unknown node {node_id!r}")

    def with_role(self, role: str) -> List[str]:
        """
        Node ids carrying role
        """
        return [node.node_id for node in self.nodes if node.role == role]

    def faces(self, node_id: str) -> List[Tuple[int, str, LinkSpec]]:
        """
        (face id, neighbor, link) for node_id, face ids in link order
        """
        result = []
        for link in self.links:
            if link.a == node_id:
                result.append((len(result), link.b, link))
            elif link.b == node_id:
                result.append((len(result), link.a, link))

        return result

    def graph(self) -> nx.Graph:
        """
        Undirected networkx view
        """
        graph = nx.Graph()
        for node in self.nodes:
            graph.add_node(node.node_id, role=node.role)

        for link in self.links:
            graph.add_edge(link.a, link.b, bandwidth=link.bandwidth, delay=link.delay)

        return graph

    def is_connected(self) -> bool:
        """
        True when every node reaches every other
        """
        return bool(self.nodes) and nx.is_connected(self.graph())


def _parse_number(text: str, *, what: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise TopologyParseError(f"{what} {text!r} is not a number", line=line) from None

    if not np.isfinite(value):
        raise TopologyParseError(f"{what} {text!r} is not finite", line=line)

    return value


def load_topology(text: str) -> Topology:
    """
    Parse the topology format, no partial topology on error
    """
    nodes: Dict[str, NodeSpec] = {}
    links: List[LinkSpec] = []
    seen_links = set()

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue

        tokens = line.split()
        statement = tokens[0]

        if statement == "node":
            if len(tokens) not in (2, 3):
                raise TopologyParseError("expected: node <id> [role]", line=line_no)

            node_id = tokens[1]
            role = tokens[2] if len(tokens) == 3 else ROLE_ROUTER

            if role not in ROLES:
                raise TopologyParseError(f"unknown role {role!r}", line=line_no)

            if node_id in nodes:
                raise TopologyParseError(f"node {node_id!r} declared twice", line=line_no)

            nodes[node_id] = NodeSpec(node_id=node_id, role=role)

        elif statement == "link":
            if len(tokens) != 5:
                err_msg = "expected: link <a> <b> <bandwidth_bps> <delay_ms>"
                raise TopologyParseError(err_msg, line=line_no)

            a, b = tokens[1], tokens[2]
            for endpoint in (a, b):
                if endpoint not in nodes:
                    err_msg = f"link endpoint {endpoint!r} is not a declared node"
                    raise TopologyParseError(err_msg, line=line_no)

            if a == b:
                raise TopologyParseError(f"self-loop on {a!r}", line=line_no)

            key = frozenset((a, b))
            if key in seen_links:
                raise TopologyParseError(f"duplicate link {a} - {b}", line=line_no)
            seen_links.add(key)

            bandwidth = _parse_number(tokens[3], what="bandwidth", line=line_no)
            delay_ms = _parse_number(tokens[4], what="delay", line=line_no)

            if bandwidth <= 0:
                raise TopologyParseError("bandwidth must be positive", line=line_no)

            if delay_ms < 0:
                raise TopologyParseError("delay must be non-negative", line=line_no)

            links.append(LinkSpec(a=a, b=b, bandwidth=bandwidth, delay=delay_ms / 1000.0))

        else:
            raise TopologyParseError(f"unknown statement {statement!r}", line=line_no)

    topology = Topology(nodes=list(nodes.values()), links=links)

    LOGGER.debug(f"load_topology parsed {topology}")

    return topology


def dump_topology(topology: Topology) -> str:
    """
    Render a topology in the text format
    """
    lines = [f"# {len(topology.nodes)} nodes, {len(topology.links)} links"]

    for node in topology.nodes:
        lines.append(f"node {node.node_id} {node.role}")

    for link in topology.links:
        lines.append(f"link {link.a} {link.b} {link.bandwidth:.12g} {link.delay * 1000.0:.12g}")

    return "\n".join(lines) + "\n"


def line_topology(
    *, bandwidth: float = LINK_BANDWIDTH, delay: float = LINK_DELAY
) -> Topology:
    """
    consumer c0 -- router r0 -- producer p0
    """
    return Topology(
        nodes=[
            NodeSpec("c0", ROLE_CONSUMER),
            NodeSpec("r0", ROLE_ROUTER),
            NodeSpec("p0", ROLE_PRODUCER),
        ],
        links=[
            LinkSpec("c0", "r0", bandwidth, delay),
            LinkSpec("r0", "p0", bandwidth, delay),
        ],
    )


def grid_topology(
    rows: int = 3,
    cols: int = 3,
    *,
    consumers: int = 2,
    producers: int = 1,
    bandwidth: float = LINK_BANDWIDTH,
    delay: float = LINK_DELAY,
) -> Topology:
    """
    rows x cols mesh, consumers first in row-major order, producers last
    """
    count = rows * cols
    if rows < 1 or cols < 1 or consumers + producers > count:
        raise UsageError(f"cannot place {consumers}+{producers} apps on a {rows}x{cols} grid")

    node_ids = [f"g{row}_{col}" for row in range(rows) for col in range(cols)]
    roles = [ROLE_ROUTER] * count
    for index in range(consumers):
        roles[index] = ROLE_CONSUMER
    for index in range(count - producers, count):
        roles[index] = ROLE_PRODUCER

    links = []
    for row in range(rows):
        for col in range(cols):
            if col + 1 < cols:
                links.append(LinkSpec(f"g{row}_{col}", f"g{row}_{col + 1}", bandwidth, delay))
            if row + 1 < rows:
                links.append(LinkSpec(f"g{row}_{col}", f"g{row + 1}_{col}", bandwidth, delay))

    return Topology(
        nodes=[NodeSpec(node_id, role) for node_id, role in zip(node_ids, roles)],
        links=links,
    )


def tree_topology(
    depth: int = 2,
    *,
    bandwidth: float = LINK_BANDWIDTH,
    delay: float = LINK_DELAY,
) -> Topology:
    """
    Binary tree, producer at the root and consumers on the leaves
    """
    if depth < 1:
        raise UsageError(f"tree depth must be >= 1, got {depth}")

    graph = nx.balanced_tree(2, depth)
    leaves = {node for node in graph if graph.degree(node) == 1 and node != 0}

    nodes = []
    for node in sorted(graph):
        if node == 0:
            role = ROLE_PRODUCER
        elif node in leaves:
            role = ROLE_CONSUMER
        else:
            role = ROLE_ROUTER
        nodes.append(NodeSpec(f"t{node}", role))

    links = [
        LinkSpec(f"t{a}", f"t{b}", bandwidth, delay) for a, b in sorted(graph.edges())
    ]

    return Topology(nodes=nodes, links=links)


def generate_topology(
    nodes: int = TOPOLOGY_NODES,
    links: int = TOPOLOGY_LINKS,
    *,
    seed: int = 0,
    consumers: int = 2,
    producers: int = 1,
    bandwidth: float = LINK_BANDWIDTH,
    delay: float = LINK_DELAY,
) -> Topology:
    """
    Random connected graph with exactly nodes nodes and links links.

    A random spanning tree (Pruefer sequence) guarantees connectivity, the
    remaining links are drawn uniformly from the unused node pairs.
    """
    max_links = nodes * (nodes - 1) // 2
    if nodes < 2 or not nodes - 1 <= links <= max_links:
        raise UsageError(f"cannot build a connected graph with {nodes} nodes and {links} links")

    if consumers + producers > nodes:
        raise UsageError(f"cannot place {consumers}+{producers} apps on {nodes} nodes")

    rng = np.random.default_rng(seed)

    if nodes == 2:
        graph = nx.path_graph(2)
    else:
        prufer = [int(value) for value in rng.integers(0, nodes, size=nodes - 2)]
        graph = nx.from_prufer_sequence(prufer)

    unused = [
        (a, b) for a in range(nodes) for b in range(a + 1, nodes) if not graph.has_edge(a, b)
    ]
    extra = links - graph.number_of_edges()
    for index in sorted(rng.choice(len(unused), size=extra, replace=False)):
        graph.add_edge(*unused[int(index)])

    roles = [ROLE_ROUTER] * nodes
    placed = rng.permutation(nodes)
    for index in placed[:consumers]:
        roles[int(index)] = ROLE_CONSUMER
    for index in placed[consumers : consumers + producers]:
        roles[int(index)] = ROLE_PRODUCER

    topology = Topology(
        nodes=[NodeSpec(f"n{index}", roles[index]) for index in range(nodes)],
        links=[
            LinkSpec(f"n{a}", f"n{b}", bandwidth, delay)
            for a, b in sorted(tuple(sorted(edge)) for edge in graph.edges())
        ],
    )

    dbg_msg = f"generate_topology seed: {seed} {topology} "
    dbg_msg += f"consumers: {topology.with_role(ROLE_CONSUMER)} "
    dbg_msg += f"producers: {topology.with_role(ROLE_PRODUCER)}"
    LOGGER.debug(dbg_msg)

    return topology


def _builtin_args(spec: str) -> Tuple[str, List[int]]:
    name, _, rest = spec.partition(":")
    if name not in BUILTIN_TOPOLOGIES:
        return name, []

    args = []
    for token in rest.replace("x", ":").split(":") if rest else []:
        try:
            args.append(int(token))
        except ValueError:
            raise ConfigurationError(f"bad builtin topology argument in {spec!r}") from None

    return name, args


def resolve_topology(
    spec: str,
    *,
    base_dir: Optional[str] = None,
    seed: int = 0,
    bandwidth: float = LINK_BANDWIDTH,
    delay: float = LINK_DELAY,
) -> Topology:
    """
    Topology file path, else builtin name (line, grid[:RxC], tree[:D], random[:N:L])
    """
    path = spec
    if base_dir and not os.path.isabs(path):
        path = os.path.join(base_dir, path)

    if os.path.isfile(path):
        with open(path, "r", encoding="utf-8") as stream:
            return load_topology(stream.read())

    name, args = _builtin_args(spec)

    if name not in BUILTIN_TOPOLOGIES:
        raise ConfigurationError(f"topology file {path!r} not found")

    try:
        if name == "line":
            return line_topology(bandwidth=bandwidth, delay=delay)
        if name == "grid":
            rows, cols = (args + [3, 3])[:2] if args else (3, 3)
            return grid_topology(rows, cols, bandwidth=bandwidth, delay=delay)
        if name == "tree":
            depth = args[0] if args else 2
            return tree_topology(depth, bandwidth=bandwidth, delay=delay)
        count, link_count = (args + [TOPOLOGY_NODES, TOPOLOGY_LINKS][len(args):])[:2]
        return generate_topology(count, link_count, seed=seed, bandwidth=bandwidth, delay=delay)
    except UsageError as err:
        raise ConfigurationError(f"builtin topology {spec!r}: {err}") from err
