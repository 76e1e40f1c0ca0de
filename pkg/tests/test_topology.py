"""Tests for topology parsing and generation"""
import networkx as nx
import pytest

from drrmdpf.consts import ROLE_CONSUMER, ROLE_PRODUCER, ROLE_ROUTER
from drrmdpf.errors import ConfigurationError, TopologyParseError, UsageError
from drrmdpf.topology import (
    dump_topology,
    generate_topology,
    grid_topology,
    line_topology,
    load_topology,
    resolve_topology,
    tree_topology,
)

TWO_NODES = """
# minimal graph
node a consumer
node b producer
link a b 10000000 10
"""


def test_two_nodes_one_link():
    topology = load_topology(TWO_NODES)

    assert topology.node_ids() == ["a", "b"]
    assert topology.face_count == 2
    assert topology.links[0].bandwidth == 10e6
    assert topology.links[0].delay == pytest.approx(0.010)
    assert [face_id for face_id, _, _ in topology.faces("a")] == [0]
    assert topology.faces("b")[0][1] == "a"


def test_role_defaults_to_router():
    topology = load_topology("node x\nnode y consumer\nlink x y 1e6 1\n")

    assert topology.role("x") == ROLE_ROUTER
    assert topology.role("y") == ROLE_CONSUMER


@pytest.mark.parametrize(
    "text, line",
    [
        ("node a\nlink a b 10 1\n", 2),
        ("node a\nnode b\nlink a b 10 1\nlink b a 10 1\n", 4),
        ("node a\nlink a a 10 1\n", 2),
        ("node a\nnode a\n", 2),
        ("node a\nnode b\nlink a b fast 1\n", 3),
        ("node a\nnode b\nlink a b 0 1\n", 3),
        ("node a sink\n", 1),
        ("edge a b\n", 1),
    ],
)
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(TopologyParseError) as excinfo:
        load_topology(text)

    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"line {line}:")


def test_dump_and_reload():
    topology = grid_topology(3, 3)

    reloaded = load_topology(dump_topology(topology))

    assert reloaded.nodes == topology.nodes
    assert [(link.a, link.b, link.bandwidth) for link in reloaded.links] == [
        (link.a, link.b, link.bandwidth) for link in topology.links
    ]
    for old, new in zip(topology.links, reloaded.links):
        assert new.delay == pytest.approx(old.delay)


def test_generated_topology_has_requested_counts():
    topology = generate_topology(40, 122, seed=7)

    assert len(topology.nodes) == 40
    assert len(topology.links) == 122
    assert topology.face_count == 244
    assert topology.is_connected()
    assert len(topology.with_role(ROLE_CONSUMER)) == 2
    assert len(topology.with_role(ROLE_PRODUCER)) == 1


def test_generated_topology_is_seeded():
    assert dump_topology(generate_topology(10, 15, seed=3)) == dump_topology(
        generate_topology(10, 15, seed=3)
    )


def test_generate_rejects_impossible_counts():
    with pytest.raises(UsageError):
        generate_topology(5, 3)

    with pytest.raises(UsageError):
        generate_topology(5, 11)


def test_fixed_topologies():
    line = line_topology()
    assert line.with_role(ROLE_CONSUMER) == ["c0"]
    assert line.with_role(ROLE_PRODUCER) == ["p0"]

    grid = grid_topology(3, 3)
    assert len(grid.nodes) == 9 and len(grid.links) == 12
    assert len(grid.with_role(ROLE_CONSUMER)) == 2
    assert len(grid.with_role(ROLE_PRODUCER)) == 1

    tree = tree_topology(2)
    assert len(tree.nodes) == 7
    assert len(tree.with_role(ROLE_CONSUMER)) == 4
    assert nx.is_tree(tree.graph())


def test_resolve_topology(tmp_path):
    assert len(resolve_topology("grid:4x4").nodes) == 16
    assert len(resolve_topology("random:12:20", seed=1).links) == 20

    path = tmp_path / "two.topo"
    path.write_text(TWO_NODES)

    assert resolve_topology("two.topo", base_dir=str(tmp_path)).face_count == 2

    with pytest.raises(ConfigurationError):
        resolve_topology("missing.topo", base_dir=str(tmp_path))


def test_topology_files_win_over_builtin_names(tmp_path):
    (tmp_path / "line").write_text(TWO_NODES)
    (tmp_path / "net:v2.topo").write_text(TWO_NODES)

    assert resolve_topology("line", base_dir=str(tmp_path)).node_ids() == ["a", "b"]
    assert resolve_topology("net:v2.topo", base_dir=str(tmp_path)).face_count == 2

    with pytest.raises(ConfigurationError):
        resolve_topology("net:v3.topo", base_dir=str(tmp_path))

    with pytest.raises(ConfigurationError):
        resolve_topology("grid:3xfour")
