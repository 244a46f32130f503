import io
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forcembed.graph import (
    Graph,
    GraphFormatError,
    grid_graph,
    neighbors,
    parse_edge_list,
    parse_labels,
    planted_partition,
    random_graph,
    write_edge_list,
    write_node_map,
)


def parse(lines, weighted=True):
    return parse_edge_list(io.StringIO("\n".join(lines) + "\n"), weighted=weighted)


def test_parse_counts():
    g = parse(["a b", "b c"])
    assert g.node_count == 3
    assert g.edge_count == 2
    assert set(g.weights.tolist()) == {1.0}
    assert g.ids == ("a", "b", "c")


def test_parse_rejects_negative_weight():
    with pytest.raises(GraphFormatError, match="line 1.*non-positive"):
        parse(["a b -1"])


def test_parse_rejects_zero_weight_with_line_number():
    with pytest.raises(GraphFormatError, match="line 3"):
        parse(["# header", "a b 1", "b c 0"])


@pytest.mark.parametrize("line", ["a", "a b c d", "a b x"])
def test_parse_malformed(line):
    with pytest.raises(GraphFormatError, match="line 1"):
        parse([line])


def test_parse_empty():
    with pytest.raises(GraphFormatError, match="empty"):
        parse(["# only a comment", ""])


def test_duplicate_edges_merge_by_sum():
    g = parse(["a b 2", "b a 3"])
    assert g.edge_count == 1
    assert neighbors(g, 0) == [(1, 5.0)]
    assert neighbors(g, 1) == [(0, 5.0)]


def test_binarize_after_merge():
    g = parse(["a b 2", "b a 3", "b c 0.5"], weighted=False)
    assert g.weights.tolist() == [1.0, 1.0, 1.0, 1.0]


def test_self_loop_dropped_with_warning(caplog):
    with caplog.at_level(logging.WARNING):
        g = parse(["a a", "a b"])
    assert g.edge_count == 1
    assert "self-loop" in caplog.text


def test_comments_and_first_appearance_order():
    g = parse(["# c", "x y", "  # indented comment", "z x 2.5"])
    assert g.ids == ("x", "y", "z")
    assert neighbors(g, 0) == [(1, 1.0), (2, 2.5)]


def test_neighbors_readback():
    g = parse(["a b 2", "b c 1"])
    assert neighbors(g, g.index["b"]) == [(0, 2.0), (2, 1.0)]


def test_neighbors_out_of_range():
    g = grid_graph(2, 2)
    with pytest.raises(IndexError):
        neighbors(g, 4)
    with pytest.raises(IndexError):
        neighbors(g, -1)


def test_grid_degrees():
    assert len(neighbors(grid_graph(2, 2), 0)) == 2
    assert len(neighbors(grid_graph(3, 3), 4)) == 4


@pytest.mark.parametrize("rows,cols,nodes,edges", [(2, 2, 4, 4), (15, 15, 225, 420), (1, 5, 5, 4)])
def test_grid_sizes(rows, cols, nodes, edges):
    g = grid_graph(rows, cols)
    assert (g.node_count, g.edge_count) == (nodes, edges)


def test_grid_rejects_zero():
    with pytest.raises(ValueError):
        grid_graph(0, 3)


@given(st.integers(1, 12), st.integers(1, 12))
def test_grid_invariants(r, c):
    g = grid_graph(r, c)
    assert g.node_count == r * c
    assert g.edge_count == r * (c - 1) + c * (r - 1)
    if r >= 2 and c >= 2:
        assert {g.degree(k) for k in range(g.node_count)} <= {2, 3, 4}


def test_labels():
    g = parse(["a b", "b c"])
    labels = parse_labels(io.StringIO("a x\nb x\nc y\n"), g)
    assert len(labels) == 3
    assert labels.class_count == 2
    assert labels.labels == {0: "x", 1: "x", 2: "y"}


def test_labels_unknown_node():
    g = parse(["a b", "b c"])
    with pytest.raises(GraphFormatError, match="'z'"):
        parse_labels(io.StringIO("z x\n"), g)


def test_labels_conflict():
    g = parse(["a b", "b c"])
    with pytest.raises(GraphFormatError, match="conflicting"):
        parse_labels(io.StringIO("a x\na y\n"), g)


def test_labels_repeat_same_is_fine():
    g = parse(["a b"])
    assert parse_labels(io.StringIO("a x\na x\n"), g).labels == {0: "x"}


def test_node_map():
    g = parse(["a b", "b c"])
    buf = io.StringIO()
    write_node_map(g, buf)
    assert buf.getvalue() == "0 a\n1 b\n2 c\n"


def test_graph_is_read_only():
    g = grid_graph(2, 2)
    with pytest.raises(ValueError):
        g.weights[0] = 3.0


def _roundtrip(g):
    buf = io.StringIO()
    write_edge_list(g, buf)
    buf.seek(0)
    return parse_edge_list(buf)


def test_roundtrip_examples():
    for g in [grid_graph(4, 5), parse(["a b", "c d", "a d 2.5"]), parse(["q q", "r s 0.1"])]:
        assert _roundtrip(g) == g


edge_lists = st.lists(
    st.tuples(st.integers(0, 9), st.integers(0, 9),
              st.floats(0.01, 100, allow_nan=False, allow_infinity=False)),
    min_size=1, max_size=40)


@settings(max_examples=60)
@given(edge_lists)
def test_parsed_graph_symmetric_and_roundtrips(edges):
    text = "".join(f"n{i} n{j} {w!r}\n" for i, j, w in edges)
    g = parse_edge_list(io.StringIO(text))
    adj = {(i, j): w for i in range(g.node_count) for j, w in neighbors(g, i)}
    for (i, j), w in adj.items():
        assert adj[(j, i)] == w
        assert w > 0
        assert i != j
    for k in range(g.node_count):
        nb = [j for j, _ in neighbors(g, k)]
        assert nb == sorted(nb)
    assert _roundtrip(g) == g


def test_random_graph_size():
    g = random_graph(100, 250, seed=3)
    assert (g.node_count, g.edge_count) == (100, 250)
    assert g == random_graph(100, 250, seed=3)


def test_planted_partition_labels_cover_nodes():
    g, labels = planted_partition([5, 7], 0.9, 0.05, seed=0)
    assert g.node_count == 12
    assert labels.class_count == 2
    assert labels.nodes == list(range(12))


def test_from_edges_rejects_bad_weight():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 1, 0.0)])
