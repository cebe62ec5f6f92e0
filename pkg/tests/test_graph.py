import gzip
import io
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cliquemr.graph import (EdgeListParseError, OrderKey, from_edges, high_degree_bound,
                            load_graph, normalize, parse_edge_list, precedes, read_edge_list)

import oracles


def test_parse_keeps_direction_and_order():
    e = parse_edge_list("# comment\n1\t2\n2\t1\n")
    assert e.tolist() == [[1, 2], [2, 1]]


def test_parse_empty_and_comment_only():
    assert parse_edge_list("").shape == (0, 2)
    assert parse_edge_list("# a\n#b\n\n").shape == (0, 2)


def test_parse_keeps_self_loop():
    assert parse_edge_list("3 3\n").tolist() == [[3, 3]]


def test_parse_whitespace_runs_and_no_trailing_newline():
    assert parse_edge_list("  5 \t\t 6\n7    8").tolist() == [[5, 6], [7, 8]]


def test_parse_full_uint64_range():
    big = (1 << 64) - 1
    assert int(parse_edge_list(f"{big} 0\n")[0, 0]) == big


@pytest.mark.parametrize("text,lineno", [
    ("1 2\n3\n", 2),
    ("# c\n1 2\n3 x\n", 3),
    ("1 2 3\n", 1),
    ("1 -2\n", 1),
    ("1 2\n4 5\n1 1e3\n", 3),
])
def test_parse_errors_carry_line_number(text, lineno):
    with pytest.raises(EdgeListParseError) as info:
        parse_edge_list(text)
    assert info.value.lineno == lineno


def test_read_plain_and_gzip(tmp_path):
    body = b"# snap\n1 2\n2 3\n"
    plain = tmp_path / "g.txt"
    plain.write_bytes(body)
    packed = tmp_path / "g.bin"  # no .gz suffix: detection is by content
    packed.write_bytes(gzip.compress(body))
    assert read_edge_list(plain).tolist() == read_edge_list(packed).tolist() == [[1, 2], [2, 3]]
    g = load_graph(packed)
    assert (g.n, g.m) == (3, 2)


def test_normalize_drops_loops_and_duplicates():
    g = normalize(parse_edge_list("1 2\n2 1\n3 3\n"))
    assert (g.n, g.m) == (2, 1)
    assert g.report.self_loops == 1
    assert g.report.duplicates == 1
    assert g.report.input_edges == 3


def test_normalize_k4():
    g = from_edges(oracles.complete(4))
    assert (g.n, g.m) == (4, 6)
    assert g.degree.tolist() == [3, 3, 3, 3]


def test_empty_graph_is_valid():
    g = normalize(np.empty((0, 2), dtype=np.uint64))
    assert (g.n, g.m) == (0, 0)
    assert g.max_high_degree == 0


def test_precedes_examples():
    assert precedes(OrderKey(2, 9), OrderKey(4, 1))
    assert precedes(OrderKey(3, 5), OrderKey(3, 7))
    assert not precedes(OrderKey(3, 7), OrderKey(3, 7))


keys = st.builds(OrderKey, st.integers(0, 5), st.integers(0, 5))


@given(keys, keys, keys)
def test_precedes_is_strict_total_order(a, b, c):
    assert not (precedes(a, b) and precedes(b, a))
    assert precedes(a, b) + precedes(b, a) + (a == b) == 1
    if precedes(a, b) and precedes(b, c):
        assert precedes(a, c)


def test_high_neighborhood_star():
    g = from_edges(oracles.star(5))
    assert g.high_neighborhood(3).members == (0,)
    assert g.high_neighborhood(0).members == ()


def test_high_neighborhood_k4_labels():
    g = from_edges(oracles.complete(4))
    assert g.high_neighborhood(1).members == (2, 3, 4)
    assert g.high_neighborhood(4).members == ()


def test_unknown_node_raises():
    g = from_edges(oracles.complete(3))
    with pytest.raises(KeyError):
        g.high_neighborhood(99)
    assert 99 not in g and 1 in g


def test_labels_kept_verbatim_for_order_ties():
    # equal degrees: ties break on the original large labels
    g = from_edges([(10**15, 7), (7, 3), (3, 10**15)])
    assert g.high_neighborhood(3).members == (7, 10**15)


def test_neighbors_sorted_by_order_key():
    g = from_edges([(1, 2), (1, 3), (1, 4), (2, 3), (5, 1)])
    nbrs = g.neighbors(1)
    keys = [OrderKey(d, v) for v, d in nbrs]
    assert keys == sorted(keys)
    assert {v for v, _ in nbrs} == {2, 3, 4, 5}


def test_induced_high_subgraph_edges_inside_members():
    g = from_edges(oracles.complete(5))
    sub = g.induced_high_subgraph(1)
    members = set(g.high_neighborhood(1).members)
    assert len(sub.edges) == 6
    assert all(e.u in members and e.v in members for e in sub.edges)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), max_size=120))
def test_graph_invariants_against_oracle(pairs):
    g = from_edges(pairs)
    adj = oracles.adjacency(pairs)
    assert g.n == len(adj)
    assert g.m == len(oracles.simple_edges(pairs))
    assert g.degree_sum_ok()
    assert int(g.high_degree.sum()) == g.m
    assert g.max_high_degree <= high_degree_bound(g.m)
    expected = oracles.high_sets(pairs)
    for v in adj:
        assert set(g.high_neighborhood(v).members) == expected[v]
        assert {w for w, _ in g.neighbors(v)} == adj[v]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 20)), max_size=80))
def test_normalize_is_idempotent(pairs):
    g = from_edges(pairs)
    h = normalize(g.edge_labels())
    assert np.array_equal(g.labels, h.labels)
    assert np.array_equal(g.edges, h.edges)
    assert np.array_equal(g.indices, h.indices)
    assert np.array_equal(g.high_degree, h.high_degree)


def test_high_degree_bound_on_dense_and_skewed_graphs():
    rng = random.Random(4)
    for edges in (oracles.complete(40), oracles.star(500),
                  oracles.random_edges(rng, 200, 0.3)):
        g = from_edges(edges)
        assert g.max_high_degree <= 2 * math.sqrt(g.m)
