import io
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cliquemr.engine import run_pipeline
from cliquemr.exact import (EDGE_MARKER, UINT64_MAX, _checked_total, edge_pairs, fff_count, per_node_csv,
                            records_rounds, round1, round2, round3, round2_pair_bound)
from cliquemr.graph import OrderKey, from_edges

import oracles

BACKENDS = ["blocks", "records"]


def labels_of(keys):
    return [k.label for k in keys]


def test_round1_k4_survivors():
    g = from_edges(oracles.complete(4))
    out, _ = round1(edge_pairs(g), 3)
    assert {u.label: labels_of(m) for u, m in out} == {1: [2, 3, 4], 2: [3, 4]}


@pytest.mark.parametrize("edges", [oracles.star(5), oracles.path(3)])
def test_round1_no_survivors(edges):
    g = from_edges(edges)
    out, _ = round1(edge_pairs(g), 3)
    assert out == []


def test_round2_k4_owner_lists():
    g = from_edges(oracles.complete(4))
    hn, _ = round1(edge_pairs(g), 3)
    out, m = round2(hn, edge_pairs(g))
    owners = {(x.label, y.label): labels_of(us) for (x, y), us in out}
    assert owners[(2, 3)] == [1]
    assert owners[(2, 4)] == [1]
    assert owners[(3, 4)] == [1, 2]
    assert owners[(1, 2)] == [] and len(owners) == 6
    assert m.emitted_pairs == 4 + 6


def test_round2_two_disjoint_triangles():
    edges = [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)]
    g = from_edges(edges)
    hn, _ = round1(edge_pairs(g), 3)
    out, _ = round2(hn, edge_pairs(g))
    nonempty = [us for _, us in out if us]
    assert len(nonempty) == 2 and all(len(us) == 1 for us in nonempty)


def test_round2_triangle_free_gives_zero():
    g = from_edges(oracles.cycle(6))
    hn, _ = round1(edge_pairs(g), 3)
    out, _ = round2(hn, edge_pairs(g))
    assert all(us == [] for _, us in out)
    assert round3(out, 3)[0] == 0


def test_round2_marker_is_not_a_node():
    assert EDGE_MARKER.is_marker and EDGE_MARKER.node is None


def test_round3_k4_k4():
    g = from_edges(oracles.complete(4))
    hn, _ = round1(edge_pairs(g), 4)
    assert [u.label for u, _ in hn] == [1]
    eo, _ = round2(hn, edge_pairs(g))
    q, per, _ = round3(eo, 4, per_node=True)
    assert q == 1
    assert {k.label: v for k, v in per.items()} == {1: 1, 2: 1, 3: 1, 4: 1}


def test_k4_pipeline_output():
    # only nodes 1 and 2 own high-neighborhoods with >= 2 members
    g = from_edges(oracles.complete(4))
    rounds, edges = records_rounds(g, 3)
    out, report = run_pipeline(rounds, edges)
    assert sorted((u.label, v) for u, v in out) == [(1, ("owner", 3)), (2, ("owner", 1))]
    assert [r.name for r in report.rounds] == ["round1", "round2", "round3"]


@pytest.mark.parametrize("backend", BACKENDS)
def test_k4_counts_and_metrics(backend):
    g = from_edges(oracles.complete(4))
    r = fff_count(g, 3, per_node=True, backend=backend)
    assert r.q_k == 4
    assert r.per_node == {1: 3, 2: 3, 3: 3, 4: 3}
    got = [(m.name, m.emitted_pairs, m.distinct_keys, m.max_group_size) for m in r.run_report.rounds]
    assert got == [("round1", 6, 3, 3), ("round2", 10, 6, 3), ("round3", 4, 2, 3)]
    assert fff_count(g, 4, backend=backend).q_k == 1


def test_k_range():
    g = from_edges(oracles.complete(4))
    for k in (2, 17, 3.0):
        with pytest.raises(ValueError):
            fff_count(g, k)
    with pytest.raises(ValueError):
        fff_count(g, 3, workers=0)
    with pytest.raises(ValueError):
        fff_count(g, 3, backend="gpu")


def test_degenerate_inputs_short_circuit():
    empty = from_edges([])
    r = fff_count(empty, 3)
    assert r.q_k == 0 and r.run_report.rounds == []
    small = from_edges(oracles.complete(4))
    r = fff_count(small, 5, per_node=True)
    assert r.q_k == 0 and r.per_node == {} and r.run_report.rounds == []


def test_gnp_12_seeded_k4():
    edges = oracles.random_edges(random.Random(12), 12, 0.5)
    g = from_edges(edges)
    for backend in BACKENDS:
        assert fff_count(g, 4, backend=backend).q_k == oracles.count_cliques(edges, 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.sampled_from([0.2, 0.5, 0.8]), st.integers(0, 2**32),
       st.integers(3, 7), st.sampled_from([1, 3]), st.booleans())
def test_exact_against_oracle(n, p, seed, k, workers, deterministic):
    edges = oracles.random_edges(random.Random(seed), n, p)
    g = from_edges(edges)
    expected = oracles.count_cliques(edges, k)
    for backend in BACKENDS:
        r = fff_count(g, k, workers=workers, per_node=True, deterministic=deterministic,
                      backend=backend)
        assert r.q_k == expected
        assert sum(r.per_node.values()) == k * r.q_k
        per = {}
        for c in oracles.list_cliques(edges, k):
            for v in c:
                per[v] = per.get(v, 0) + 1
        assert r.per_node == per


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 11), st.floats(0.3, 0.95), st.integers(0, 2**32), st.integers(3, 6))
def test_each_clique_listed_once_by_lowest_node(n, p, seed, k):
    edges = oracles.random_edges(random.Random(seed), n, p)
    g = from_edges(edges)
    r = fff_count(g, k, collect_cliques=True)
    sets = [frozenset(c) for c in r.cliques]
    assert len(sets) == len(set(sets)) == r.q_k
    assert set(sets) == oracles.list_cliques(edges, k)
    for c in r.cliques:
        assert c[0] == oracles.lowest(edges, c)


def test_round2_communication_bound():
    rng = random.Random(77)
    for _ in range(40):
        edges = oracles.random_edges(rng, rng.randint(4, 40), rng.random())
        if not edges:
            continue
        g = from_edges(edges)
        m = g.m
        prev = None
        for k in range(3, 8):
            r = fff_count(g, k)
            if not r.run_report.rounds:
                continue
            emitted = r.run_report.round("round2").emitted_pairs
            assert emitted == oracles.round2_emissions(edges, k) == round2_pair_bound(g, k)
            assert emitted <= 2 * m ** 1.5 + m
            if prev is not None:
                assert emitted <= prev
            prev = emitted


def test_records_and_blocks_emit_same_metrics():
    edges = oracles.random_edges(random.Random(8), 25, 0.5)
    g = from_edges(edges)
    a = fff_count(g, 4, backend="blocks").run_report
    b = fff_count(g, 4, backend="records").run_report
    for x, y in zip(a.rounds, b.rounds):
        assert (x.emitted_pairs, x.distinct_keys, x.max_group_size) == \
               (y.emitted_pairs, y.distinct_keys, y.max_group_size)


def test_deterministic_metrics_repeat_across_workers():
    edges = oracles.random_edges(random.Random(81), 40, 0.4)
    g = from_edges(edges)
    ref = None
    for workers in (1, 2, 8):
        rep = fff_count(g, 4, workers=workers).run_report
        sig = [(r.emitted_pairs, r.distinct_keys, r.max_group_size, r.output_pairs) for r in rep.rounds]
        ref = ref or sig
        assert sig == ref


def test_per_node_csv():
    buf = io.StringIO()
    per_node_csv({3: 1, 1: 2}, buf)
    assert buf.getvalue() == "node,count\n1,2\n3,1\n"


def test_checked_total_overflow():
    assert _checked_total([UINT64_MAX]) == UINT64_MAX
    with pytest.raises(OverflowError):
        _checked_total([UINT64_MAX, 1])


def test_large_labels_survive_pipeline():
    base = (1 << 63) + 5
    edges = [(base + a, base + b) for a, b in oracles.complete(5)]
    r = fff_count(from_edges(edges), 3, per_node=True)
    assert r.q_k == 10
    assert set(r.per_node) == {base + i for i in range(1, 6)}
