import csv
import io
import json

import pytest

from cliquemr.bench import (CSV_COLUMNS, EXACT_ALGORITHMS, BenchmarkSpec, format_mmss, growth_ratios,
                            load_manifest, rows_to_csv, rows_to_table, run_benchmark)
from cliquemr.generators import generate_pa
from cliquemr.graph import from_edges

import oracles


def test_empty_benchmark():
    assert run_benchmark(BenchmarkSpec()) == []


def test_k6_all_exact_algorithms():
    g = from_edges(oracles.complete(6))
    rows = run_benchmark(BenchmarkSpec({"k6": g}, EXACT_ALGORITHMS, [4]))
    by_algo = {r.algorithm: r for r in rows}
    assert by_algo["sv"].error and "k=3" in by_algo["sv"].error
    assert all(r.result == 15 for r in rows if r.ok)
    assert {r.algorithm for r in rows if r.ok} == set(EXACT_ALGORITHMS) - {"sv", "sv-delayed"}


def test_cross_algorithm_agreement_and_growth():
    g = generate_pa(800, 6, seed=5)
    rows = run_benchmark(BenchmarkSpec({"pa": g}, ["fff", "afu", "kernel"], [3, 4, 5], b=2))
    for k in (3, 4, 5):
        assert len({r.result for r in rows if r.k == k}) == 1
    fff = [r for r in rows if r.algorithm == "fff"]
    assert growth_ratios(rows, "pa") == pytest.approx([fff[1].result / fff[0].result,
                                                       fff[2].result / fff[1].result])
    assert [r.dataset for r in rows] == ["pa"] * 9
    assert [(r.algorithm, r.k) for r in rows][:3] == [("fff", 3), ("fff", 4), ("fff", 5)]


def test_sampling_rows_get_relative_error_only_with_reference():
    g = generate_pa(500, 5, seed=1)
    rows = run_benchmark(BenchmarkSpec({"pa": g}, ["color"], [3], c=2, seeds=[0, 1]))
    assert all(r.rel_error is None for r in rows)
    rows = run_benchmark(BenchmarkSpec({"pa": g}, ["fff", "color"], [3], c=2, seeds=[0, 1]))
    exact = rows[0].result
    for r in rows[1:]:
        assert r.rel_error == pytest.approx(abs(r.result - exact) / exact)
    rows = run_benchmark(BenchmarkSpec({"pa": g}, ["plain"], [3], p=0.5, references={"pa": {3: 1000}}))
    assert rows[0].rel_error == pytest.approx(abs(rows[0].result - 1000) / 1000)


def test_failures_recorded_and_run_continues(tmp_path):
    good = tmp_path / "good.txt"
    good.write_text("1 2\n2 3\n1 3\n")
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\nfoo bar\n")
    rows = run_benchmark(BenchmarkSpec({"missing": tmp_path / "nope.txt", "bad": bad, "good": good},
                                       ["fff"], [3]))
    assert [r.ok for r in rows] == [False, False, True]
    assert "line 2" in rows[1].error
    assert rows[2].result == 1


def test_report_determinism_except_time():
    g = generate_pa(400, 4, seed=2)
    spec = BenchmarkSpec({"pa": g}, ["fff", "afu", "color"], [3, 4], seeds=[1, 2])
    a, b = (list(csv.DictReader(io.StringIO(rows_to_csv(run_benchmark(spec))))) for _ in range(2))
    for ra, rb in zip(a, b):
        for col in CSV_COLUMNS:
            if col not in ("wall_ms", "round_ms"):
                assert ra[col] == rb[col], col


def test_manifest(tmp_path):
    (tmp_path / "d").mkdir()
    path = tmp_path / "d" / "m.json"
    path.write_text(json.dumps({"a": "a.txt", "b": "/abs/b.txt"}))
    assert load_manifest(path) == {"a": str(tmp_path / "d" / "a.txt"), "b": "/abs/b.txt"}
    path.write_text("[1, 2]")
    with pytest.raises(ValueError):
        load_manifest(path)


def test_formats():
    assert format_mmss(0.4) == "00:00"
    assert format_mmss(125.2) == "02:05"
    g = from_edges(oracles.complete(5))
    rows = run_benchmark(BenchmarkSpec({"k5": g}, ["fff"], [3, 4]))
    text = rows_to_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert list(parsed[0]) == list(CSV_COLUMNS)
    assert [p["result"] for p in parsed] == ["10", "5"]
    assert parsed[1]["growth"] == "0.50"
    table = rows_to_table(rows)
    assert "(0.50x)" in table and "00:00" in table


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        run_benchmark(BenchmarkSpec({"x": from_edges([(1, 2)])}, ["magic"], [3]))
