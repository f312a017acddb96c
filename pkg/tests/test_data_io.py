import io

import pytest
from hypothesis import given, strategies as st

from dilemma_search.core import IterationRecord, SearchConfig, Trace, dfs_search
from dilemma_search.data_io import (RunSummary, fingerprint, format_knapsack, format_trace, mean_best_energies,
                                    parse_dataset, parse_knapsack, read_summary, write_trace)
from dilemma_search.errors import ParseError, RaggedRow
from dilemma_search.knapsack import KnapsackAdapter, KnapsackInstance

from conftest import DATA


def test_parse_knapsack_examples():
    inst = parse_knapsack("3 8\n10 5\n7 4\n6 4\n")
    assert inst.n == 3 and inst.capacity == 8
    assert [(it.value, it.weight) for it in inst.items] == [(10, 5), (7, 4), (6, 4)]
    with pytest.raises(ParseError) as e:
        parse_knapsack("2 8\n10 5\n")
    assert e.value.line == 3 and "expected 2 items, found 1" in str(e.value)
    with pytest.raises(ParseError) as e:
        parse_knapsack("3 8\n10 0\n7 4\n6 4\n")
    assert e.value.line == 2 and "weight must be ≥ 1" in str(e.value)


@pytest.mark.parametrize("text", ["", "3\n", "x 8\n", "1 8\n1 2 3\n", "1 0\n1 1\n", "1 8\n-1 2\n"])
def test_parse_knapsack_rejects(text):
    with pytest.raises(ParseError):
        parse_knapsack(text)


@given(st.lists(st.tuples(st.integers(0, 1000), st.integers(1, 1000)), max_size=30), st.integers(1, 10**6))
def test_knapsack_round_trip(pairs, W):
    inst = KnapsackInstance.from_pairs(pairs, W)
    assert parse_knapsack(format_knapsack(inst)) == inst


def test_bundled_instance_parses():
    inst = parse_knapsack((DATA / "p01.txt").read_text())
    assert inst.n == 10 and inst.capacity == 165


def test_parse_dataset_examples():
    text = "x,y,class\na,p,yes\nb,p,no\na,q,yes\nb,q,yes\n"
    D = parse_dataset(text)
    assert D.attributes == ("x", "y") and D.class_name == "class" and D.n_rows == 4
    with pytest.raises(RaggedRow) as e:
        parse_dataset("x,y,class\na,p,yes\nb,no\n")
    assert e.value.line == 3
    B = parse_dataset("x,class\n0,a\n5,a\n10,b\n", bins=["x:2"])
    assert [x for x, _ in B.rows()] == [("b0",), ("b0",), ("b1",)]
    with pytest.raises(ParseError):
        parse_dataset("x,class\nfoo,a\n", bins=["x:2"])


def test_bundled_dataset_parses():
    D = parse_dataset((DATA / "planted_noise.csv").read_text())
    assert D.n_rows == 1000 and len(D.attributes) == 9


def _rec(i, e):
    return IterationRecord(i, e, e, 0, float("nan"), float("nan"), 3)


def test_trace_line_counts():
    t = Trace("dfs", None, None, 0.0, 1e-12, [_rec(0, -1.0), _rec(1, -2.0)])
    lines = format_trace(t).splitlines()
    assert len(lines) == 4 and lines[0].startswith("# algo=dfs seed=na rng=na")
    assert lines[1].split(",")[0] == "iteration" and lines[2].split(",")[4] == "nan"
    assert len(format_trace(Trace("dfs", None, None, 0.0, 1e-12, [])).splitlines()) == 2
    assert format_trace(t, timing=False).splitlines()[2].endswith(",0")


def test_trace_is_reproducible(worked_instance, tmp_path):
    outs = []
    for k in range(2):
        trace = dfs_search(KnapsackAdapter(worked_instance), SearchConfig())[1]
        write_trace(trace, tmp_path / f"t{k}.csv", timing=False)
        outs.append((tmp_path / f"t{k}.csv").read_bytes())
    assert outs[0] == outs[1]
    buf = io.StringIO()
    write_trace(trace, buf, timing=False)
    assert buf.getvalue().encode() == outs[0]


def test_mean_carries_short_traces_forward():
    a = Trace("rss", 1, "PCG64", 0.0, 1e-12, [_rec(0, -1.0), _rec(1, -3.0)])
    b = Trace("rss", 2, "PCG64", 0.0, 1e-12, [_rec(0, -2.0)])
    assert mean_best_energies([a, b]) == [-1.5, -2.5]


def test_summary_order_and_fingerprint():
    s = RunSummary("dfs", [], 4, -13.0, 1, 0, 0.0, 1e-12, fingerprint("abc"))
    keys = [line.split("=")[0] for line in s.lines()]
    assert keys == ["algo", "seeds", "iterations", "best_energy", "best_iteration", "wall_ms", "depth_const",
                    "epsilon", "stopping", "fingerprint"]
    assert read_summary("\n".join(s.lines()))["best_energy"] == "-13"
    assert fingerprint("abc") == fingerprint(b"abc") != fingerprint("abd")
