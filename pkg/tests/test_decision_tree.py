import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilemma_search.core import SearchConfig, dfs_search, greedy_search
from dilemma_search.decision_tree import (Dataset, DecisionTreeAdapter, SplitConfig, classify_nested, dt_energy,
                                          entropy, exhaustive_min_energy, id3_build, info_gain, nested_splits_bfs,
                                          planted_noise_dataset, quantize_numeric, random_dataset, split_dataset,
                                          tree_to_nested)
from dilemma_search.errors import (DisjointnessError, EmptySubset, IllegalAction, NotCandidate, RatioError,
                                   UnknownAttribute)


def H(counts):
    n = sum(counts)
    return -sum(c / n * math.log2(c / n) for c in counts if c)


def table(attrs, rows):
    return Dataset.from_rows(attrs, [(r[:-1], r[-1]) for r in rows])


def test_entropy_examples():
    assert entropy({"a": 5, "b": 5}) == pytest.approx(1.0)
    assert entropy({"a": 7}) == 0.0
    assert entropy({"a": 3, "b": 1}) == pytest.approx(0.811278, abs=1e-6)
    assert entropy("aaab") == pytest.approx(0.811278, abs=1e-6)
    with pytest.raises(EmptySubset):
        entropy({})


def test_info_gain_examples():
    T = table(["x"], [("0", "a"), ("0", "a"), ("1", "b"), ("1", "a")])
    assert info_gain(T, "x") == pytest.approx(0.311278, abs=1e-6)
    same = table(["x"], [("a", "a"), ("b", "b"), ("a", "a")])
    assert info_gain(same, 0) == pytest.approx(H([2, 1]))
    const = table(["x"], [("k", "a"), ("k", "b")])
    assert info_gain(const, "x") == 0.0
    with pytest.raises(UnknownAttribute):
        info_gain(T, "nope")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=40))
def test_gain_bounds_and_reference(rows):
    T = table(["p", "q"], [(str(a), str(b), str(c)) for a, b, c in rows])
    h = H(list(Counter(c for *_, c in rows).values()))
    for j in range(2):
        g = info_gain(T, j)
        groups = Counter(r[j] for r in rows)
        ref = h - sum(n / len(rows) * H(list(Counter(r[2] for r in rows if r[j] == v).values()))
                      for v, n in groups.items())
        assert -1e-9 <= g <= h + 1e-9
        assert g == pytest.approx(max(ref, 0.0), abs=1e-9)


def _adapter(T, V=None, **cfg):
    if V is None:
        T, V = T.subset(np.arange(T.n_rows - 1)), T.subset([T.n_rows - 1])
    return DecisionTreeAdapter(T, V, SplitConfig(**cfg))


def test_scored_actions_tie_order():
    rows = [("0", "0", "0", "n"), ("1", "0", "0", "p"), ("0", "1", "1", "n"), ("1", "1", "1", "p"),
            ("0", "0", "1", "n")]
    ad = _adapter(table(["a", "b", "c"], rows + [("0", "0", "0", "n")]))
    acts = ad.scored_actions(ad.initial_state())
    assert acts[0][0] == 0
    ties = [a for a, g in acts if g == acts[1][1]]
    assert ties == sorted(ties)


def test_pure_front_node_is_sealed():
    rows = [("0", "x", "a"), ("0", "y", "a"), ("1", "x", "a"), ("1", "y", "b"), ("1", "x", "a")]
    ad = _adapter(table(["u", "v"], rows + [("0", "x", "a")]))
    s = ad.apply(ad.initial_state(), 0)
    front = s.nodes[s.frontier[0]]
    assert len(s.frontier) == 1 and set(front.rows.tolist()) == {2, 3, 4}
    assert [a for a, _ in ad.scored_actions(s)] == [1]


def test_max_depth_seals_nodes():
    T = random_dataset(0, n_rows=300, n_attrs=9)
    ad = _adapter(T, max_depth=8)
    state = greedy_search(ad)[0]
    assert max(n.depth for n in state.nodes) <= 8
    shallow = _adapter(T, max_depth=1)
    s = shallow.apply(shallow.initial_state(), 0)
    assert shallow.is_candidate(s)


def test_apply_partitions_rows():
    rows = [(("l",) if k < 6 else ("r",), "a" if k % 3 else "b") for k in range(10)]
    T = Dataset.from_rows(["x"], rows)
    V = Dataset(T.attributes, T.values, T.class_name, T.classes, T.X[:1], T.y[:1], np.array([99]))
    ad = DecisionTreeAdapter(T, V)
    s = ad.apply(ad.initial_state(), 0)
    assert [len(s.nodes[i].rows) for i in s.nodes[0].children] == [6, 4]
    with pytest.raises(IllegalAction):
        ad.apply(s, 0)


def test_unseen_value_becomes_parent_majority_leaf():
    T = Dataset.from_rows(["x", "z"], [(("u", "0"), "a"), (("u", "1"), "b"), (("v", "0"), "a"), (("v", "1"), "a")],
                          values=[["u", "v", "w"], ["0", "1"]])
    V = Dataset(T.attributes, T.values, T.class_name, T.classes, np.array([[2, 0]]), np.array([1]), np.array([50]))
    ad = DecisionTreeAdapter(T, V)
    s = ad.apply(ad.initial_state(), 0)
    empty = s.nodes[s.nodes[0].children[2]]
    assert len(empty.rows) == 0 and not empty.is_split and empty.majority == 0
    assert s.nodes[0].children[2] not in s.frontier


def test_energy_examples():
    rows = [(("0",), "a"), (("1",), "b")] * 5
    T = Dataset.from_rows(["x"], rows)
    train, V = T.subset(range(4)), T.subset(range(4, 10))
    ad = DecisionTreeAdapter(train, V)
    tree = greedy_search(ad)[0]
    assert dt_energy(tree, V) == 0
    leaf_rows = [(("0",), "a")] * 6 + [(("0",), "b")] * 4
    L = Dataset.from_rows(["x"], leaf_rows)
    # single-leaf tree: every training row has the same label, so the root is sealed
    train = Dataset(L.attributes, L.values, L.class_name, L.classes, L.X[:2], L.y[:2], np.array([100, 101]))
    ad = DecisionTreeAdapter(train, L)
    leaf = ad.initial_state()
    assert ad.is_candidate(leaf) and dt_energy(leaf, L) == 4
    with pytest.raises(DisjointnessError):
        dt_energy(leaf, L, train=L)
    with pytest.raises(DisjointnessError):
        DecisionTreeAdapter(L, L)
    with pytest.raises(NotCandidate):
        big = _adapter(random_dataset(1))
        dt_energy(big.initial_state(), big.validation)


def test_split_dataset():
    T = random_dataset(2, n_rows=100)
    a, b, c = split_dataset(T, (0.5, 0.2, 0.3), seed=7)
    assert (a.n_rows, b.n_rows, c.n_rows) == (50, 20, 30)
    ids = np.concatenate([a.row_ids, b.row_ids, c.row_ids])
    assert sorted(ids.tolist()) == list(range(100))
    again = split_dataset(T, (0.5, 0.2, 0.3), seed=7)
    assert all(np.array_equal(x.row_ids, y.row_ids) for x, y in zip((a, b, c), again))
    with pytest.raises(RatioError):
        split_dataset(T, (0.9, 0.2, 0.3))


def test_quantize_numeric():
    assert quantize_numeric([0, 5, 10], 2).labels == ["b0", "b0", "b1"]
    q = quantize_numeric([3.0, 3.0, 3.0], 4)
    assert q.labels == ["b0"] * 3 and q.constant
    assert quantize_numeric([1, 2, 7.5, 9], 3).labels[-1] == "b2"


def test_adapter_greedy_equals_id3():
    for seed in range(10):
        T, V, _ = split_dataset(random_dataset(seed), seed=seed)
        state, path = greedy_search(DecisionTreeAdapter(T, V))
        tree = id3_build(T)
        assert tree_to_nested(state, T) == tree
        assert [T.attributes[a] for a in path] == nested_splits_bfs(tree)
        assert [a for _, a in state.action_path] == list(path)
        truth = [label for _, label in V.rows()]
        assert dt_energy(state, V) == sum(p != t for p, t in zip(classify_nested(tree, V), truth))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_tiny_exhaustion_matches_enumeration(seed, n_attrs):
    data = random_dataset(seed, n_rows=30, n_attrs=n_attrs, n_values=2, n_classes=2)
    T, V, _ = split_dataset(data, seed=seed)
    cfg = SplitConfig(max_depth=2)
    best, _ = dfs_search(DecisionTreeAdapter(T, V, cfg), SearchConfig(max_iterations=10**6))
    assert dt_energy(best, V) == exhaustive_min_energy(T, V, cfg)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_partition_conservation(seed):
    T, V, _ = split_dataset(random_dataset(seed, n_rows=80), seed=seed)
    ad = DecisionTreeAdapter(T, V, SplitConfig(max_depth=3))
    rng = np.random.default_rng(seed)
    s = ad.initial_state()
    while not ad.is_candidate(s):
        acts = ad.scored_actions(s)
        s = ad.apply(s, acts[rng.integers(len(acts))][0])
    for n in s.nodes:
        if n.is_split:
            kids = np.concatenate([s.nodes[c].rows for c in n.children])
            assert sorted(kids.tolist()) == sorted(n.rows.tolist())


def test_planted_dataset_shape():
    D = planted_noise_dataset()
    assert D.n_rows == 1000
    assert D.attributes == ("s0", "s1", "s2", "d0", "d1", "f0", "f1", "f2", "f3")
