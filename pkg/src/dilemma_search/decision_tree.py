"""ID3 decision-tree induction as a sequence of split decisions.

A state is a partially grown tree with a FIFO frontier of open nodes. An
action picks the split attribute of the front node and is scored by its
information gain on that node's training subset. Nodes whose stopping rule
fires are sealed into majority-class leaves as soon as they reach the front of
the frontier, so every state handed to the engine is already normalised. The
energy of a finished tree is its number of misclassified validation rows.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import kernels
from ._kernels_py import _entropy
from .core import ProblemAdapter
from .errors import (DisjointnessError, DomainError, EmptySubset, IllegalAction, NotCandidate,
                     RatioError, TooFewRows, TooLarge, UnknownAttribute)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Categorical rows, integer-encoded against a fixed schema.

    ``values[j]`` is the value set of attribute ``j``; ``X[r, j]`` indexes into
    it. ``row_ids`` identify rows across splits of the same source dataset.
    """

    attributes: tuple
    values: tuple
    class_name: str
    classes: tuple
    X: np.ndarray
    y: np.ndarray
    row_ids: np.ndarray

    def __post_init__(self):
        if len(self.y) == 0:
            raise DomainError("dataset has no rows")
        if not self.classes:
            raise DomainError("dataset has no classes")

    @classmethod
    def from_rows(cls, attributes: Sequence[str], rows: Iterable[tuple], class_name: str = "class",
                  values: Optional[Sequence[Sequence[str]]] = None,
                  classes: Optional[Sequence[str]] = None) -> "Dataset":
        """Encode ``(attribute values, label)`` rows.

        Value sets and classes default to the sorted observed values.
        """
        rows = [(tuple(x), label) for x, label in rows]
        m = len(attributes)
        for k, (x, _) in enumerate(rows):
            if len(x) != m:
                raise DomainError(f"row {k} has {len(x)} values, expected {m}")
        if values is None:
            values = [sorted({x[j] for x, _ in rows}) for j in range(m)]
        if classes is None:
            classes = sorted({label for _, label in rows})
        values = tuple(tuple(v) for v in values)
        classes = tuple(classes)
        index = [{v: i for i, v in enumerate(vs)} for vs in values]
        cindex = {c: i for i, c in enumerate(classes)}
        X = np.empty((len(rows), m), dtype=np.int64)
        y = np.empty(len(rows), dtype=np.int64)
        for r, (x, label) in enumerate(rows):
            for j in range(m):
                try:
                    X[r, j] = index[j][x[j]]
                except KeyError:
                    raise DomainError(f"row {r}: value {x[j]!r} not in the value set of {attributes[j]!r}") from None
            try:
                y[r] = cindex[label]
            except KeyError:
                raise DomainError(f"row {r}: unknown class {label!r}") from None
        return cls(tuple(attributes), values, class_name, classes, X, y,
                   np.arange(len(rows), dtype=np.int64))

    @property
    def n_rows(self) -> int:
        return len(self.y)

    @property
    def n_values(self) -> np.ndarray:
        return np.array([len(v) for v in self.values], dtype=np.int64)

    def attribute_index(self, attribute) -> int:
        if isinstance(attribute, (int, np.integer)):
            if 0 <= attribute < len(self.attributes):
                return int(attribute)
        elif attribute in self.attributes:
            return self.attributes.index(attribute)
        raise UnknownAttribute(attribute)

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.attributes, self.values, self.class_name, self.classes,
                       np.ascontiguousarray(self.X[indices]), np.ascontiguousarray(self.y[indices]),
                       self.row_ids[indices])

    def rows(self) -> list:
        return [(tuple(self.values[j][c] for j, c in enumerate(x)), self.classes[label])
                for x, label in zip(self.X.tolist(), self.y.tolist())]


@dataclass(frozen=True)
class SplitConfig:
    max_depth: int = 8
    min_entropy: float = 0.0
    min_rows: int = 1

    def __post_init__(self):
        if self.max_depth < 1:
            raise DomainError("max_depth must be positive")
        if self.min_entropy < 0:
            raise DomainError("min_entropy must be >= 0")
        if self.min_rows < 1:
            raise DomainError("min_rows must be positive")


def entropy(subset) -> float:
    """Class entropy in bits of a label multiset (a mapping of counts or an iterable of labels)."""
    counts = subset if isinstance(subset, Mapping) else Counter(subset)
    total = sum(counts.values())
    if total == 0:
        raise EmptySubset("entropy of an empty subset")
    return _entropy([counts[c] for c in sorted(counts)], total)


def info_gain(T: Dataset, attribute) -> float:
    """Entropy reduction obtained by partitioning ``T`` on ``attribute``."""
    j = T.attribute_index(attribute)
    rows = np.arange(T.n_rows, dtype=np.int64)
    return kernels.split_gains(T.X, T.y, rows, np.array([j], dtype=np.int64), T.n_values,
                               len(T.classes))[0]


def majority(y: np.ndarray, rows: np.ndarray, n_classes: int) -> int:
    # argmax returns the first maximum, i.e. the class earliest in sorted order
    return int(np.argmax(np.bincount(y[rows], minlength=n_classes)))


@dataclass(eq=False)
class TreeNode:
    depth: int
    rows: np.ndarray
    used: frozenset
    majority: int
    attribute: Optional[int] = None
    children: tuple = ()
    _entropy: Optional[float] = field(default=None, repr=False)
    _actions: Optional[list] = field(default=None, repr=False)

    @property
    def is_split(self) -> bool:
        return self.attribute is not None


@dataclass(frozen=True, eq=False)
class TreeState:
    """Partial tree: ``nodes[0]`` is the root, ``frontier`` holds open node ids
    front first, ``action_path`` the ``(node id, attribute)`` splits so far."""

    nodes: tuple
    frontier: tuple
    action_path: tuple = ()


class DecisionTreeAdapter(ProblemAdapter):
    def __init__(self, train: Dataset, validation: Dataset, config: SplitConfig = SplitConfig()):
        if np.intersect1d(train.row_ids, validation.row_ids).size:
            raise DisjointnessError("validation rows overlap the training rows")
        if validation.attributes != train.attributes or validation.values != train.values:
            raise DomainError("validation schema differs from the training schema")
        self.train = train
        self.validation = validation
        self.config = config
        self._n_classes = len(train.classes)
        self._n_values = train.n_values

    def _node_entropy(self, node: TreeNode) -> float:
        if node._entropy is None:
            node._entropy = kernels.label_entropy(self.train.y, node.rows, self._n_classes)
        return node._entropy

    def stops(self, node: TreeNode) -> bool:
        c = self.config
        return (node.depth >= c.max_depth
                or len(node.rows) < c.min_rows
                or len(node.used) == len(self.train.attributes)
                or self._node_entropy(node) <= c.min_entropy)

    def _normalize(self, nodes: tuple, frontier: tuple, path: tuple) -> TreeState:
        k = 0
        while k < len(frontier) and self.stops(nodes[frontier[k]]):
            k += 1
        return TreeState(nodes, frontier[k:], path)

    def initial_state(self) -> TreeState:
        rows = np.arange(self.train.n_rows, dtype=np.int64)
        root = TreeNode(0, rows, frozenset(), majority(self.train.y, rows, self._n_classes))
        return self._normalize((root,), (0,), ())

    def scored_actions(self, state: TreeState) -> list:
        if not state.frontier:
            return []
        node = state.nodes[state.frontier[0]]
        if node._actions is None:
            attrs = [a for a in range(len(self.train.attributes)) if a not in node.used]
            gains = kernels.split_gains(self.train.X, self.train.y, node.rows,
                                        np.array(attrs, dtype=np.int64), self._n_values, self._n_classes)
            node._actions = sorted(zip(attrs, gains), key=lambda a: (-a[1], a[0]))
        return node._actions

    def apply(self, state: TreeState, attribute: int) -> TreeState:
        return dt_apply(state, attribute, self)

    def is_candidate(self, state: TreeState) -> bool:
        return not state.frontier

    def energy(self, state: TreeState) -> float:
        return dt_energy(state, self.validation, self.train)


def dt_scored_actions(state: TreeState, adapter: DecisionTreeAdapter) -> list:
    return adapter.scored_actions(state)


def dt_apply(state: TreeState, attribute: int, adapter: DecisionTreeAdapter) -> TreeState:
    """Split the front frontier node on ``attribute``.

    Children are appended to the frontier in value-set order; a child with no
    training rows becomes a leaf labelled with its parent's majority class.
    """
    if not state.frontier:
        raise IllegalAction("tree is complete")
    front = state.frontier[0]
    node = state.nodes[front]
    if not isinstance(attribute, (int, np.integer)) or not 0 <= attribute < len(adapter.train.attributes) \
            or attribute in node.used:
        raise IllegalAction(f"attribute {attribute!r} is not available at node {front}")
    attribute = int(attribute)
    codes = adapter.train.X[node.rows, attribute]
    nodes = list(state.nodes)
    used = node.used | {attribute}
    child_ids = []
    open_ids = []
    for v in range(len(adapter.train.values[attribute])):
        sub = node.rows[codes == v]
        label = majority(adapter.train.y, sub, adapter._n_classes) if len(sub) else node.majority
        child_ids.append(len(nodes))
        if len(sub):
            open_ids.append(len(nodes))
        nodes.append(TreeNode(node.depth + 1, sub, used, label))
    nodes[front] = TreeNode(node.depth, node.rows, node.used, node.majority, attribute, tuple(child_ids),
                            node._entropy, node._actions)
    return adapter._normalize(tuple(nodes), state.frontier[1:] + tuple(open_ids),
                              state.action_path + ((front, attribute),))


def predict(state: TreeState, X: np.ndarray) -> np.ndarray:
    """Class codes for the encoded rows ``X``; unknown value codes fall back to the node majority."""
    out = np.empty(len(X), dtype=np.int64)
    stack = [(0, np.arange(len(X), dtype=np.int64))]
    while stack:
        nid, idx = stack.pop()
        node = state.nodes[nid]
        if not node.is_split or len(idx) == 0:
            out[idx] = node.majority
            continue
        vals = X[idx, node.attribute]
        routed = np.zeros(len(idx), dtype=bool)
        for v, child in enumerate(node.children):
            hit = vals == v
            routed |= hit
            stack.append((child, idx[hit]))
        out[idx[~routed]] = node.majority
    return out


def dt_energy(state: TreeState, V: Dataset, train: Optional[Dataset] = None) -> float:
    """Number of validation rows the finished tree misclassifies."""
    if state.frontier:
        raise NotCandidate("tree still has open nodes")
    if V.n_rows == 0:
        raise EmptySubset("validation set is empty")
    if train is not None and np.intersect1d(train.row_ids, V.row_ids).size:
        raise DisjointnessError("validation rows overlap the training rows")
    return float(np.count_nonzero(predict(state, V.X) != V.y))


def tree_to_nested(state: TreeState, dataset: Dataset, nid: int = 0):
    """Nested ``{"split": name, "children": {value: ...}}`` / ``{"leaf": class}`` form."""
    node = state.nodes[nid]
    if not node.is_split:
        return {"leaf": dataset.classes[node.majority]}
    values = dataset.values[node.attribute]
    return {"split": dataset.attributes[node.attribute],
            "children": {values[v]: tree_to_nested(state, dataset, c) for v, c in enumerate(node.children)}}


def _stops(T: Dataset, rows, depth, used, config) -> bool:
    return (depth >= config.max_depth or len(rows) < config.min_rows
            or len(used) == len(T.attributes)
            or kernels.label_entropy(T.y, rows, len(T.classes)) <= config.min_entropy)


def id3_build(T: Dataset, config: SplitConfig = SplitConfig()):
    """Standalone recursive ID3 returning the nested tree form.

    Splits on the highest-gain unused attribute (earliest in the schema on
    ties) until a stopping rule fires.
    """
    C = len(T.classes)

    def grow(rows, depth, used, parent_label):
        if len(rows) == 0:
            return {"leaf": T.classes[parent_label]}
        label = majority(T.y, rows, C)
        if _stops(T, rows, depth, used, config):
            return {"leaf": T.classes[label]}
        attrs = [a for a in range(len(T.attributes)) if a not in used]
        gains = kernels.split_gains(T.X, T.y, rows, np.array(attrs, dtype=np.int64), T.n_values, C)
        best = max(range(len(attrs)), key=lambda k: (gains[k], -attrs[k]))
        a = attrs[best]
        codes = T.X[rows, a]
        return {"split": T.attributes[a],
                "children": {T.values[a][v]: grow(rows[codes == v], depth + 1, used | {a}, label)
                             for v in range(len(T.values[a]))}}

    return grow(np.arange(T.n_rows, dtype=np.int64), 0, frozenset(), 0)


def nested_splits_bfs(tree) -> list:
    """Split attribute names in breadth-first order (the order the frontier grows)."""
    out = []
    queue = [tree]
    while queue:
        t = queue.pop(0)
        if "split" in t:
            out.append(t["split"])
            queue.extend(t["children"].values())
    return out


def classify_nested(tree, dataset: Dataset) -> list:
    out = []
    for x, _ in dataset.rows():
        t = tree
        while "split" in t:
            t = t["children"][x[dataset.attributes.index(t["split"])]]
        out.append(t["leaf"])
    return out


def enumerate_trees(T: Dataset, config: SplitConfig = SplitConfig(), limit: int = 1_000_000):
    """Every tree reachable under the stopping rules, in nested form.

    Raises ``TooLarge`` once more than ``limit`` trees would be produced.
    """
    C = len(T.classes)

    def options(rows, depth, used, parent_label):
        if len(rows) == 0:
            return [{"leaf": T.classes[parent_label]}]
        label = majority(T.y, rows, C)
        if _stops(T, rows, depth, used, config):
            return [{"leaf": T.classes[label]}]
        out = []
        for a in range(len(T.attributes)):
            if a in used:
                continue
            codes = T.X[rows, a]
            per_child = [options(rows[codes == v], depth + 1, used | {a}, label)
                         for v in range(len(T.values[a]))]
            if math.prod(len(p) for p in per_child) + len(out) > limit:
                raise TooLarge(f"more than {limit} trees to enumerate")
            for combo in itertools.product(*per_child):
                out.append({"split": T.attributes[a],
                            "children": dict(zip(T.values[a], combo))})
        return out

    return options(np.arange(T.n_rows, dtype=np.int64), 0, frozenset(), 0)


def exhaustive_min_energy(train: Dataset, validation: Dataset, config: SplitConfig = SplitConfig(),
                          limit: int = 1_000_000) -> float:
    """Fewest validation misclassifications over all enumerable trees."""
    truth = [label for _, label in validation.rows()]
    best = math.inf
    for tree in enumerate_trees(train, config, limit):
        errors = sum(p != t for p, t in zip(classify_nested(tree, validation), truth))
        best = min(best, errors)
    return float(best)


def split_dataset(dataset: Dataset, ratios: Sequence[float] = (0.5, 0.2, 0.3), seed: int = 0):
    """Seeded shuffle, then contiguous train/validation/test blocks."""
    if len(ratios) != 3 or any(not r > 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise RatioError(f"ratios must be three positive numbers summing to 1, got {tuple(ratios)}")
    n = dataset.n_rows
    perm = np.random.default_rng(seed).permutation(n)
    n_train = math.floor(ratios[0] * n + 0.5)
    n_val = math.floor(ratios[1] * n + 0.5)
    n_test = n - n_train - n_val
    if min(n_train, n_val, n_test) < 1:
        raise TooFewRows(f"{n} rows cannot be split {tuple(ratios)} with every part nonempty")
    return (dataset.subset(perm[:n_train]), dataset.subset(perm[n_train:n_train + n_val]),
            dataset.subset(perm[n_train + n_val:]))


@dataclass(frozen=True)
class Quantized:
    labels: list
    edges: np.ndarray
    constant: bool = False


def bin_labels(column: Sequence[float], edges: np.ndarray) -> list:
    """Map values to ``"b<k>"`` with bins closed on the right; out-of-range values clip."""
    k = len(edges) - 1
    idx = np.searchsorted(np.asarray(edges[1:-1], dtype=float), np.asarray(column, dtype=float), side="left")
    return [f"b{min(max(int(i), 0), k - 1)}" for i in idx]


def quantize_numeric(column: Sequence[float], k: int) -> Quantized:
    """Equal-width binning of a numeric column into ``k`` categories."""
    if k < 2:
        raise DomainError("need at least 2 bins")
    values = np.asarray(column, dtype=float)
    if values.size == 0:
        raise DomainError("cannot quantize an empty column")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return Quantized(["b0"] * values.size, np.array([lo, hi]), True)
    edges = np.linspace(lo, hi, k + 1)
    return Quantized(bin_labels(values, edges), edges)


def random_dataset(seed: int, n_rows: int = 200, n_attrs: int = 6, n_values: int = 3,
                   n_classes: int = 3) -> Dataset:
    """Random categorical data whose label depends on a few attributes plus noise."""
    rng = np.random.default_rng(seed)
    X = rng.integers(0, n_values, size=(n_rows, n_attrs))
    w = rng.integers(0, n_values, size=n_attrs)
    y = (X @ w + rng.integers(0, 2, size=n_rows)) % n_classes
    attrs = [f"a{j}" for j in range(n_attrs)]
    values = [[f"v{v}" for v in range(n_values)]] * n_attrs
    rows = [([f"v{v}" for v in x], f"c{c}") for x, c in zip(X.tolist(), y.tolist())]
    return Dataset.from_rows(attrs, rows, values=values, classes=[f"c{c}" for c in range(n_classes)])


def planted_noise_dataset(n_rows: int = 1000, seed: int = 0, n_signal: int = 3, n_decoy: int = 2,
                          n_filler: int = 4, decoy_agreement: float = 0.7,
                          label_noise: float = 0.1) -> Dataset:
    """Ternary attributes where the label is a parity-style rule on the first
    ``n_signal`` attributes. Decoy attributes copy the label with probability
    ``decoy_agreement`` (otherwise random), which makes them look best to a
    greedy splitter; filler attributes are pure noise; ``label_noise`` of the
    labels are flipped."""
    rng = np.random.default_rng(seed)
    signal = rng.integers(0, 3, size=(n_rows, n_signal))
    label = (signal.sum(axis=1) % 3 == 0).astype(np.int64)
    decoys = np.where(rng.random((n_rows, n_decoy)) < decoy_agreement,
                      label[:, None], rng.integers(0, 3, size=(n_rows, n_decoy)))
    filler = rng.integers(0, 3, size=(n_rows, n_filler))
    flip = rng.random(n_rows) < label_noise
    label = np.where(flip, 1 - label, label)
    X = np.concatenate([signal, decoys, filler], axis=1)
    attrs = ([f"s{j}" for j in range(n_signal)] + [f"d{j}" for j in range(n_decoy)]
             + [f"f{j}" for j in range(n_filler)])
    values = [["x", "y", "z"]] * len(attrs)
    classes = ["neg", "pos"]
    rows = [([values[0][v] for v in x], classes[c]) for x, c in zip(X.tolist(), label.tolist())]
    return Dataset.from_rows(attrs, rows, values=values, classes=classes)
