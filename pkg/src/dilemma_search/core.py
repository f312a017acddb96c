"""Anytime search engines over a sequence-of-actions problem.

A problem is exposed through :class:`ProblemAdapter`. The engines build a
search tree whose edges are actions; the first candidate is always the greedy
one, and every later iteration backjumps to a previously explored state, takes
its next-best untaken action and regrows greedily from there.

Dilemma First Search revisits the state whose two best remaining heuristic
scores are closest; random state selection (RSS) picks a queued state
uniformly at random and is otherwise identical.
"""
from __future__ import annotations

import heapq
import itertools
import math
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterator, Optional, Sequence

import numpy as np

from .errors import AdapterError, BudgetZero, ConfigError, DomainError

ActionId = Hashable
ScoredAction = tuple  # (ActionId, float)

RNG_NAME = "PCG64"
NAN = float("nan")


class ProblemAdapter(ABC):
    """Behavioural contract between a problem and the search engines.

    ``scored_actions`` must be deterministic and sorted by descending score,
    ties broken by ascending action id. ``energy`` is minimised; adapters for
    maximisation problems negate their objective.
    """

    @abstractmethod
    def initial_state(self) -> Any:
        ...

    @abstractmethod
    def scored_actions(self, state) -> Sequence[ScoredAction]:
        ...

    @abstractmethod
    def apply(self, state, action: ActionId) -> Any:
        ...

    @abstractmethod
    def is_candidate(self, state) -> bool:
        ...

    @abstractmethod
    def energy(self, state) -> float:
        ...


@dataclass
class SearchConfig:
    max_iterations: int = 100
    depth_const: float = 0.0
    epsilon: float = 1e-12
    time_budget_ms: Optional[int] = None
    assumed_depth: Optional[int] = None
    assumed_branching: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.max_iterations, int) or self.max_iterations < 0:
            raise ConfigError(f"max_iterations must be a nonnegative integer, got {self.max_iterations!r}")
        if not self.depth_const >= 0:
            raise ConfigError(f"depth_const must be >= 0, got {self.depth_const!r}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon!r}")
        if self.time_budget_ms is not None and self.time_budget_ms <= 0:
            raise ConfigError("time_budget_ms must be positive")
        if self.assumed_depth is not None and self.assumed_depth <= 0:
            raise ConfigError("assumed_depth must be positive")
        if self.assumed_branching is not None and self.assumed_branching < 2:
            raise ConfigError("assumed_branching must be >= 2")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")


@dataclass(eq=False)
class SearchNode:
    """A state in the search tree with its scored actions.

    ``taken_count`` counts how many of ``actions`` (best first) have already
    been expanded from this node.
    """

    state: Any
    path: tuple
    actions: tuple
    candidate: bool
    taken_count: int = 0

    @property
    def depth(self) -> int:
        return len(self.path)

    @property
    def exhausted(self) -> bool:
        return self.taken_count >= len(self.actions)

    def gap(self) -> float:
        """Heuristic gap between the next untaken action and the one after it."""
        k = self.taken_count
        f_best = self.actions[k][1]
        f_second = self.actions[k + 1][1] if k + 1 < len(self.actions) else 0.0
        return f_best - f_second


def selection_score(f_best: float, f_second: float, depth: int, config: SearchConfig) -> float:
    """Revisit priority of a state; the queue pops the minimum first."""
    return (f_best - f_second) - depth * config.depth_const


def dilemma_estimator(f_best: float, f_second: float, epsilon: float) -> float:
    return 1.0 / (f_best - f_second + epsilon)


def candidate_log_prob(explored_probs: Sequence[float], d: int, b: int) -> float:
    """Expected log-probability that a partially explored candidate is optimal.

    Explored decisions contribute their own probability, the remaining
    ``d - len(explored_probs)`` levels are assumed uniform over ``b`` branches.
    """
    if b < 2:
        raise DomainError(f"branching factor must be >= 2, got {b}")
    if d < len(explored_probs):
        raise DomainError(f"depth {d} is smaller than the {len(explored_probs)} explored levels")
    total = 0.0
    for p in explored_probs:
        if not 0.0 < p <= 1.0:
            raise DomainError(f"probability {p!r} outside (0, 1]")
        total += math.log(p)
    return total + (d - len(explored_probs)) * math.log(1.0 / b)


def normalized_probs(scores: Sequence[float]) -> list[float]:
    """Scale nonnegative heuristic scores to a distribution (uniform if all zero)."""
    s = sum(scores)
    if s <= 0:
        return [1.0 / len(scores)] * len(scores) if scores else []
    return [x / s for x in scores]


def path_log_prob(adapter: ProblemAdapter, path: Sequence[ActionId], d: int, b: int) -> float:
    """``candidate_log_prob`` along ``path``, using normalised heuristic scores."""
    state = adapter.initial_state()
    probs = []
    for action in path:
        actions = adapter.scored_actions(state)
        ids = [a for a, _ in actions]
        p = normalized_probs([f for _, f in actions])[ids.index(action)]
        # zero-probability choices are clamped so the diagnostic stays finite
        probs.append(max(p, 1e-300))
        state = adapter.apply(state, action)
    return candidate_log_prob(probs, max(d, len(probs)), b)


class DilemmaQueue:
    """Revisitable states ordered by selection score, FIFO on ties."""

    def __init__(self):
        self._heap = []
        self._counter = itertools.count()
        self._members = set()

    def __len__(self):
        return len(self._heap)

    def __bool__(self):
        return bool(self._heap)

    def __contains__(self, node):
        return id(node) in self._members

    def push(self, node: SearchNode, score: float, gap: float) -> None:
        if id(node) in self._members:
            raise ValueError("node is already queued")
        if node.exhausted:
            raise ValueError("exhausted nodes cannot be queued")
        heapq.heappush(self._heap, (score, next(self._counter), gap, node))
        self._members.add(id(node))

    def pop(self):
        """Remove and return ``(node, score, gap)`` with the minimum score."""
        score, _, gap, node = heapq.heappop(self._heap)
        self._members.discard(id(node))
        return node, score, gap

    def pop_random(self, rng: np.random.Generator):
        """Remove and return a uniformly chosen entry."""
        i = int(rng.integers(len(self._heap)))
        score, _, gap, node = self._heap[i]
        last = self._heap.pop()
        if i < len(self._heap):
            self._heap[i] = last
            heapq.heapify(self._heap)
        self._members.discard(id(node))
        return node, score, gap

    def entries(self):
        """Snapshot of ``(score, insertion_counter, node)`` in pop order."""
        return [(s, c, n) for s, c, _, n in sorted(self._heap, key=lambda e: e[:2])]


@dataclass
class IterationRecord:
    iteration: int
    candidate_energy: float
    best_energy: float
    selected_depth: int
    selection_score: float
    heuristic_gap: float
    elapsed_ms: int
    path: tuple = field(default=(), compare=False, repr=False)


@dataclass
class Trace:
    algo: str
    seed: Optional[int] = None
    rng: Optional[str] = None
    depth_const: float = 0.0
    epsilon: float = 1e-12
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def best_energies(self) -> list[float]:
        return [r.best_energy for r in self.records]

    def best_iteration(self) -> int:
        """First iteration at which the final best energy was reached."""
        final = self.records[-1].best_energy
        return next(r.iteration for r in self.records if r.best_energy == final)


def _make_node(adapter: ProblemAdapter, state, path: tuple) -> SearchNode:
    return SearchNode(state, path, tuple(adapter.scored_actions(state)), adapter.is_candidate(state))


def _enqueue(queue: DilemmaQueue, node: SearchNode, config: SearchConfig) -> None:
    gap = node.gap()
    queue.push(node, selection_score(gap, 0.0, node.depth, config), gap)


def greedy_rollout(adapter: ProblemAdapter, start: SearchNode, queue: DilemmaQueue,
                   config: SearchConfig, *, start_is_new: bool = False):
    """Grow greedily from ``start`` until a candidate is reached.

    Every node created on the way with at least two actions is queued before
    its first action is taken. ``start`` itself is re-queued afterwards if it
    still has untaken actions, unless ``start_is_new`` (the root), in which
    case it is queued like any freshly created node.

    Returns the candidate node and the list of nodes created.
    """
    if start.exhausted:
        raise ValueError("rollout start has no untaken action")
    if start_is_new and len(start.actions) >= 2:
        _enqueue(queue, start, config)
    created = []
    node = start
    while not node.candidate:
        if node.exhausted:
            raise AdapterError(f"no actions for non-candidate state at path {node.path!r}")
        action = node.actions[node.taken_count][0]
        node.taken_count += 1
        child = _make_node(adapter, adapter.apply(node.state, action), node.path + (action,))
        created.append(child)
        if not child.candidate:
            if not child.actions:
                raise AdapterError(f"no actions for non-candidate state at path {child.path!r}")
            if len(child.actions) >= 2:
                _enqueue(queue, child, config)
        node = child
    if not start_is_new and not start.exhausted:
        _enqueue(queue, start, config)
    return node, created


def greedy_search(adapter: ProblemAdapter):
    """Plain greedy descent; returns ``(state, path)``. Independent of the queue machinery."""
    state = adapter.initial_state()
    path = []
    while not adapter.is_candidate(state):
        actions = adapter.scored_actions(state)
        if not actions:
            raise AdapterError("no actions for a non-candidate state")
        path.append(actions[0][0])
        state = adapter.apply(state, actions[0][0])
    return state, tuple(path)


def enumerate_candidates(adapter: ProblemAdapter) -> Iterator[tuple]:
    """Yield ``(path, energy)`` for every leaf of the search tree (exhaustive)."""
    stack = [(adapter.initial_state(), ())]
    while stack:
        state, path = stack.pop()
        if adapter.is_candidate(state):
            yield path, adapter.energy(state)
            continue
        for action, _ in reversed(adapter.scored_actions(state)):
            stack.append((adapter.apply(state, action), path + (action,)))


def _search(adapter: ProblemAdapter, config: SearchConfig, trace: Trace,
            select: Callable[[DilemmaQueue], tuple]):
    if config.max_iterations == 0:
        raise BudgetZero("max_iterations must be positive")
    t0 = time.perf_counter()

    def elapsed():
        return int((time.perf_counter() - t0) * 1000)

    root = _make_node(adapter, adapter.initial_state(), ())
    if root.candidate:
        e = float(adapter.energy(root.state))
        trace.records.append(IterationRecord(0, e, e, 0, NAN, NAN, elapsed(), ()))
        return root.state, trace

    queue = DilemmaQueue()
    cand, _ = greedy_rollout(adapter, root, queue, config, start_is_new=True)
    best = cand
    best_e = float(adapter.energy(cand.state))
    trace.records.append(IterationRecord(0, best_e, best_e, 0, NAN, NAN, elapsed(), cand.path))

    for it in range(1, config.max_iterations + 1):
        if not queue:
            break
        if config.time_budget_ms is not None and elapsed() >= config.time_budget_ms:
            break
        node, score, gap = select(queue)
        cand, _ = greedy_rollout(adapter, node, queue, config)
        e = float(adapter.energy(cand.state))
        if e < best_e:
            best, best_e = cand, e
        trace.records.append(IterationRecord(it, e, best_e, node.depth, score, gap, elapsed(), cand.path))
    return best.state, trace


def dfs_search(adapter: ProblemAdapter, config: SearchConfig):
    """Dilemma First Search. Returns ``(best_state, trace)``."""
    trace = Trace("dfs", None, None, config.depth_const, config.epsilon)
    return _search(adapter, config, trace, DilemmaQueue.pop)


def rss_search(adapter: ProblemAdapter, config: SearchConfig):
    """Random state selection baseline, reproducible through ``config.seed``."""
    if config.seed is None:
        raise ConfigError("rss_search requires a seed")
    rng = np.random.Generator(np.random.PCG64(config.seed))
    trace = Trace("rss", config.seed, RNG_NAME, config.depth_const, config.epsilon)
    return _search(adapter, config, trace, lambda q: q.pop_random(rng))


def greedy_only(adapter: ProblemAdapter, config: Optional[SearchConfig] = None):
    """The iteration-0 candidate alone, wrapped in a one-record trace."""
    config = config or SearchConfig()
    t0 = time.perf_counter()
    state, path = greedy_search(adapter)
    e = float(adapter.energy(state))
    trace = Trace("greedy", None, None, config.depth_const, config.epsilon)
    trace.records.append(IterationRecord(0, e, e, 0, NAN, NAN,
                                         int((time.perf_counter() - t0) * 1000), path))
    return state, trace
