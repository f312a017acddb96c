import heapq
import itertools
from pathlib import Path

import pytest

from dilemma_search.core import ProblemAdapter

DATA = Path(__file__).resolve().parents[1] / "src" / "dilemma_search" / "data"


class TableAdapter(ProblemAdapter):
    """Explicit search tree: ``children[path] = [(action, score), ...]``, leaves carry energies."""

    def __init__(self, children, energies):
        self.children = children
        self.energies = energies

    def initial_state(self):
        return ()

    def scored_actions(self, state):
        return sorted(self.children.get(state, []), key=lambda a: (-a[1], a[0]))

    def apply(self, state, action):
        return state + (action,)

    def is_candidate(self, state):
        return state in self.energies

    def energy(self, state):
        return self.energies[state]


class ChainAdapter(TableAdapter):
    """Exactly one action per state, ``length`` steps long."""

    def __init__(self, length):
        children = {}
        path = ()
        for k in range(length):
            children[path] = [(k, 1.0)]
            path = path + (k,)
        super().__init__(children, {path: 7.0})


def random_table(rng, max_depth=4, max_branch=3):
    """Random finite tree with integer-ish scores (ties included) and random leaf energies."""
    children, energies = {}, {}

    def grow(path, depth):
        k = rng.randint(1, max_branch) if depth < max_depth else 0
        if depth > 0 and rng.random() < 0.25:
            k = 0
        if k == 0:
            energies[path] = float(rng.randint(-20, 20))
            return
        actions = [(a, float(rng.randint(0, 4)) / 4) for a in range(k)]
        children[path] = actions
        for a, _ in actions:
            grow(path + (a,), depth + 1)

    grow((), 0)
    return TableAdapter(children, energies)


def reference_dfs_paths(adapter, max_iterations, epsilon=1e-12):
    """Independent DFS keyed by the largest 1/(gap + epsilon); returns candidate paths in visit order."""
    heap = []
    counter = itertools.count()

    def gap(node):
        acts, k = node["actions"], node["k"]
        return acts[k][1] - (acts[k + 1][1] if k + 1 < len(acts) else 0.0)

    def push(node):
        heapq.heappush(heap, (-1.0 / (gap(node) + epsilon), next(counter), id(node), node))

    def new(state, path):
        return {"state": state, "path": path, "actions": list(adapter.scored_actions(state)), "k": 0}

    def rollout(start, fresh):
        if fresh and len(start["actions"]) >= 2 and not adapter.is_candidate(start["state"]):
            push(start)
        node = start
        while not adapter.is_candidate(node["state"]):
            action = node["actions"][node["k"]][0]
            node["k"] += 1
            child = new(adapter.apply(node["state"], action), node["path"] + (action,))
            if not adapter.is_candidate(child["state"]) and len(child["actions"]) >= 2:
                push(child)
            node = child
        if not fresh and start["k"] < len(start["actions"]):
            push(start)
        return node["path"]

    visited = [rollout(new(adapter.initial_state(), ()), True)]
    for _ in range(max_iterations):
        if not heap:
            break
        node = heapq.heappop(heap)[3]
        visited.append(rollout(node, False))
    return visited


@pytest.fixture
def worked_instance():
    from dilemma_search.knapsack import KnapsackInstance
    return KnapsackInstance.from_pairs([(10, 5), (7, 4), (6, 4)], 8)
