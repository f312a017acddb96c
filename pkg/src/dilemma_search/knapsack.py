"""0-1 knapsack as a sequence-of-actions problem, plus exact oracles.

An action adds one item; its heuristic is the value/weight ratio of the item
when it fits and 0 otherwise. Items that do not fit are not offered at all, so
a state is a candidate exactly when nothing more can be added.

With ``canonical=True`` (the default) an action also rules out every item that
was ranked above it at the same state. Each subset is then reached by exactly
one path instead of once per ordering of its items; the greedy path and the
optimum are unaffected because greedy always takes the top-ranked item.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .core import ProblemAdapter
from .errors import CapacityOverflow, DomainError, IllegalAction, NotCandidate, TooLarge

DP_CELL_LIMIT = 50_000_000
BRUTE_FORCE_MAX_ITEMS = 24


@dataclass(frozen=True)
class Item:
    id: int
    value: int
    weight: int

    def __post_init__(self):
        if self.value < 0:
            raise DomainError(f"item {self.id}: value must be >= 0")
        if self.weight < 1:
            raise DomainError(f"item {self.id}: weight must be >= 1")


@dataclass(frozen=True)
class KnapsackInstance:
    items: tuple
    capacity: int

    def __post_init__(self):
        if self.capacity < 1:
            raise DomainError("capacity must be >= 1")
        for k, item in enumerate(self.items):
            if item.id != k:
                raise DomainError(f"item ids must be dense from 0, found {item.id} at position {k}")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple], capacity: int) -> "KnapsackInstance":
        """Build from ``(value, weight)`` pairs; ids follow list order."""
        return cls(tuple(Item(i, int(v), int(w)) for i, (v, w) in enumerate(pairs)), int(capacity))

    @property
    def n(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class KnapsackState:
    selected: tuple = ()
    used_weight: int = 0
    total_value: int = 0
    excluded: frozenset = field(default_factory=frozenset)
    _fitting: Optional[list] = field(default=None, compare=False, repr=False)


def ks_heuristic(item: Item, state: KnapsackState, W: int) -> float:
    if state.used_weight + item.weight <= W:
        return item.value / item.weight
    return 0.0


def ks_scored_actions(state: KnapsackState, instance: KnapsackInstance) -> list:
    """Fitting, not-yet-selected items as ``(id, ratio)``, best ratio first."""
    room = instance.capacity - state.used_weight
    taken = set(state.selected) | state.excluded
    actions = [(it.id, ks_heuristic(it, state, instance.capacity))
               for it in instance.items if it.id not in taken and it.weight <= room]
    actions.sort(key=lambda a: (-a[1], a[0]))
    return actions


def ks_energy(state: KnapsackState, instance: Optional[KnapsackInstance] = None) -> float:
    """Negated packed value. With ``instance`` given, non-candidates are rejected."""
    if instance is not None and ks_scored_actions(state, instance):
        raise NotCandidate("an item still fits into the knapsack")
    return -float(state.total_value)


def ks_greedy(instance: KnapsackInstance) -> tuple:
    """Classic ratio greedy: returns ``(value, chosen ids in pick order)``."""
    order = sorted(instance.items, key=lambda it: (-(it.value / it.weight), it.id))
    room = instance.capacity
    value = 0
    chosen = []
    for it in order:
        if it.weight <= room:
            chosen.append(it.id)
            room -= it.weight
            value += it.value
    return value, tuple(chosen)


def ks_dp_oracle(instance: KnapsackInstance, cell_limit: int = DP_CELL_LIMIT) -> int:
    """Exact optimum through the O(n*W) value table."""
    W = instance.capacity
    if instance.n * (W + 1) > cell_limit:
        raise CapacityOverflow(f"n*W = {instance.n * (W + 1)} cells exceeds limit {cell_limit}")
    best = np.zeros(W + 1, dtype=np.int64)
    for it in instance.items:
        if it.weight <= W:
            # rolling row: best[c] = max(best[c], best[c - w] + v), right-hand side is the previous row
            cand = best[: W + 1 - it.weight] + it.value
            best[it.weight:] = np.maximum(best[it.weight:], cand)
    return int(best[W])


def ks_brute_force_oracle(instance: KnapsackInstance) -> int:
    """Best feasible value over all 2^n subsets."""
    n = instance.n
    if n > BRUTE_FORCE_MAX_ITEMS:
        raise TooLarge(f"brute force limited to {BRUTE_FORCE_MAX_ITEMS} items, got {n}")
    if n == 0:
        return 0
    w = np.array([it.weight for it in instance.items], dtype=np.int64)
    v = np.array([it.value for it in instance.items], dtype=np.int64)
    n_lo = min(n, 16)
    masks = np.arange(1 << n_lo, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n_lo)) & 1).astype(np.int64)
    lo_w = bits @ w[:n_lo]
    lo_v = bits @ v[:n_lo]
    best = 0
    for hi in range(1 << (n - n_lo)):
        hi_bits = [(hi >> k) & 1 for k in range(n - n_lo)]
        hw = sum(b * int(x) for b, x in zip(hi_bits, w[n_lo:]))
        hv = sum(b * int(x) for b, x in zip(hi_bits, v[n_lo:]))
        feasible = lo_w + hw <= instance.capacity
        if feasible.any():
            best = max(best, int((lo_v[feasible] + hv).max()))
    return best


def generate_instance(n: int, seed: int, max_value: int = 100, max_weight: int = 100,
                      fill: float = 0.5) -> KnapsackInstance:
    """Uncorrelated random instance with capacity ``ceil(fill * total weight)``."""
    rng = np.random.default_rng(seed)
    v = rng.integers(1, max_value + 1, size=n)
    w = rng.integers(1, max_weight + 1, size=n)
    return KnapsackInstance.from_pairs(zip(v.tolist(), w.tolist()), max(1, math.ceil(fill * int(w.sum()))))


class KnapsackAdapter(ProblemAdapter):
    def __init__(self, instance: KnapsackInstance, canonical: bool = True):
        self.instance = instance
        self.canonical = canonical
        self._ratio = [it.value / it.weight for it in instance.items]
        self._weights = np.array([it.weight for it in instance.items], dtype=np.int64)
        order = sorted(range(instance.n), key=lambda i: (-self._ratio[i], i))
        self._order = np.array(order, dtype=np.int64)

    def _fitting(self, state: KnapsackState) -> list:
        if state._fitting is not None:
            return state._fitting
        blocked = bytearray(self.instance.n)
        for i in state.selected:
            blocked[i] = 1
        for i in state.excluded:
            blocked[i] = 1
        fitting = kernels.fitting_items(self._order, self._weights, blocked,
                                        self.instance.capacity - state.used_weight)
        # states are immutable and owned by one adapter, so the memo never goes stale
        object.__setattr__(state, "_fitting", fitting)
        return fitting

    def initial_state(self) -> KnapsackState:
        return KnapsackState()

    def scored_actions(self, state: KnapsackState) -> list:
        return [(i, self._ratio[i]) for i in self._fitting(state)]

    def apply(self, state: KnapsackState, action: int) -> KnapsackState:
        fitting = self._fitting(state)
        try:
            k = fitting.index(action)
        except ValueError:
            raise IllegalAction(f"item {action} cannot be added") from None
        item = self.instance.items[action]
        excluded = state.excluded | frozenset(fitting[:k]) if self.canonical else state.excluded
        return KnapsackState(state.selected + (action,), state.used_weight + item.weight,
                             state.total_value + item.value, excluded)

    def is_candidate(self, state: KnapsackState) -> bool:
        return not self._fitting(state)

    def energy(self, state: KnapsackState) -> float:
        if not self.is_candidate(state):
            raise NotCandidate("an item still fits into the knapsack")
        return -float(state.total_value)
