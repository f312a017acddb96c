"""Dilemma First Search: anytime search that revisits the hardest decisions first."""
from .core import (DilemmaQueue, IterationRecord, ProblemAdapter, SearchConfig, SearchNode, Trace,
                   candidate_log_prob, dfs_search, dilemma_estimator, enumerate_candidates, greedy_only,
                   greedy_rollout, greedy_search, rss_search, selection_score)
from .kernels import BACKEND

__version__ = "0.1.0"
