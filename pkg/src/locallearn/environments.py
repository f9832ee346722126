"""Payoff adversaries: max cut, cluster-edge payoffs, random payoffs.

All shipped adversaries are oblivious: the payoff sequence is fixed before
play, and the full block is revealed after the learner commits to labels
(full-information setting).  The Environment contract still routes the
learner's labels through reveal(), so an adaptive adversary could plug in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .graphs import Graph
from .polytope import ProblemDims


@dataclass(frozen=True)
class PayoffFunction:
    """One round: the queried pair and its L x L payoff block in [-1, 1]."""

    pair: tuple[int, int]
    block: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "block",
                           np.asarray(self.block, dtype=float))
        i, j = self.pair
        if i == j:
            raise ValueError("payoff pair must consist of distinct items")
        if np.max(np.abs(self.block)) > 1.0:
            raise ValueError("payoff entries must lie in [-1, 1]")


@dataclass(frozen=True)
class Round:
    pair: tuple[int, int]
    reveal: Callable[[int, int], PayoffFunction]


class Environment:
    """A fixed-length sequence of rounds."""

    def __init__(self, dims: ProblemDims, rounds: Sequence[PayoffFunction]):
        self.dims = dims
        self._rounds = list(rounds)

    @property
    def num_rounds(self) -> int:
        return len(self._rounds)

    def payoffs(self) -> list[PayoffFunction]:
        """The full oblivious payoff sequence (for oracles and replay)."""
        return list(self._rounds)

    def __iter__(self) -> Iterator[Round]:
        for pf in self._rounds:
            yield Round(pf.pair, lambda a, b, pf=pf: pf)


def maxcut_env(graph: Graph, order: Sequence[tuple[int, int]] | None = None,
               ) -> Environment:
    """Online max cut: payoff 1 when the two endpoints get different labels.

    `order` is the played edge sequence (repeats allowed); defaults to the
    graph's edges in lexicographic order.
    """
    dims = ProblemDims(graph.n, 2)
    block = np.array([[0.0, 1.0], [1.0, 0.0]])
    if order is None:
        order = graph.edges()
    rounds = []
    for u, v in order:
        if not graph.has_edge(u, v):
            raise ValueError(f"({u}, {v}) is not an edge")
        rounds.append(PayoffFunction((u, v), block))
    return Environment(dims, rounds)


def cluster_edge_env(graph: Graph, partition) -> Environment:
    """One round per unordered cluster pair, in lexicographic order.

    The payoff for labels (a, b) on cluster pair (i, j) is 1 when the a-th
    vertex of cluster i is adjacent to the b-th vertex of cluster j.
    """
    clusters = partition.clusters
    sizes = {len(c) for c in clusters}
    if len(sizes) != 1:
        raise ValueError("all clusters must have equal size")
    seen: set[int] = set()
    for c in clusters:
        for v in c:
            if v in seen:
                raise ValueError(f"vertex {v} appears in two clusters")
            seen.add(v)
    L = sizes.pop()
    dims = ProblemDims(len(clusters), L)
    rounds = []
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            block = graph.adj[np.ix_(clusters[i], clusters[j])].astype(float)
            rounds.append(PayoffFunction((i, j), block))
    return Environment(dims, rounds)


def random_env(dims: ProblemDims, T: int,
               rng: np.random.Generator) -> Environment:
    """T rounds of uniform random pairs and i.i.d. uniform[-1,1] blocks."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    if dims.n_items < 2:
        raise ValueError("random_env needs at least two items")
    L = dims.n_labels
    rounds = []
    for _ in range(T):
        i, j = sorted(rng.choice(dims.n_items, size=2, replace=False).tolist())
        block = rng.uniform(-1.0, 1.0, size=(L, L))
        rounds.append(PayoffFunction((i, j), block))
    return Environment(dims, rounds)
