"""Undirected simple graphs and the plain-text edge-list format."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Graph:
    """Simple undirected graph on vertices 0..n-1 with a dense adjacency."""

    n: int
    adj: np.ndarray

    def __post_init__(self) -> None:
        self.adj = np.asarray(self.adj, dtype=bool)
        if self.adj.shape != (self.n, self.n):
            raise ValueError("adjacency shape does not match n")
        if not np.array_equal(self.adj, self.adj.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(self.adj)):
            raise ValueError("self-loops are not allowed")

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self.adj, k=1))
        return list(zip(us.tolist(), vs.tolist()))

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adj, k=1)))


def from_edges(n: int, edges) -> Graph:
    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        adj[u, v] = adj[v, u] = True
    return Graph(n, adj)


def read_graph(path) -> Graph:
    """Read `n m` then m lines `u v` (0-based, undirected)."""
    with open(path) as fh:
        n, m = map(int, fh.readline().split())
        edges = [tuple(map(int, fh.readline().split())) for _ in range(m)]
    g = from_edges(n, edges)
    if g.num_edges != m:
        raise ValueError("duplicate edges in graph file")
    return g


def write_graph(graph: Graph, path) -> None:
    edges = graph.edges()
    with open(path, "w") as fh:
        fh.write(f"{graph.n} {len(edges)}\n")
        for u, v in edges:
            fh.write(f"{u} {v}\n")
