"""Combinatorial spanning trees over point indices and exact EMSTs.

Trees are edge sets over vertex indices 0..n-1; geometry enters only
through a PointConfig (positions at one instant). The EMST uses a
Kruskal sweep ordered by (length, u, v), which pins a deterministic
tie-break: among equal-weight choices the lexicographically smallest
sorted edge list wins.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .errors import ParameterError, SizeError


def _norm_edge(e):
    u, v = e
    if u == v:
        raise ParameterError("self-loop edge")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SpanningTree:
    """A spanning tree on n vertices: exactly n-1 edges, connected."""

    n: int
    edges: frozenset

    def __init__(self, n: int, edges):
        norm = frozenset(_norm_edge(e) for e in edges)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", norm)
        if len(norm) != n - 1:
            raise ParameterError(f"spanning tree on {n} vertices needs {n - 1} edges")
        if any(u < 0 or v >= n for u, v in norm):
            raise ParameterError("edge endpoint out of range")
        if not self._connected():
            raise ParameterError("edge set does not connect all vertices")

    def _connected(self) -> bool:
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def has_edge(self, e) -> bool:
        return _norm_edge(e) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def replace(self, old, new) -> "SpanningTree":
        """Tree with `old` removed and `new` inserted (validated)."""
        old = _norm_edge(old)
        new = _norm_edge(new)
        if old not in self.edges:
            raise ParameterError("edge to remove is not in the tree")
        return SpanningTree(self.n, (self.edges - {old}) | {new})

    def serialize(self) -> str:
        """Edge-list text, one 'u v' line per edge, lexicographic order."""
        return "\n".join(f"{u} {v}" for u, v in self.sorted_edges())

    @staticmethod
    def deserialize(text: str, n: int) -> "SpanningTree":
        edges = []
        for line in text.strip().splitlines():
            u, v = line.split()
            edges.append((int(u), int(v)))
        return SpanningTree(n, edges)


@dataclass(frozen=True)
class PointConfig:
    """Positions of n points in R^d at a fixed time."""

    positions: np.ndarray

    def __init__(self, positions):
        pos = np.atleast_2d(np.asarray(positions, dtype=float))
        if not np.all(np.isfinite(pos)):
            raise ParameterError("positions must be finite")
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def distance(self, u: int, v: int) -> float:
        return float(np.linalg.norm(self.positions[u] - self.positions[v]))


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def emst(cfg: PointConfig) -> SpanningTree:
    """Euclidean minimum spanning tree with the deterministic tie rule."""
    n = cfg.n
    if n < 2:
        raise ParameterError("EMST needs at least 2 points")
    pos = cfg.positions
    iu, ju = np.triu_indices(n, k=1)
    lengths = np.linalg.norm(pos[iu] - pos[ju], axis=1)
    order = np.lexsort((ju, iu, lengths))
    dsu = _DSU(n)
    edges = []
    for idx in order:
        u, v = int(iu[idx]), int(ju[idx])
        if dsu.union(u, v):
            edges.append((u, v))
            if len(edges) == n - 1:
                break
    return SpanningTree(n, edges)


def tree_length(cfg: PointConfig, tree: SpanningTree) -> float:
    """Total Euclidean length of the tree's edges."""
    if tree.n != cfg.n:
        raise ParameterError("tree and configuration vertex counts differ")
    return float(sum(cfg.distance(u, v) for u, v in tree.edges))


def fundamental_cycle(tree: SpanningTree, new_edge) -> list[int]:
    """Vertices of the unique cycle of tree + new_edge.

    Returned as the tree path from one endpoint of new_edge to the other,
    so the list starts and ends at the inserted edge's endpoints.
    """
    a, b = _norm_edge(new_edge)
    if tree.has_edge((a, b)):
        raise ParameterError("edge already in tree")
    adj = tree.adjacency()
    parent = {a: None}
    stack = [a]
    while stack:
        v = stack.pop()
        if v == b:
            break
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                stack.append(w)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def two_coloring(tree: SpanningTree) -> np.ndarray:
    """Proper 2-coloring; color 0 ('red') at vertex 0."""
    colors = np.full(tree.n, -1, dtype=int)
    colors[0] = 0
    adj = tree.adjacency()
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if colors[w] < 0:
                colors[w] = 1 - colors[v]
                stack.append(w)
    return colors


def tree_from_prufer(seq, n: int) -> SpanningTree:
    """Labeled tree for a Prüfer sequence over vertices 0..n-1."""
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((u, v))
    return SpanningTree(n, edges)


def enumerate_spanning_trees(n: int):
    """All n^(n-2) labeled trees on n vertices (n <= 8)."""
    if n > 8:
        raise SizeError("exhaustive tree enumeration capped at n=8")
    if n < 2:
        raise ParameterError("need at least 2 vertices")
    if n == 2:
        return [SpanningTree(2, [(0, 1)])]
    return [tree_from_prufer(seq, n) for seq in product(range(n), repeat=n - 2)]


def min_tree_by_enumeration(cfg: PointConfig) -> tuple[float, SpanningTree]:
    """Brute-force EMST oracle: scan every labeled tree (n <= 8)."""
    best = None
    best_len = np.inf
    for tree in enumerate_spanning_trees(cfg.n):
        length = tree_length(cfg, tree)
        if length < best_len:
            best, best_len = tree, length
    return best_len, best


def all_pairs(n: int):
    """Sorted list of all unordered index pairs."""
    return list(combinations(range(n), 2))
