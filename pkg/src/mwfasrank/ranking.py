"""Rankings from an acyclic residual graph via a priority-driven topological sort."""

from __future__ import annotations

import heapq
import io
import os
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .graph import CyclicGraphError, WeightedDigraph


@dataclass
class Ranking:
    """``order[0]`` is the best vertex; ``rank`` is 1-based; ``scores`` decrease along ``order``."""

    order: list[int]
    rank: np.ndarray
    scores: np.ndarray

    @classmethod
    def from_order(cls, order: Iterable[int]) -> Ranking:
        order = [int(v) for v in order]
        n = len(order)
        if sorted(order) != list(range(n)):
            raise ValueError("order is not a permutation of 0..n-1")
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(1, n + 1)
        return cls(order, rank, (n - rank + 1).astype(np.float64))

    @property
    def n(self) -> int:
        return len(self.order)

    def with_scores(self, scores) -> Ranking:
        scores = np.asarray(scores, dtype=np.float64)
        return Ranking(list(self.order), self.rank.copy(), scores.copy())

    def check(self) -> None:
        """Raise ``ValueError`` if the invariants between order, rank and scores fail."""
        n = self.n
        if sorted(self.order) != list(range(n)):
            raise ValueError("order is not a permutation")
        if any(self.rank[v] != k + 1 for k, v in enumerate(self.order)):
            raise ValueError("rank does not match order")
        s = self.scores[self.order]
        if np.any(s[:-1] <= s[1:]):
            raise ValueError("scores do not strictly decrease along order")


def tiebreak_score(vertex: int, original: WeightedDigraph) -> float:
    """Net out-weight over total (unweighted) degree; 0 for an isolated vertex."""
    out_w = sum(original.succ[vertex].values())
    in_w = sum(original.pred[vertex].values())
    deg = len(original.succ[vertex]) + len(original.pred[vertex])
    if deg == 0:
        return 0.0
    return (out_w - in_w) / deg


def topological_rank(residual: WeightedDigraph, original: WeightedDigraph) -> Ranking:
    """Kahn's algorithm with the ready set ordered by tie-break score.

    Among available vertices the one with the highest score on ``original``
    goes first; equal scores go to the higher vertex id.  The score vector is
    ``n - rank + 1``.
    """
    n = residual.n
    if original.n != n:
        raise ValueError("residual and original graphs differ in vertex count")
    indeg = [len(residual.pred[v]) for v in range(n)]
    heap = [(-tiebreak_score(v, original), -v) for v in range(n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, neg_v = heapq.heappop(heap)
        v = -neg_v
        order.append(v)
        for w in residual.succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, (-tiebreak_score(w, original), -w))
    if len(order) != n:
        raise CyclicGraphError("residual graph has a cycle; cannot sort topologically")
    return Ranking.from_order(order)


def write_ranking(ranking: Ranking, labels: list[str], fh: TextIO) -> None:
    """``<label> <rank> <score>`` lines, best first."""
    for v in ranking.order:
        fh.write(f"{labels[v]} {int(ranking.rank[v])} {float(ranking.scores[v])!r}\n")


def read_ranking(source: TextIO | str | os.PathLike, graph: WeightedDigraph) -> Ranking:
    """Parse a ranking file written by :func:`write_ranking` against ``graph``'s labels.

    Every vertex of ``graph`` must appear exactly once.  Lines may come in any
    order; the order is rebuilt from the rank column.
    """
    if isinstance(source, (str, os.PathLike)) and not isinstance(source, io.IOBase):
        with open(source, encoding="utf-8") as fh:
            return read_ranking(fh, graph)
    ids = graph.label_map
    n = graph.n
    rank = np.zeros(n, dtype=np.int64)
    scores = np.zeros(n, dtype=np.float64)
    seen = set()
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ValueError(f"line {lineno}: expected '<label> <rank> <score>'")
        label, r, s = fields
        if label not in ids:
            raise ValueError(f"line {lineno}: unknown label {label!r}")
        v = ids[label]
        if v in seen:
            raise ValueError(f"line {lineno}: label {label!r} repeated")
        seen.add(v)
        rank[v] = int(r)
        scores[v] = float(s)
    if len(seen) != n:
        raise ValueError(f"ranking covers {len(seen)} of {n} vertices")
    if sorted(rank.tolist()) != list(range(1, n + 1)):
        raise ValueError("ranks must be a permutation of 1..n")
    order = [int(v) for v in np.argsort(rank, kind="stable")]
    return Ranking(order, rank, scores)
