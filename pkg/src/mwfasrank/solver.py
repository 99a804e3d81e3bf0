"""Minimum weighted feedback arc set: local-ratio heuristic and an exact oracle."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import get_backend
from .graph import WeightedDigraph, WeightedEdge

LOCAL_RATIO = "local-ratio-heuristic"
EXACT = "exact-bruteforce"


class GraphTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class SolverStrategy:
    tag: str = LOCAL_RATIO
    zero_threshold: float = 1e-9
    max_exact_vertices: int = 10
    incremental: bool = True

    def __post_init__(self):
        if self.tag not in (LOCAL_RATIO, EXACT):
            raise ValueError(f"unknown solver strategy {self.tag!r}")
        if self.zero_threshold < 0:
            raise ValueError("zero_threshold must be non-negative")

    def solve(self, graph: WeightedDigraph, backend: str | None = None) -> FeedbackArcResult:
        if self.tag == EXACT:
            return solve_exact(graph, self.max_exact_vertices)
        return solve_local_ratio(graph, self.zero_threshold, self.incremental, backend)


@dataclass
class FeedbackArcResult:
    residual_dag: WeightedDigraph
    removed_edges: list[WeightedEdge] = field(default_factory=list)
    removed_weight: float = 0.0
    order: list[int] | None = None  # only set by the exact solver


def _split(graph, keep_mask, indptr, indices, weights):
    residual = graph.empty_like()
    removed = []
    for u in range(graph.n):
        for k in range(indptr[u], indptr[u + 1]):
            v, w = int(indices[k]), float(weights[k])
            if keep_mask[k]:
                residual.add_edge(u, v, w)
            else:
                removed.append(WeightedEdge(u, v, w))
    return residual, removed


def solve_local_ratio(
    graph: WeightedDigraph,
    zero_threshold: float = 1e-9,
    incremental: bool = True,
    backend: str | None = None,
) -> FeedbackArcResult:
    """Local-ratio cycle cancellation followed by heaviest-first reinsertion.

    While a cycle exists (first one found by ascending-id DFS), subtract the
    cycle's minimum residual weight from each of its edges and delete those
    left at or below ``zero_threshold``.  Deleted edges are then offered back
    by decreasing original weight, ties by ascending ``(src, dst)``; each one
    that does not close a cycle is restored.  Every weight in the result is
    the original one.

    ``incremental`` resumes the DFS after each cancellation instead of
    restarting it; both modes visit the same cycles.
    """
    if zero_threshold < 0:
        raise ValueError("zero_threshold must be non-negative")
    core = get_backend(backend)
    indptr, indices, weights = graph.to_csr()
    removed = core.cancel_cycles(indptr, indices, weights, float(zero_threshold), bool(incremental))
    removed = np.asarray(removed, dtype=np.uint8)
    cut = np.flatnonzero(removed)
    # edge ids are already in (src, dst) order; lexsort is stable on the last key
    candidates = cut[np.lexsort((cut, -weights[cut]))].astype(np.int64)
    alive = (1 - removed).astype(np.uint8)
    alive = np.asarray(core.reinsert(indptr, indices, alive, candidates), dtype=np.uint8)

    residual, removed_edges = _split(graph, alive, indptr, indices, weights)
    return FeedbackArcResult(
        residual_dag=residual,
        removed_edges=removed_edges,
        removed_weight=math.fsum(e.weight for e in removed_edges),
    )


def backward_weight(graph: WeightedDigraph, order: list[int]) -> float:
    pos = {v: i for i, v in enumerate(order)}
    return math.fsum(e.weight for e in graph.edges() if pos[e.src] > pos[e.dst])


def solve_exact(graph: WeightedDigraph, max_vertices: int = 10) -> FeedbackArcResult:
    """Optimal feedback arc set by enumerating every vertex ordering.

    The feedback set of an ordering is its backward edges.  Among optimal
    orderings the lexicographically smallest wins.
    """
    n = graph.n
    if n > max_vertices:
        raise GraphTooLargeError(f"exact solver limited to {max_vertices} vertices, got {n}")
    edges = list(graph.edges())
    if n == 0 or not edges:
        return FeedbackArcResult(graph.copy(), [], 0.0, list(range(n)))

    src = np.array([e.src for e in edges])
    dst = np.array([e.dst for e in edges])
    w = np.array([e.weight for e in edges])
    tol = 1e-12 * w.sum()

    best_cost = math.inf
    best_order = None
    perms = itertools.permutations(range(n))
    chunk = 50_000
    while True:
        block = np.array(list(itertools.islice(perms, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        pos = np.empty_like(block)
        rows = np.arange(len(block))[:, None]
        pos[rows, block] = np.arange(n)
        cost = (pos[:, src] > pos[:, dst]) @ w
        # permutations arrive in lexicographic order: keep the first optimum seen
        i = int(np.flatnonzero(cost <= cost.min() + tol)[0])
        if cost[i] < best_cost - tol:
            best_cost = float(cost[i])
            best_order = [int(x) for x in block[i]]

    pos = {v: i for i, v in enumerate(best_order)}
    residual = graph.empty_like()
    removed = []
    for e in edges:
        if pos[e.src] > pos[e.dst]:
            removed.append(e)
        else:
            residual.add_edge(e.src, e.dst, e.weight)
    return FeedbackArcResult(residual, removed, math.fsum(e.weight for e in removed), best_order)


def longest_cycle_length(graph: WeightedDigraph) -> int:
    """Number of edges on the longest simple directed cycle (0 for a DAG).

    Exhaustive search; only meant for the small graphs used with the oracle.
    """
    best = 0
    n = graph.n
    for start in range(n):
        # cycles whose smallest vertex is ``start``
        stack = [(start, iter(graph.successors(start)))]
        on_path = {start}
        while stack:
            v, nbrs = stack[-1]
            for w in nbrs:
                if w == start:
                    best = max(best, len(stack))
                elif w > start and w not in on_path:
                    on_path.add(w)
                    stack.append((w, iter(graph.successors(w))))
                    break
            else:
                stack.pop()
                on_path.discard(v)
    return best
