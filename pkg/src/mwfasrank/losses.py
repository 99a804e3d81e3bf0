"""Upset losses of a ranking against the comparison graph.

Naive, simple and ratio upset losses compare the score-difference matrix
``T1 = r 1^T - 1 r^T`` with ``M1 = A - A^T``; ratio loss also normalises
both by ``T2 = r 1^T + 1 r^T + eps`` and ``M2 = A + A^T + eps``.  The
weighted and margin losses only look at the integer ranks.

Everything is computed pair-wise from the edge list; no n x n matrix is
materialised.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .graph import WeightedDigraph
from .ranking import Ranking

DEFAULT_EPSILON = 1e-6


class UndefinedMetricError(ValueError):
    """The loss has an empty normaliser (no comparisons)."""


class NumericDomainError(ArithmeticError):
    """A ratio-loss denominator vanished."""


class ComparisonMatrix:
    """Sparse view of the comparison matrix ``A`` as unordered pairs.

    For each pair ``i < j`` with an edge in either direction, ``a_ij`` and
    ``a_ji`` hold ``A[i, j]`` and ``A[j, i]``.
    """

    def __init__(self, n: int, i, j, a_ij, a_ji):
        self.n = int(n)
        self.i = np.asarray(i, dtype=np.int64)
        self.j = np.asarray(j, dtype=np.int64)
        self.a_ij = np.asarray(a_ij, dtype=np.float64)
        self.a_ji = np.asarray(a_ji, dtype=np.float64)

    @classmethod
    def from_graph(cls, graph: WeightedDigraph) -> ComparisonMatrix:
        pairs: dict[tuple[int, int], list[float]] = {}
        for e in graph.edges():
            if e.src < e.dst:
                pairs.setdefault((e.src, e.dst), [0.0, 0.0])[0] = e.weight
            else:
                pairs.setdefault((e.dst, e.src), [0.0, 0.0])[1] = e.weight
        keys = sorted(pairs)
        vals = np.array([pairs[k] for k in keys]).reshape(-1, 2)
        i = [k[0] for k in keys]
        j = [k[1] for k in keys]
        return cls(graph.n, i, j, vals[:, 0], vals[:, 1])

    @classmethod
    def from_dense(cls, a) -> ComparisonMatrix:
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("comparison matrix must be square")
        if np.any(a < 0) or np.any(np.diag(a) != 0):
            raise ValueError("comparison matrix must be non-negative with zero diagonal")
        iu, ju = np.triu_indices(a.shape[0], k=1)
        upper, lower = a[iu, ju], a[ju, iu]
        keep = (upper > 0) | (lower > 0)
        return cls(a.shape[0], iu[keep], ju[keep], upper[keep], lower[keep])

    def dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self.i, self.j] = self.a_ij
        a[self.j, self.i] = self.a_ji
        return a

    @property
    def m(self) -> np.ndarray:
        """``M1[i, j]`` per pair."""
        return self.a_ij - self.a_ji

    @property
    def s(self) -> np.ndarray:
        """``A[i, j] + A[j, i]`` per pair (``M2`` without eps)."""
        return self.a_ij + self.a_ji

    def support(self) -> np.ndarray:
        return self.m != 0

    @property
    def t(self) -> int:
        """Number of nonzero entries of ``M1`` (ordered pairs, always even)."""
        return 2 * int(np.count_nonzero(self.support()))


def as_comparison(a) -> ComparisonMatrix:
    if isinstance(a, ComparisonMatrix):
        return a
    if isinstance(a, WeightedDigraph):
        return ComparisonMatrix.from_graph(a)
    return ComparisonMatrix.from_dense(a)


def _prepare(a, scores):
    cm = as_comparison(a)
    r = np.asarray(scores, dtype=np.float64)
    if r.shape != (cm.n,):
        raise ValueError(f"expected {cm.n} scores, got shape {r.shape}")
    t = cm.t
    if t == 0:
        raise UndefinedMetricError("no pair with a net preference; loss undefined")
    sup = cm.support()
    return cm, r, t, cm.i[sup], cm.j[sup], cm.m[sup], cm.s[sup]


def loss_naive(a, scores) -> float:
    """Fraction of nonzero ``M1`` entries whose sign disagrees with ``T1``."""
    cm, r, t, i, j, m, _ = _prepare(a, scores)
    wrong = np.sign(r[i] - r[j]) != np.sign(m)
    return 2.0 * np.count_nonzero(wrong) / t


def loss_simple(a, scores, full_matrix: bool = False) -> float:
    """``||sign(T1) - sign(M1)||_F^2 / t``.

    By default the norm runs over the entries where ``M1`` is nonzero.  With
    ``full_matrix=True`` every entry counts, so pairs with ``M1 = 0`` add 1
    whenever their scores differ.
    """
    cm, r, t, i, j, m, _ = _prepare(a, scores)
    d = np.sign(r[i] - r[j]) - np.sign(m)
    total = 2.0 * float(np.sum(d * d))
    if full_matrix:
        _, counts = np.unique(r, return_counts=True)
        distinct_ordered = cm.n * (cm.n - 1) - int(np.sum(counts * (counts - 1)))
        on_support = 2 * int(np.count_nonzero(r[i] != r[j]))
        total += distinct_ordered - on_support
    return total / t


def loss_ratio(a, scores, epsilon: float = DEFAULT_EPSILON) -> float:
    """Mean over nonzero ``M1`` entries of ``(T1/T2 - M1/M2)^2``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    cm, r, t, i, j, m, s = _prepare(a, scores)
    t2 = r[i] + r[j] + epsilon
    if np.any(t2 == 0):
        raise NumericDomainError("score sum plus epsilon is zero on a compared pair")
    d = (r[i] - r[j]) / t2 - m / (s + epsilon)
    return 2.0 * float(np.sum(d * d)) / t


def _ranks(ranking) -> np.ndarray:
    if isinstance(ranking, Ranking):
        return ranking.rank
    return np.asarray(ranking)


def _edge_arrays(graph: WeightedDigraph):
    indptr, dst, w = graph.to_csr()
    src = np.repeat(np.arange(graph.n), np.diff(indptr))
    return src, dst, w


def loss_weighted(graph: WeightedDigraph, ranking) -> float:
    """Share of total edge weight on edges the ranking places backwards."""
    pi = _ranks(ranking)
    src, dst, w = _edge_arrays(graph)
    total = w.sum()
    if len(w) == 0 or total <= 0:
        raise UndefinedMetricError("graph has no edges")
    return float(w[pi[src] > pi[dst]].sum() / total)


def loss_margin(graph: WeightedDigraph, ranking) -> float:
    """Weight times rank distance of violated edges over that of all edges."""
    pi = _ranks(ranking).astype(np.float64)
    src, dst, w = _edge_arrays(graph)
    gap = pi[src] - pi[dst]
    denom = float(np.sum(w * np.abs(gap)))
    if denom <= 0:
        raise UndefinedMetricError("no edge separates distinct ranks")
    return float(np.sum((w * gap)[gap > 0]) / denom)


@dataclass
class LossReport:
    naive: float
    simple: float
    ratio: float
    weighted: float
    margin: float
    t: int
    epsilon: float

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(
    graph: WeightedDigraph,
    ranking: Ranking,
    epsilon: float = DEFAULT_EPSILON,
    scores=None,
    simple_full_matrix: bool = False,
) -> LossReport:
    """All five losses; ``scores`` overrides ``ranking.scores`` for the score-based ones."""
    cm = ComparisonMatrix.from_graph(graph)
    r = ranking.scores if scores is None else scores
    return LossReport(
        naive=loss_naive(cm, r),
        simple=loss_simple(cm, r, full_matrix=simple_full_matrix),
        ratio=loss_ratio(cm, r, epsilon),
        weighted=loss_weighted(graph, ranking),
        margin=loss_margin(graph, ranking),
        t=cm.t,
        epsilon=epsilon,
    )
