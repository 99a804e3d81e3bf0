"""Weighted comparison digraphs: storage, edge-list ingestion and cycle queries.

An edge ``u -> v`` with weight ``w`` means item ``u`` was preferred over
item ``v`` with strength ``w``.  Vertices are dense integers ``0..n-1``;
the external labels seen at ingestion are kept in ``labels``.
"""

from __future__ import annotations

import io
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

import numpy as np

log = logging.getLogger(__name__)


class EdgeListError(ValueError):
    """Base class for edge-list ingestion failures."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class EdgeListParseError(EdgeListError):
    """A line does not have the ``src dst weight`` shape."""


class EdgeWeightError(EdgeListError):
    """A weight is not a finite positive number."""


class CyclicGraphError(ValueError):
    """An operation that needs a DAG received a graph with a cycle."""


@dataclass(frozen=True)
class WeightedEdge:
    src: int
    dst: int
    weight: float


class WeightedDigraph:
    """Directed graph with strictly positive edge weights.

    At most one edge per ordered pair.  ``succ[u]`` maps ``v -> w(u, v)`` and
    ``pred[v]`` mirrors it.
    """

    def __init__(self, n: int = 0, labels: Iterable[str] | None = None):
        if labels is None:
            labels = [str(i) for i in range(n)]
        self.labels: list[str] = list(labels)
        if len(self.labels) != n:
            raise ValueError(f"expected {n} labels, got {len(self.labels)}")
        self.succ: list[dict[int, float]] = [{} for _ in range(n)]
        self.pred: list[dict[int, float]] = [{} for _ in range(n)]
        self.dropped_self_loops = 0

    @property
    def n(self) -> int:
        return len(self.succ)

    @property
    def label_map(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"WeightedDigraph(n={self.n}, edges={self.num_edges()})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self.labels == other.labels and self.succ == other.succ

    def num_edges(self) -> int:
        return sum(len(s) for s in self.succ)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.succ[u]

    def weight(self, u: int, v: int) -> float:
        return self.succ[u][v]

    def add_edge(self, u: int, v: int, weight: float) -> None:
        if u == v:
            raise ValueError(f"self-loop on vertex {u}")
        if not weight > 0 or not math.isfinite(weight):
            raise ValueError(f"edge weight must be finite and positive, got {weight!r}")
        if v in self.succ[u]:
            raise ValueError(f"edge ({u}, {v}) already present")
        self.succ[u][v] = weight
        self.pred[v][u] = weight

    def remove_edge(self, u: int, v: int) -> float:
        w = self.succ[u].pop(v)
        del self.pred[v][u]
        return w

    def successors(self, u: int) -> list[int]:
        """Out-neighbours of ``u`` in ascending id order."""
        return sorted(self.succ[u])

    def edges(self) -> Iterator[WeightedEdge]:
        """All edges in ascending ``(src, dst)`` order."""
        for u in range(self.n):
            for v in sorted(self.succ[u]):
                yield WeightedEdge(u, v, self.succ[u][v])

    def total_weight(self) -> float:
        return sum(sum(s.values()) for s in self.succ)

    def copy(self) -> WeightedDigraph:
        g = WeightedDigraph(self.n, self.labels)
        g.succ = [dict(s) for s in self.succ]
        g.pred = [dict(p) for p in self.pred]
        g.dropped_self_loops = self.dropped_self_loops
        return g

    def empty_like(self) -> WeightedDigraph:
        return WeightedDigraph(self.n, self.labels)

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int, float]],
        n: int | None = None,
        labels: Iterable[str] | None = None,
    ) -> WeightedDigraph:
        edges = list(edges)
        if n is None:
            n = 1 + max((max(u, v) for u, v, _ in edges), default=-1)
        g = cls(n, labels)
        for u, v, w in edges:
            g.add_edge(u, v, float(w))
        return g

    def to_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, indices, weights)`` with rows sorted by destination.

        CSR position ``k`` is the edge id used by the compiled kernels; ids
        follow ascending ``(src, dst)`` order.
        """
        n = self.n
        indptr = np.zeros(n + 1, dtype=np.int64)
        indices = np.empty(self.num_edges(), dtype=np.int64)
        weights = np.empty(self.num_edges(), dtype=np.float64)
        k = 0
        for u in range(n):
            row = sorted(self.succ[u].items())
            for v, w in row:
                indices[k] = v
                weights[k] = w
                k += 1
            indptr[u + 1] = k
        return indptr, indices, weights

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for e in self.edges():
            a[e.src, e.dst] = e.weight
        return a

    def to_edge_list(self) -> str:
        return "".join(
            f"{self.labels[e.src]} {self.labels[e.dst]} {e.weight!r}\n" for e in self.edges()
        )


def parse_edge_list(stream: TextIO | Iterable[str] | str) -> WeightedDigraph:
    """Read ``src dst weight`` lines into a :class:`WeightedDigraph`.

    Blank lines and lines starting with ``#`` are skipped.  Labels are
    numbered in order of first appearance.  Repeated ``(src, dst)`` lines are
    merged by summing weights; self-loops are dropped and counted in
    ``dropped_self_loops``.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    ids: dict[str, int] = {}
    merged: dict[tuple[int, int], float] = {}
    self_loops = 0

    def vertex(label: str) -> int:
        if label not in ids:
            ids[label] = len(ids)
        return ids[label]

    for lineno, line in enumerate(stream, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 3:
            raise EdgeListParseError(f"expected 3 fields, got {len(fields)}", lineno)
        src, dst, raw = fields
        try:
            w = float(raw)
        except ValueError:
            raise EdgeListParseError(f"weight {raw!r} is not a number", lineno) from None
        if not math.isfinite(w) or w <= 0:
            raise EdgeWeightError(f"weight must be finite and positive, got {raw!r}", lineno)
        u, v = vertex(src), vertex(dst)
        if u == v:
            self_loops += 1
            continue
        merged[u, v] = merged.get((u, v), 0.0) + w

    g = WeightedDigraph(len(ids), ids)
    for (u, v), w in merged.items():
        g.add_edge(u, v, w)
    g.dropped_self_loops = self_loops
    if self_loops:
        log.warning("dropped %d self-loop line(s)", self_loops)
    return g


def read_edge_list(path: str | os.PathLike) -> WeightedDigraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def resolve_data_path(path: str | os.PathLike) -> Path:
    """Resolve ``path`` directly, else relative to ``$MWFASRANK_DATA_DIR``."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    data_dir = os.environ.get("MWFASRANK_DATA_DIR")
    if data_dir and (Path(data_dir) / p).exists():
        return Path(data_dir) / p
    return p


def find_cycle(graph: WeightedDigraph) -> list[int] | None:
    """Return one directed cycle as a vertex list, or ``None`` for a DAG.

    DFS roots and neighbours are visited in ascending id order, so the
    result is reproducible.  The cycle starts at the vertex the back edge
    points to; the closing edge runs from the last vertex to the first.
    """
    WHITE, GRAY, BLACK = 0, 1, 2
    color = [WHITE] * graph.n
    for root in range(graph.n):
        if color[root] != WHITE:
            continue
        color[root] = GRAY
        path = [root]
        stack = [iter(graph.successors(root))]
        while stack:
            for w in stack[-1]:
                if color[w] == WHITE:
                    color[w] = GRAY
                    path.append(w)
                    stack.append(iter(graph.successors(w)))
                    break
                if color[w] == GRAY:
                    return path[path.index(w):]
            else:
                color[path.pop()] = BLACK
                stack.pop()
    return None


def is_acyclic(graph: WeightedDigraph) -> bool:
    return find_cycle(graph) is None


def reaches(graph: WeightedDigraph, source: int, target: int) -> bool:
    """True iff a directed path leads from ``source`` to ``target``."""
    if source == target:
        return True
    seen = {source}
    todo = [source]
    while todo:
        u = todo.pop()
        for v in graph.succ[u]:
            if v == target:
                return True
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return False


def would_create_cycle(graph: WeightedDigraph, edge: WeightedEdge | tuple[int, int]) -> bool:
    """Whether inserting ``edge`` into the acyclic ``graph`` closes a cycle."""
    if isinstance(edge, WeightedEdge):
        u, v = edge.src, edge.dst
    else:
        u, v = edge[0], edge[1]
    if not is_acyclic(graph):
        raise CyclicGraphError("would_create_cycle requires an acyclic graph")
    return reaches(graph, v, u)


def random_digraph(
    rng: np.random.Generator,
    n: int,
    p: float,
    weights: str = "int",
    max_weight: int = 10,
    min_weight: int = 1,
) -> WeightedDigraph:
    """Erdos-Renyi style digraph: each ordered pair present with probability ``p``.

    ``weights="int"`` draws integers in ``min_weight..max_weight``; ``"real"``
    draws reals in ``(0, 1]``.
    """
    g = WeightedDigraph(n)
    if n < 2:
        return g
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    if weights == "int":
        w = rng.integers(min_weight, max_weight + 1, size=(n, n)).astype(float)
    elif weights == "real":
        w = 1.0 - rng.random((n, n))
    else:
        raise ValueError(f"unknown weight kind {weights!r}")
    for u, v in zip(*np.nonzero(mask)):
        g.add_edge(int(u), int(v), float(w[u, v]))
    return g
