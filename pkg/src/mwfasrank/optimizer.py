"""Order-preserving refinement of ranking scores to lower the ratio upset loss.

Each sweep visits vertices from lowest to highest score and moves one score
at a time by ternary search inside the interval set by its two neighbours,
so the induced order (and with it the naive and simple losses) never changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import get_backend
from .losses import DEFAULT_EPSILON, ComparisonMatrix, as_comparison

# Relative inset of each search interval; keeps updated scores strictly
# between their neighbours.
BOUND_MARGIN = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    num_iterations: int = 40
    steps: int = 100
    epsilon_stop: float = 1e-9
    loss_epsilon: float = DEFAULT_EPSILON
    guard_monotone: bool = True

    def __post_init__(self):
        if self.num_iterations < 0 or self.steps <= 0:
            raise ValueError("num_iterations must be >= 0 and steps > 0")
        if not (self.epsilon_stop > 0 and self.loss_epsilon > 0):
            raise ValueError("epsilon_stop and loss_epsilon must be positive")


class PairTable:
    """Per-vertex CSR of compared neighbours and their ``M1/M2`` targets.

    Row ``k`` lists every ``j`` with ``M1[k, j] != 0`` and the value
    ``M1[k, j] / M2[k, j]`` that ``T1[k, j] / T2[k, j]`` is fitted to.
    """

    def __init__(self, cm: ComparisonMatrix, loss_epsilon: float):
        sup = cm.support()
        i, j, m, s = cm.i[sup], cm.j[sup], cm.m[sup], cm.s[sup]
        target = m / (s + loss_epsilon)
        rows = np.concatenate([i, j])
        nbrs = np.concatenate([j, i])
        vals = np.concatenate([target, -target])
        order = np.lexsort((nbrs, rows))
        self.indptr = np.zeros(cm.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=cm.n), out=self.indptr[1:])
        self.nbr = np.ascontiguousarray(nbrs[order], dtype=np.int64)
        self.target = np.ascontiguousarray(vals[order], dtype=np.float64)
        self.t = cm.t
        self.loss_epsilon = loss_epsilon


def _check_scores(scores, n):
    r = np.array(scores, dtype=np.float64)
    if r.shape != (n,):
        raise ValueError(f"expected {n} scores, got shape {r.shape}")
    if len(np.unique(r)) != n:
        raise ValueError("scores must be pairwise distinct")
    if np.any(r < 0):
        raise ValueError("scores must be non-negative")
    return r


def ternary_search_vertex(a, scores, index: int, lower: float, upper: float,
                          config: OptimizerConfig = OptimizerConfig(),
                          backend: str | None = None) -> float:
    """Minimise ratio loss over ``scores[index]`` in ``[lower, upper]``.

    Probes the two interior thirds, drops the worse outer third (both outer
    thirds on a tie), and stops after ``config.steps`` rounds or once the
    interval is narrower than ``config.epsilon_stop``.  The midpoint of the
    final interval is written into ``scores`` and returned.
    """
    if not lower < upper:
        raise ValueError(f"empty search interval [{lower}, {upper}]")
    cm = as_comparison(a)
    table = PairTable(cm, config.loss_epsilon)
    r = np.ascontiguousarray(scores, dtype=np.float64)
    core = get_backend(backend)
    x = core.ternary_search(table.indptr, table.nbr, table.target, r, int(index),
                            float(lower), float(upper), int(config.steps),
                            float(config.epsilon_stop), float(config.loss_epsilon))
    scores[index] = x
    return x


def minimize_ratio_loss(a, scores, config: OptimizerConfig = OptimizerConfig(),
                        backend: str | None = None) -> np.ndarray:
    """Run ``config.num_iterations`` order-preserving sweeps; returns new scores.

    Search bounds per sweep position: ``[0, next]`` for the lowest score,
    ``[previous, max + 1]`` for the highest, ``[previous, next]`` otherwise,
    always using the scores as updated so far.  With ``guard_monotone`` an
    update that would raise the loss is dropped.
    """
    cm = as_comparison(a)
    r = _check_scores(scores, cm.n)
    if config.num_iterations == 0 or cm.t == 0:
        return r
    table = PairTable(cm, config.loss_epsilon)
    core = get_backend(backend)
    out = core.ratio_sweeps(table.indptr, table.nbr, table.target, r,
                            int(config.num_iterations), int(config.steps),
                            float(config.epsilon_stop), float(config.loss_epsilon),
                            bool(config.guard_monotone), BOUND_MARGIN)
    return np.asarray(out, dtype=np.float64)
