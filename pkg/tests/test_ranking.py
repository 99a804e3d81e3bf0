import io

import numpy as np
import pytest

from mwfasrank.graph import CyclicGraphError, WeightedDigraph, random_digraph
from mwfasrank.ranking import Ranking, read_ranking, tiebreak_score, topological_rank, write_ranking
from mwfasrank.solver import solve_local_ratio


def graph(edges, n=None):
    return WeightedDigraph.from_edges(edges, n)


def test_single_vertex():
    g = WeightedDigraph(1)
    r = topological_rank(g, g)
    assert r.order == [0]
    assert r.rank.tolist() == [1]
    assert r.scores.tolist() == [1.0]


def test_chain():
    g = graph([(0, 1, 1), (1, 2, 1)])
    r = topological_rank(g, g)
    assert r.order == [0, 1, 2]
    assert r.rank.tolist() == [1, 2, 3]
    assert r.scores.tolist() == [3.0, 2.0, 1.0]


def test_tiebreak_formula():
    g = graph([(0, 1, 4)], n=3)
    assert tiebreak_score(2, g) == 0.0
    assert tiebreak_score(0, g) == 4.0
    h = graph([(0, 1, 3), (0, 2, 1), (3, 0, 2)])
    assert tiebreak_score(0, h) == pytest.approx(2 / 3)


def test_tiebreak_orders_unconstrained_vertices():
    # u=0 beats x=2 and y=3 (net +2 over 2 edges); v=1 loses to both (net -2 over 2 edges)
    original = graph([(0, 2, 1), (0, 3, 1), (2, 1, 1), (3, 1, 1)])
    dense = original.to_dense()
    brute = [(dense[i].sum() - dense[:, i].sum()) / (np.count_nonzero(dense[i]) + np.count_nonzero(dense[:, i]))
             for i in range(4)]
    assert brute == [1.0, -1.0, 0.0, 0.0]
    assert [tiebreak_score(i, original) for i in range(4)] == brute
    residual = original.empty_like()
    r = topological_rank(residual, original)
    # x and y tie at 0: higher id first
    assert r.order == [0, 3, 2, 1]


def test_cyclic_residual_rejected():
    g = graph([(0, 1, 1), (1, 0, 1)])
    with pytest.raises(CyclicGraphError):
        topological_rank(g, g)


def test_ranking_invariants_on_random_graphs():
    rng = np.random.default_rng(8)
    for _ in range(50):
        g = random_digraph(rng, int(rng.integers(1, 30)), float(rng.uniform(0.05, 0.8)))
        res = solve_local_ratio(g)
        r = topological_rank(res.residual_dag, g)
        r.check()
        assert sorted(r.rank.tolist()) == list(range(1, g.n + 1))
        for e in res.residual_dag.edges():
            assert r.rank[e.src] < r.rank[e.dst]
        again = topological_rank(res.residual_dag.copy(), g.copy())
        assert again.order == r.order


def test_from_order_validates():
    with pytest.raises(ValueError):
        Ranking.from_order([0, 0, 1])


def test_check_detects_bad_scores():
    r = Ranking.from_order([1, 0])
    r.check()
    with pytest.raises(ValueError):
        r.with_scores([2.0, 2.0]).check()


def test_ranking_file_roundtrip():
    g = graph([(0, 1, 1), (1, 2, 1)], n=3)
    g.labels = ["alpha", "beta", "gamma"]
    r = Ranking.from_order([2, 0, 1]).with_scores([2.5, 0.25, 9.0])
    buf = io.StringIO()
    write_ranking(r, g.labels, buf)
    assert buf.getvalue().splitlines()[0] == "gamma 1 9.0"
    back = read_ranking(io.StringIO(buf.getvalue()), g)
    assert back.order == r.order
    assert back.scores.tolist() == r.scores.tolist()


@pytest.mark.parametrize("text", [
    "a 1 1.0\n",  # missing vertices
    "a 1 1\nb 1 2\n",  # repeated rank
    "a 1 1\nzz 2 1\n",  # unknown label
    "a 1\nb 2 1\n",  # malformed
])
def test_ranking_file_errors(text):
    g = graph([(0, 1, 1)])
    g.labels = ["a", "b"]
    with pytest.raises(ValueError):
        read_ranking(io.StringIO(text), g)
