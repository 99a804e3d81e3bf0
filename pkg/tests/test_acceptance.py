"""Acceptance gate.  Every criterion prints one PASS/FAIL/SKIP line.

Dataset-dependent criteria look for edge-list files under
``$MWFASRANK_DATA_DIR`` (searched recursively; file stems are matched
case-insensitively with punctuation ignored) and skip when none are found.
"""

import os
import re
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from dense_oracle import dense_losses, dense_rank_losses
from mwfasrank._backend import BACKENDS, DEFAULT
from mwfasrank.bench import check_solution, run_graph, run_oracle_check
from mwfasrank.graph import WeightedDigraph, random_digraph, read_edge_list
from mwfasrank.losses import (
    ComparisonMatrix,
    loss_margin,
    loss_naive,
    loss_ratio,
    loss_simple,
    loss_weighted,
)
from mwfasrank.optimizer import OptimizerConfig, minimize_ratio_loss
from mwfasrank.ranking import Ranking, topological_rank
from mwfasrank.solver import solve_local_ratio
from reference_values import COUNTS, LOSSES, OPTIMIZED

EPS = 1e-6


def report(num, status, detail):
    line = f"[{status}] criterion {num}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _key(name):
    return re.sub(r"[^0-9a-z]", "", name.lower())


def _dataset_files():
    root = os.environ.get("MWFASRANK_DATA_DIR")
    if not root or not Path(root).is_dir():
        return {}
    found = {}
    for p in sorted(Path(root).rglob("*")):
        if p.is_file() and p.suffix in (".txt", ".tsv", ".csv", ".edgelist", ""):
            found.setdefault(_key(p.stem), p)
    return found


def _locate(names):
    files = _dataset_files()
    return {name: files[_key(name)] for name in names if _key(name) in files}


# 1. solver invariants on random graphs

def test_criterion_1_solver_invariants():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    graphs = failures = 0
    first = None
    for weights in ("int", "real"):
        for _ in range(500):
            n = int(rng.integers(1, 51))
            g = random_digraph(rng, n, float(rng.uniform(0.05, 0.9)), weights)
            problems = check_solution(g, solve_local_ratio(g))
            graphs += 1
            if problems:
                failures += 1
                first = first or problems[0]
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 60
    report(1, "PASS" if ok else "FAIL",
           f"{graphs} graphs, {failures} invariant failures, {elapsed:.1f}s (budget 60s)"
           + (f"; first: {first}" if first else ""))
    assert failures == 0, first
    assert elapsed < 60


# 2. dominance and lambda bound against exhaustive search

def test_criterion_2_oracle_dominance():
    start = time.perf_counter()
    total = 0
    worst = 0.0
    bad = []
    for seed, p in enumerate((0.2, 0.35, 0.5, 0.65, 0.8)):
        rep = run_oracle_check(instances=110, max_vertices=7, edge_prob=p, seed=100 + seed)
        total += rep.instances
        worst = max(worst, rep.worst_over_lambda)
        bad += rep.failures
    elapsed = time.perf_counter() - start
    ok = not bad and total >= 500 and elapsed < 120
    report(2, "PASS" if ok else "FAIL",
           f"{total} graphs (n<=7), worst heuristic/(exact*lambda) {worst:.3f}, {elapsed:.1f}s (budget 120s)"
           + (f"; {bad[0]}" if bad else ""))
    assert not bad
    assert total >= 500
    assert elapsed < 120


# 3. sparse losses versus dense evaluation

def test_criterion_3_loss_oracle():
    rng = np.random.default_rng(77)
    pairs = 0
    worst = 0.0
    while pairs < 200:
        n = int(rng.integers(2, 31))
        g = random_digraph(rng, n, float(rng.uniform(0.05, 0.9)), "int" if pairs % 2 else "real")
        cm = ComparisonMatrix.from_graph(g)
        if cm.t == 0:
            continue
        r = rng.random(n) * 10 if pairs % 3 else rng.integers(1, 5, n).astype(float)
        ranking = Ranking.from_order(rng.permutation(n))
        a = g.to_dense()
        want = list(dense_losses(a, r, EPS)[:3]) + list(dense_rank_losses(a, ranking.rank))
        got = [loss_naive(cm, r), loss_simple(cm, r), loss_ratio(cm, r, EPS),
               loss_weighted(g, ranking), loss_margin(g, ranking)]
        for x, y in zip(got, want):
            worst = max(worst, abs(x - y) / max(abs(y), 1e-300) if y else abs(x))
        pairs += 1
    ok = worst <= 1e-12
    report(3, "PASS" if ok else "FAIL", f"{pairs} (graph, score) pairs, worst relative error {worst:.2e} (tol 1e-12)")
    assert ok


# 4. optimizer contracts

def test_criterion_4_optimizer_contracts():
    rng = np.random.default_rng(404)
    one = OptimizerConfig(num_iterations=1, guard_monotone=True)
    done = 0
    problems = []
    while done < 100:
        g = random_digraph(rng, int(rng.integers(2, 41)), float(rng.uniform(0.05, 0.8)),
                           "int" if done % 2 else "real")
        cm = ComparisonMatrix.from_graph(g)
        if cm.t == 0:
            continue
        r0 = topological_rank(solve_local_ratio(g).residual_dag, g).scores
        cur = r0
        prev = loss_ratio(cm, cur)
        for sweep in range(6):
            cur = minimize_ratio_loss(cm, cur, one)
            now = loss_ratio(cm, cur)
            if now > prev + 1e-12 * max(1.0, prev):
                problems.append(f"instance {done}: sweep {sweep} raised ratio loss {prev!r} -> {now!r}")
            prev = now
        if not np.array_equal(np.argsort(cur, kind="stable"), np.argsort(r0, kind="stable")):
            problems.append(f"instance {done}: order changed")
        if loss_naive(cm, cur) != loss_naive(cm, r0) or loss_simple(cm, cur) != loss_simple(cm, r0):
            problems.append(f"instance {done}: naive/simple changed")
        done += 1
    report(4, "PASS" if not problems else "FAIL",
           f"{done} instances x 6 sweeps, {len(problems)} violations" + (f"; {problems[0]}" if problems else ""))
    assert not problems


# 5. reference losses and sizes on the public datasets

def test_criterion_5_reference_losses():
    located = _locate(COUNTS)
    if not located:
        report(5, "SKIP", "datasets not found (set MWFASRANK_DATA_DIR); reference losses and counts not checked")
        pytest.skip("datasets absent")
    problems = []
    checked = 0
    for name, path in located.items():
        g = read_edge_list(path)
        if (g.n, g.num_edges()) != COUNTS[name]:
            problems.append(f"{name}: counts {g.n}/{g.num_edges()} != {COUNTS[name][0]}/{COUNTS[name][1]}")
        if name in LOSSES:
            rec = run_graph(g, name).record
            naive, simple, ratio = LOSSES[name]
            if abs(rec.naive - naive) > 0.02 or abs(rec.simple - simple) > 0.02 or abs(rec.ratio_initial - ratio) > 0.10:
                problems.append(f"{name}: got {rec.naive:.3f}/{rec.simple:.3f}/{rec.ratio_initial:.3f}, "
                                f"expected {naive}/{simple}/{ratio}")
        checked += 1
    missing = sorted(set(LOSSES) - set(located))
    report(5, "PASS" if not problems else "FAIL",
           f"{checked} datasets checked, {len(problems)} mismatches"
           + (f"; loss datasets missing: {', '.join(missing)}" if missing else "")
           + (f"; {problems[0]}" if problems else ""))
    assert not problems


# 6. ratio loss after 40 sweeps

def test_criterion_6_reference_optimized():
    located = _locate(OPTIMIZED)
    if not located:
        report(6, "SKIP", "datasets not found (set MWFASRANK_DATA_DIR); post-refinement ratio loss not checked")
        pytest.skip("datasets absent")
    problems = []
    for name, path in located.items():
        g = read_edge_list(path)
        cm = ComparisonMatrix.from_graph(g)
        r0 = topological_rank(solve_local_ratio(g).residual_dag, g).scores
        before = loss_ratio(cm, r0)
        after = loss_ratio(cm, minimize_ratio_loss(cm, r0, OptimizerConfig(num_iterations=40)))
        if not after < before or abs(after - OPTIMIZED[name]) > 0.05:
            problems.append(f"{name}: {before:.3f} -> {after:.3f}, expected ~{OPTIMIZED[name]}")
    report(6, "PASS" if not problems else "FAIL",
           f"{len(located)} datasets refined, {len(problems)} outside +-0.05" + (f"; {problems[0]}" if problems else ""))
    assert not problems


# 7. runtime envelope

def _synthetic(n, m, seed):
    rng = np.random.default_rng(seed)
    picks = rng.choice(n * (n - 1), size=m, replace=False)
    src = picks // (n - 1)
    dst = picks % (n - 1)
    dst = dst + (dst >= src)
    w = rng.integers(1, 11, size=m)
    return WeightedDigraph.from_edges(zip(src.tolist(), dst.tolist(), w.tolist()), n)


def _solve_rank_time(g, backend):
    start = time.perf_counter()
    topological_rank(solve_local_ratio(g, backend=backend).residual_dag, g)
    return time.perf_counter() - start


def test_criterion_7_runtime():
    cases = {f"synthetic {n}/{m}": _synthetic(n, m, 7) for n, m in ((602, 5002), (351, 7650))}
    for name, path in _locate(COUNTS).items():
        cases[name] = read_edge_list(path)
    timings = {}
    for backend in sorted(BACKENDS):
        for name, g in cases.items():
            timings[(backend, name)] = _solve_rank_time(g, backend)
    slow = {k: v for k, v in timings.items() if v >= 10}
    worst_key = max(timings, key=timings.get)
    default_worst = max(v for (b, _), v in timings.items() if b == DEFAULT)
    report(7, "PASS" if not slow else "FAIL",
           f"{len(cases)} graphs x {len(BACKENDS)} backends; slowest {worst_key[1]} on {worst_key[0]} "
           f"{timings[worst_key]:.2f}s, slowest on default backend ({DEFAULT}) {default_worst:.2f}s (ceiling 10s)"
           + ("" if len(cases) > 2 else "; real datasets absent, synthetic proxies only"))
    assert not slow, slow
