"""End-to-end pipeline, dataset suites and the randomized solver self-check."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import losses
from .graph import (
    EdgeListError,
    WeightedDigraph,
    is_acyclic,
    random_digraph,
    read_edge_list,
    resolve_data_path,
)
from .optimizer import OptimizerConfig, minimize_ratio_loss
from .ranking import Ranking, topological_rank
from .solver import longest_cycle_length, solve_exact, solve_local_ratio

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2


class PipelineError(RuntimeError):
    pass


@dataclass(frozen=True)
class PipelineOptions:
    optimize_ratio: bool = False
    sweeps: int = 40
    ternary_steps: int = 100
    loss_epsilon: float = losses.DEFAULT_EPSILON
    zero_threshold: float = 1e-9
    guard_monotone: bool = True
    backend: str | None = None

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            num_iterations=self.sweeps,
            steps=self.ternary_steps,
            loss_epsilon=self.loss_epsilon,
            guard_monotone=self.guard_monotone,
        )


@dataclass
class BenchRecord:
    dataset_name: str
    n_vertices: float = math.nan
    n_edges: float = math.nan
    naive: float = math.nan
    simple: float = math.nan
    ratio_initial: float = math.nan
    ratio_optimized: float | None = None
    weighted: float = math.nan
    margin: float = math.nan
    removed_weight: float = math.nan
    wall_time_seconds: float = math.nan
    error: str | None = None


@dataclass
class PipelineResult:
    record: BenchRecord
    ranking: Ranking
    graph: WeightedDigraph
    report: losses.LossReport = field(repr=False, default=None)


def run_graph(graph: WeightedDigraph, name: str, options: PipelineOptions = PipelineOptions()) -> PipelineResult:
    if graph.num_edges() == 0:
        raise PipelineError(f"{name}: no comparisons")

    start = time.perf_counter()
    fas = solve_local_ratio(graph, options.zero_threshold, backend=options.backend)
    ranking = topological_rank(fas.residual_dag, graph)
    elapsed = time.perf_counter() - start

    try:
        report = losses.evaluate(graph, ranking, options.loss_epsilon)
    except losses.UndefinedMetricError as exc:
        raise PipelineError(f"{name}: no comparisons with a net preference ({exc})") from exc

    record = BenchRecord(
        dataset_name=name,
        n_vertices=graph.n,
        n_edges=graph.num_edges(),
        naive=report.naive,
        simple=report.simple,
        ratio_initial=report.ratio,
        weighted=report.weighted,
        margin=report.margin,
        removed_weight=fas.removed_weight,
        wall_time_seconds=elapsed,
    )
    if options.optimize_ratio:
        cm = losses.ComparisonMatrix.from_graph(graph)
        scores = minimize_ratio_loss(cm, ranking.scores, options.optimizer_config(), options.backend)
        ranking = ranking.with_scores(scores)
        record.ratio_optimized = losses.loss_ratio(cm, scores, options.loss_epsilon)
    return PipelineResult(record, ranking, graph, report)


def run_pipeline(path, options: PipelineOptions = PipelineOptions(), name: str | None = None) -> PipelineResult:
    """Parse, solve, rank, score and optionally refine one edge-list file.

    ``wall_time_seconds`` covers solving and ranking only.
    """
    path = resolve_data_path(path)
    name = name or Path(path).stem
    try:
        graph = read_edge_list(path)
    except (OSError, EdgeListError) as exc:
        raise PipelineError(f"{name}: {exc}") from exc
    return run_graph(graph, name, options)


def read_manifest(path) -> list[tuple[str, Path]]:
    """``name<TAB>path`` lines; relative paths resolve against the manifest directory."""
    path = Path(path)
    base = path.parent
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t") if "\t" in line else line.split(None, 1)
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'name<TAB>path'")
            name, p = parts[0].strip(), Path(parts[1].strip())
            if not p.is_absolute() and (base / p).exists():
                p = base / p
            else:
                p = resolve_data_path(p)
            entries.append((name, p))
    return entries


def _suite_entry(args):
    name, path, options = args
    try:
        return run_pipeline(path, options, name=name).record
    except Exception as exc:  # one bad dataset must not abort the suite
        return BenchRecord(dataset_name=name, error=str(exc))


def run_suite(manifest_path, options: PipelineOptions = PipelineOptions(), jobs: int = 1) -> list[BenchRecord]:
    entries = read_manifest(manifest_path)
    work = [(name, path, options) for name, path in entries]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_suite_entry, work))
    return [_suite_entry(w) for w in work]


def average_record(records: list[BenchRecord]) -> BenchRecord | None:
    ok = [r for r in records if r.error is None]
    if not ok:
        return None
    avg = BenchRecord(dataset_name="Average")
    for f in fields(BenchRecord):
        if f.name in ("dataset_name", "error"):
            continue
        vals = [getattr(r, f.name) for r in ok]
        if any(v is None for v in vals):
            continue
        setattr(avg, f.name, float(np.mean(vals)))
    return avg


COLUMNS = [f.name for f in fields(BenchRecord)]


def _csv_value(v, name, omit_timing):
    if name == "wall_time_seconds" and omit_timing:
        return ""
    if v is None:
        return ""
    if isinstance(v, float):
        if v.is_integer() and name in ("n_vertices", "n_edges"):
            return str(int(v))
        return repr(v)
    return str(v)


def records_to_csv(records: list[BenchRecord], with_average: bool = True, omit_timing: bool = False) -> str:
    rows = list(records)
    avg = average_record(records) if with_average else None
    if avg is not None:
        rows.append(avg)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        d = asdict(r)
        writer.writerow([_csv_value(d[c], c, omit_timing) for c in COLUMNS])
    return buf.getvalue()


TABLE_COLUMNS = [
    ("Dataset", "dataset_name"),
    ("|V|", "n_vertices"),
    ("|E|", "n_edges"),
    ("Naive", "naive"),
    ("Simple", "simple"),
    ("Ratio", "ratio_initial"),
    ("Ratio(opt)", "ratio_optimized"),
    ("Weighted", "weighted"),
    ("Margin", "margin"),
    ("Removed", "removed_weight"),
    ("Time (s)", "wall_time_seconds"),
]


def _cell(v, name):
    if v is None:
        return "-"
    if isinstance(v, str):
        return v
    if name in ("n_vertices", "n_edges"):
        return f"{v:g}"
    if isinstance(v, float) and math.isnan(v):
        return "-"
    return f"{v:.2f}"


def records_to_table(records: list[BenchRecord], with_average: bool = True) -> str:
    rows = list(records)
    avg = average_record(records) if with_average else None
    if avg is not None:
        rows.append(avg)
    cells = []
    for r in rows:
        if r.error is not None:
            cells.append([r.dataset_name, "ERROR: " + r.error] + [""] * (len(TABLE_COLUMNS) - 2))
        else:
            cells.append([_cell(getattr(r, key), key) for _, key in TABLE_COLUMNS])
    header = [title for title, _ in TABLE_COLUMNS]
    widths = [len(h) for h in header]
    for row in cells:
        if row[1].startswith("ERROR"):
            widths[0] = max(widths[0], len(row[0]))
            continue
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    lines = ["  ".join(h.ljust(w) if i == 0 else h.rjust(w) for i, (h, w) in enumerate(zip(header, widths)))]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        if row[1].startswith("ERROR"):
            lines.append(row[0].ljust(widths[0]) + "  " + row[1])
        else:
            lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))))
    return "\n".join(lines) + "\n"


@dataclass
class OracleReport:
    instances: int = 0
    cyclic_instances: int = 0
    worst_ratio: float = 1.0
    mean_ratio: float = 1.0
    worst_over_lambda: float = 0.0
    failures: list[str] = field(default_factory=list)
    failing_instance: str | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = [
            f"instances checked:        {self.instances}",
            f"instances with a cycle:   {self.cyclic_instances}",
            f"worst heuristic/exact:    {self.worst_ratio:.6f}",
            f"mean heuristic/exact:     {self.mean_ratio:.6f}",
            f"worst ratio / lambda:     {self.worst_over_lambda:.6f}",
            f"status:                   {'PASS' if self.ok else 'FAIL'}",
        ]
        lines += [f"  failure: {f}" for f in self.failures]
        return "\n".join(lines) + "\n"


def _reach_masks(dag: WeightedDigraph) -> list[int] | None:
    """Bitmask of vertices reachable from each vertex, or ``None`` if ``dag`` has a cycle."""
    indeg = [len(p) for p in dag.pred]
    order = [v for v in range(dag.n) if indeg[v] == 0]
    for v in order:
        for w in dag.succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                order.append(w)
    if len(order) != dag.n:
        return None
    reach = [0] * dag.n
    for v in reversed(order):
        mask = 1 << v
        for w in dag.succ[v]:
            mask |= reach[w]
        reach[v] = mask
    return reach


def check_solution(graph: WeightedDigraph, result, exact=None) -> list[str]:
    """Invariant violations of a feedback-arc result (empty list when sound)."""
    problems = []
    residual = result.residual_dag
    reach = _reach_masks(residual)
    if reach is None or not is_acyclic(residual):
        return ["residual graph has a cycle"]
    kept = {(e.src, e.dst) for e in residual.edges()}
    cut = [(e.src, e.dst) for e in result.removed_edges]
    original = {(e.src, e.dst) for e in graph.edges()}
    if kept & set(cut) or kept | set(cut) != original or len(cut) != len(set(cut)):
        problems.append("removed and kept edges do not partition the edge set")
    for e in result.removed_edges:
        if e.weight != graph.weight(e.src, e.dst):
            problems.append(f"removed edge {e.src}->{e.dst} lost its original weight")
        if not reach[e.dst] >> e.src & 1:
            problems.append(f"removed edge {e.src}->{e.dst} could be reinserted")
    for e in residual.edges():
        if e.weight != graph.weight(e.src, e.dst):
            problems.append(f"kept edge {e.src}->{e.dst} lost its original weight")
    if exact is not None:
        tol = 1e-9 * max(1.0, graph.total_weight())
        if result.removed_weight < exact.removed_weight - tol:
            problems.append("heuristic beat the exact optimum")
        lam = longest_cycle_length(graph)
        if result.removed_weight > lam * exact.removed_weight + tol:
            problems.append(f"heuristic exceeds lambda={lam} times the optimum")
    return problems


def run_oracle_check(
    instances: int = 500,
    max_vertices: int = 6,
    edge_prob: float = 0.5,
    weight_range: tuple[int, int] = (1, 10),
    seed: int = 0,
    backend: str | None = None,
) -> OracleReport:
    """Compare the heuristic with exhaustive search on random small graphs."""
    if max_vertices > 8:
        raise ValueError("oracle check is limited to 8 vertices")
    lo, hi = weight_range
    if not 0 < lo <= hi:
        raise ValueError("weight range must satisfy 0 < min <= max")
    rng = np.random.default_rng(seed)
    report = OracleReport()
    ratios = []
    for _ in range(instances):
        n = int(rng.integers(2, max_vertices + 1)) if max_vertices >= 2 else max_vertices
        g = random_digraph(rng, n, edge_prob, "int", max_weight=hi, min_weight=lo)
        heur = solve_local_ratio(g, backend=backend)
        exact = solve_exact(g)
        report.instances += 1
        problems = check_solution(g, heur, exact)
        if problems:
            report.failures.extend(problems)
            report.failing_instance = g.to_edge_list()
            break
        if exact.removed_weight > 0:
            report.cyclic_instances += 1
            ratio = heur.removed_weight / exact.removed_weight
            ratios.append(ratio)
            report.worst_over_lambda = max(report.worst_over_lambda, ratio / longest_cycle_length(g))
    if ratios:
        report.worst_ratio = max(ratios)
        report.mean_ratio = float(np.mean(ratios))
    return report
