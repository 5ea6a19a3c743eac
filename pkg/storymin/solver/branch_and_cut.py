"""Exact crossing minimization by branch-and-cut on the max-cut form.

Pipeline: validate, merge layers, barycenter incumbent, ordering model
indexed by the incumbent, variable identification, max-cut graph, then a
best-bound branch-and-cut that starts from the bare ``[0, 1]`` box.
"""

import enum
import heapq
import logging
import queue
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

from storymin.errors import ValidationReport
from storymin.maxcut.graph import MaxCutGraph, build_maxcut
from storymin.mlcm.crossings import count_crossings
from storymin.mlcm.instance import MlcmInstance, Solution, validate_instance
from storymin.mlcm.transform import MergeMap, merge_layers
from storymin.ordering.model import build_model
from storymin.ordering.reduce import ReducedModel, identify_variables
from storymin.solver.backends import RelaxationBackend, create_backend
from storymin.solver.clock import Clock
from storymin.solver.config import SolveConfig
from storymin.solver.heuristic import barycenter_heuristic
from storymin.solver.search import (
    BranchNode,
    Counters,
    CutPool,
    Incumbent,
    NodeProcessor,
)
from storymin.solver.workers import NodeWorker

logger = logging.getLogger(__name__)


class SolveStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE_INPUT = "infeasible-input"
    TIMEOUT = "timeout"


@dataclass
class SolveStats:
    n_var: int = 0
    n_oddc: int = 0
    n_trans: int = 0
    n_sub: int = 0
    n_LPs: int = 0
    time: float = 0.0

    def record(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class OptResult:
    status: SolveStatus
    solution: Optional[Solution]
    crossings: Optional[int]
    lower_bound: int
    stats: SolveStats
    report: Optional[ValidationReport] = None

    def record(self, instance: MlcmInstance) -> Dict[str, Any]:
        layers = []
        if self.solution is not None:
            layers = [
                [instance.label(v) for v in order] for order in self.solution.orders
            ]
        out: Dict[str, Any] = {
            "status": self.status.value,
            "crossings": self.crossings,
            "lower_bound": self.lower_bound,
            "layers": layers,
            "stats": self.stats.record(),
        }
        if self.report is not None:
            out["violations"] = self.report.records()
        return out


@dataclass
class Prepared:
    """The instance after every preprocessing step, ready for the search."""

    merged: MlcmInstance
    merge: MergeMap
    heuristic: Solution
    reduced: ReducedModel
    graph: MaxCutGraph


def prepare(instance: MlcmInstance, config: SolveConfig) -> Prepared:
    if config.merge_layers:
        merged, merge = merge_layers(instance)
    else:
        merged, merge = instance, MergeMap.identity(instance)
    heuristic = barycenter_heuristic(merged, config.sweeps)
    model = build_model(merged, heuristic)
    reduced, _ = identify_variables(model, config.identify_variables)
    graph = build_maxcut(reduced)
    return Prepared(merged, merge, heuristic, reduced, graph)


def instance_stats(instance: MlcmInstance) -> Dict[str, int]:
    """Size columns: layers, nodes, edges, raw and identified variables."""
    merged, _ = merge_layers(instance)
    model = build_model(merged)
    reduced, _ = identify_variables(model)
    return {
        "p": instance.p,
        "V": instance.n_nodes,
        "E": instance.n_edges,
        "n_var_raw": sum(len(ns) * (len(ns) - 1) // 2 for ns in instance.layers),
        "n_var": reduced.n_vars,
        "p_merged": merged.p,
    }


def heuristic_result(
    instance: MlcmInstance, config: Optional[SolveConfig] = None
) -> OptResult:
    config = config or SolveConfig()
    clock = Clock()
    report = validate_instance(instance)
    if not report.ok:
        status = SolveStatus.INFEASIBLE_INPUT
        return OptResult(status, None, None, 0, SolveStats(), report)
    sol = barycenter_heuristic(instance, config.sweeps)
    count = count_crossings(instance, sol)
    status = SolveStatus.OPTIMAL if count == 0 else SolveStatus.FEASIBLE
    return OptResult(status, sol, count, 0, SolveStats(time=clock.elapsed()))


def _search_sequential(processor: NodeProcessor, clock: Clock, incumbent: Incumbent):
    heap: List[BranchNode] = [BranchNode(0, 0)]
    lower = 0
    while heap:
        if clock.expired():
            break
        node = heapq.heappop(heap)
        if node.bound >= incumbent.value:
            continue
        for child in processor.process(node):
            heapq.heappush(heap, child)
        open_bound = min((n.bound for n in heap), default=incumbent.value)
        lower = max(lower, min(open_bound, incumbent.value))
        clock.tick()
    return heap, lower


def _search_parallel(
    processors: List[NodeProcessor], clock: Clock, incumbent: Incumbent
):
    tasks: queue.Queue = queue.Queue()
    results: queue.Queue = queue.Queue()
    workers = [NodeWorker(p, tasks, results) for p in processors]
    for worker in workers:
        worker.daemon = True
        worker.start()

    heap: List[BranchNode] = [BranchNode(0, 0)]
    in_flight: Dict[int, BranchNode] = {}
    lower = 0
    error: Optional[BaseException] = None

    def collect(item: Tuple[BranchNode, List[BranchNode], Optional[BaseException]]):
        nonlocal error
        node, children, exc = item
        in_flight.pop(node.seq, None)
        if exc is not None and error is None:
            error = exc
        for child in children:
            heapq.heappush(heap, child)

    try:
        while (heap or in_flight) and error is None and not clock.expired():
            while heap and len(in_flight) < len(workers):
                node = heapq.heappop(heap)
                if node.bound >= incumbent.value:
                    continue
                in_flight[node.seq] = node
                tasks.put(node)
            if not in_flight:
                continue
            try:
                collect(results.get(timeout=0.1))
            except queue.Empty:
                pass
            bounds = [n.bound for n in heap] + [n.bound for n in in_flight.values()]
            open_bound = min(bounds, default=incumbent.value)
            lower = max(lower, min(open_bound, incumbent.value))
            clock.tick()
    finally:
        for worker in workers:
            worker.running = False
            tasks.put(None)
        for worker in workers:
            worker.join()
        while not results.empty():
            collect(results.get())

    if error is not None:
        raise error
    heap.extend(in_flight.values())
    return heap, lower


def branch_and_cut(
    instance: MlcmInstance,
    config: Optional[SolveConfig] = None,
    backend: Optional[RelaxationBackend] = None,
) -> OptResult:
    config = config or SolveConfig()
    clock = Clock(config.time_limit)
    stats = SolveStats()

    report = validate_instance(instance)
    if not report.ok:
        logger.warning("instance rejected: %s", "; ".join(v.message for v in report))
        return OptResult(SolveStatus.INFEASIBLE_INPUT, None, None, 0, stats, report)

    prep = prepare(instance, config)
    stats.n_var = prep.reduced.n_vars
    incumbent = Incumbent(count_crossings(prep.merged, prep.heuristic), prep.heuristic)

    def finish(status: SolveStatus, lower: int) -> OptResult:
        stats.time = clock.elapsed()
        sol = prep.merge.expand(incumbent.solution)
        count = count_crossings(instance, sol)
        logger.info(
            "%s: %d crossings, lower bound %d, %d subproblems, %d LPs",
            status.value,
            count,
            lower,
            stats.n_sub,
            stats.n_LPs,
        )
        return OptResult(status, sol, count, min(lower, count), stats)

    if config.heuristic_only:
        status = SolveStatus.OPTIMAL if incumbent.value == 0 else SolveStatus.FEASIBLE
        return finish(status, 0)
    if incumbent.value == 0:
        stats.n_sub = 1
        return finish(SolveStatus.OPTIMAL, 0)

    pool = CutPool()
    counters = Counters()

    def make_processor(lp: RelaxationBackend) -> NodeProcessor:
        return NodeProcessor(
            prep.merged,
            prep.graph,
            prep.reduced,
            config,
            incumbent,
            pool,
            counters,
            clock,
            lp,
        )

    def report_progress(dt: float):
        logger.info(
            "%.0fs: incumbent %d, %d subproblems, %d LPs, %d cuts in pool",
            clock.elapsed(),
            incumbent.value,
            counters.n_sub,
            counters.n_lps,
            len(pool),
        )

    clock.schedule_interval(report_progress, config.progress_interval)
    if config.threads == 1:
        if backend is None:
            backend = create_backend(config.backend, config.seed)
        processor = make_processor(backend)
        open_nodes, lower = _search_sequential(processor, clock, incumbent)
    else:
        processors = [
            make_processor(create_backend(config.backend, config.seed))
            for _ in range(config.threads)
        ]
        open_nodes, lower = _search_parallel(processors, clock, incumbent)
    clock.unschedule(report_progress)

    stats.n_oddc, stats.n_trans = counters.n_oddc, counters.n_trans
    stats.n_sub, stats.n_LPs = counters.n_sub, counters.n_lps
    live = [n.bound for n in open_nodes if n.bound < incumbent.value]
    if not live:
        return finish(SolveStatus.OPTIMAL, incumbent.value)
    return finish(SolveStatus.TIMEOUT, max(lower, min(live)))
