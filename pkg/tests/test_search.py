import itertools
import random

import numpy as np

from storymin.maxcut import cut_consistency
from storymin.mlcm import count_crossings
from storymin.solver import SolveConfig
from storymin.solver.backends import create_backend
from storymin.solver.branch_and_cut import prepare
from storymin.solver.clock import Clock
from storymin.solver.search import (
    BranchNode,
    Counters,
    CutPool,
    Incumbent,
    NodeProcessor,
)

from conftest import random_instance


def make_processor(instance, clock=None, config=None):
    config = config or SolveConfig()
    prep = prepare(instance, config)
    incumbent = Incumbent(count_crossings(prep.merged, prep.heuristic), prep.heuristic)
    return NodeProcessor(
        prep.merged,
        prep.graph,
        prep.reduced,
        config,
        incumbent,
        CutPool(),
        Counters(),
        clock or Clock(),
        create_backend(config.backend),
    )


def violation(row, y):
    coefs, lo, hi = row
    act = sum(w * y[col] for col, w in coefs.items())
    return max(lo - act, act - hi)


def test_inconsistent_integral_point_gets_a_batch_of_cuts():
    instance = random_instance(random.Random(3), layers=3, min_nodes=6, max_nodes=7)
    processor = make_processor(instance)
    rng = np.random.default_rng(0)
    for _ in range(200):
        y = rng.integers(0, 2, size=processor.graph.n_edges).astype(float)
        if not cut_consistency(processor.graph, y)[0]:
            break
    else:
        raise AssertionError("no inconsistent point drawn")
    cuts = processor._integral(y)
    assert cuts is not None and len(cuts) > 1
    assert len({key for key, _ in cuts}) == len(cuts)
    assert all(violation(row, y) > 0.5 for _, row in cuts)


def test_scheduled_callbacks_run_between_lps(bundle_swap):
    clock = Clock()
    calls = []
    clock.schedule_interval(calls.append, 1e-9)
    processor = make_processor(bundle_swap, clock)
    processor.process(BranchNode(0, 0))
    assert processor.counters.n_lps >= 1
    assert len(calls) == processor.counters.n_lps


def test_lp_stopped_by_deadline_returns_the_node(bundle_swap):
    # Each reading of the clock advances it by half the time limit.
    ticks = itertools.count()
    clock = Clock(time_limit=1.0, time_function=lambda: 0.5 * next(ticks))
    processor = make_processor(bundle_swap, clock)
    node = BranchNode(0, 0)
    assert processor.process(node) == [node]
    assert processor.timed_out
    assert processor.counters.n_lps == 1
