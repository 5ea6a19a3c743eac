"""Branch-and-cut nodes and the state the workers share."""

import itertools
import logging
import math
from dataclasses import dataclass, field
from threading import Lock
from typing import Dict, Hashable, List, Optional, Tuple

import numpy as np

from storymin import INTEGRALITY_TOLERANCE
from storymin.errors import OrderingError, SolverError
from storymin.maxcut.graph import MaxCutGraph, cut_consistency, cut_to_solution
from storymin.maxcut.separation import (
    OddCycleInequality,
    separate_odd_cycles,
    separate_transitivity,
)
from storymin.mlcm.crossings import count_crossings
from storymin.mlcm.instance import MlcmInstance, Solution, is_tree_consistent
from storymin.ordering.model import decode_assignment
from storymin.ordering.reduce import ReducedModel
from storymin.solver.backends import LPResult, LPStatus, RelaxationBackend, Row
from storymin.solver.clock import Clock
from storymin.solver.config import SolveConfig

logger = logging.getLogger(__name__)

TAILING_ROUNDS = 10
TAILING_GAIN = 1e-3


@dataclass(order=True)
class BranchNode:
    bound: int
    seq: int
    fixings: Tuple[Tuple[int, int], ...] = field(default=(), compare=False)

    @property
    def depth(self) -> int:
        return len(self.fixings)


class Incumbent:
    def __init__(self, value: int, solution: Solution):
        self._lock = Lock()
        self.value = value
        self.solution = solution

    def offer(self, value: int, solution: Solution) -> bool:
        with self._lock:
            if value >= self.value:
                return False
            self.value = value
            self.solution = solution
        logger.info("new incumbent: %d crossings", value)
        return True


class CutPool:
    """Every cut found so far, keyed so that duplicates are recognised."""

    def __init__(self):
        self._lock = Lock()
        self._rows: Dict[Hashable, Row] = {}

    def add(self, key: Hashable, row: Row) -> bool:
        with self._lock:
            if key in self._rows:
                return False
            self._rows[key] = row
            return True

    def snapshot(self) -> List[Tuple[Hashable, Row]]:
        with self._lock:
            return list(self._rows.items())

    def __len__(self) -> int:
        return len(self._rows)


class Counters:
    def __init__(self):
        self._lock = Lock()
        self._seq = itertools.count(1)
        self.n_oddc = 0
        self.n_trans = 0
        self.n_sub = 0
        self.n_lps = 0

    def bump(self, n_oddc: int = 0, n_trans: int = 0, n_sub: int = 0, n_lps: int = 0):
        with self._lock:
            self.n_oddc += n_oddc
            self.n_trans += n_trans
            self.n_sub += n_sub
            self.n_lps += n_lps

    def next_seq(self) -> int:
        with self._lock:
            return next(self._seq)


def _violation(row: Row, y: np.ndarray) -> float:
    coefs, lo, hi = row
    act = sum(w * y[col] for col, w in coefs.items())
    return max(lo - act, act - hi)


class NodeProcessor:
    """Solves one branch node at a time on its own LP backend.

    Cut rows stay in the LP from node to node; rows slack for a number of
    consecutive LPs are dropped from the LP but remain in the pool.
    """

    def __init__(
        self,
        instance: MlcmInstance,
        graph: MaxCutGraph,
        reduced: ReducedModel,
        config: SolveConfig,
        incumbent: Incumbent,
        pool: CutPool,
        counters: Counters,
        clock: Clock,
        backend: RelaxationBackend,
    ):
        self.instance = instance
        self.graph = graph
        self.reduced = reduced
        self.config = config
        self.incumbent = incumbent
        self.pool = pool
        self.counters = counters
        self.clock = clock
        self.backend = backend
        self.timed_out = False

        n = graph.n_edges
        self.base_lower = np.zeros(n)
        self.base_upper = np.ones(n)
        if config.symmetry_breaking and graph.n_root:
            self.base_upper[0] = 0.0
        backend.load(graph.weights, self.base_lower, self.base_upper)
        backend.add_rows(({u: 1.0, v: -1.0}, 0.0, 0.0) for u, v in reduced.equalities)

        self.active: Dict[Hashable, int] = {}
        self.idle: Dict[Hashable, int] = {}

    def _solve(self) -> LPResult:
        self.counters.bump(n_lps=1)
        result = self.backend.solve(time_limit=self.clock.remaining())
        if result.status is LPStatus.NUMERICAL:
            logger.warning("LP failed numerically, solving again with perturbation")
            result = self.backend.solve(
                perturb=True, time_limit=self.clock.remaining()
            )
            if result.status is LPStatus.NUMERICAL:
                raise SolverError("LP relaxation failed twice")
        return result

    def _bound(self, value: float) -> int:
        return max(0, math.ceil(value + self.graph.offset - 1e-6))

    def _set_bounds(self, node: BranchNode):
        for col in range(self.graph.n_edges):
            self.backend.set_bounds(col, self.base_lower[col], self.base_upper[col])
        for col, value in node.fixings:
            self.backend.set_bounds(col, value, value)

    def _add_cuts(self, cuts: List[Tuple[Hashable, Row]]) -> int:
        added = 0
        for key, row in cuts:
            self.pool.add(key, row)
            if key in self.active:
                continue
            self.active[key] = self.backend.add_rows([row])[0]
            self.idle[key] = 0
            added += 1
        return added

    def _age_rows(self, y: np.ndarray):
        slacks = self.backend.slacks(y)
        for key, row_id in list(self.active.items()):
            if slacks[row_id] > self.config.inactive_slack:
                self.idle[key] += 1
                if self.idle[key] >= self.config.inactive_rounds:
                    self.backend.remove_rows([row_id])
                    del self.active[key]
                    del self.idle[key]
            else:
                self.idle[key] = 0

    def _from_pool(self, y: np.ndarray) -> List[Tuple[Hashable, Row]]:
        tol = self.config.tolerance
        return [
            (key, row)
            for key, row in self.pool.snapshot()
            if key not in self.active and _violation(row, y) > tol
        ][: self.config.max_cuts_per_round]

    def _separate(self, y: np.ndarray) -> List[Tuple[Hashable, Row]]:
        odd = separate_odd_cycles(
            self.graph, y, self.config.tolerance, self.config.max_cuts_per_round
        )
        trans = separate_transitivity(
            self.reduced, y, self.config.tolerance, self.config.max_cuts_per_round
        )
        self.counters.bump(n_oddc=len(odd), n_trans=len(trans))
        cuts: List[Tuple[Hashable, Row]] = [(c.key, c.row()) for c in odd]
        cuts += [(("t", c.triple, c.upper), c.row()) for c in trans]
        return cuts

    def _decode(self, xc: np.ndarray) -> Optional[Solution]:
        full = self.reduced.expand_assignment(xc)
        try:
            sol = decode_assignment(self.reduced.model, full)
        except OrderingError:
            return None
        for tree, order in zip(self.instance.trees, sol.orders):
            if not is_tree_consistent(tree, order):
                return None
        return sol

    def _round(self, y: np.ndarray):
        xc = (self.graph.root_values(y) > 0.5).astype(np.int64)
        sol = self._decode(xc)
        if sol is not None:
            self.incumbent.offer(count_crossings(self.instance, sol), sol)

    def _integral(self, y: np.ndarray) -> Optional[List[Tuple[Hashable, Row]]]:
        """Cuts excluding an integral point, or None when it is a feasible ordering."""
        yi = np.rint(y)
        ok, witness = cut_consistency(self.graph, yi)
        if not ok:
            cycle = tuple(witness)  # type: ignore[arg-type]
            cut = OddCycleInequality(cycle, frozenset(e for e in cycle if yi[e] == 1))
            cuts = {cut.key: cut.row()}
            self.counters.bump(n_oddc=1)
            for key, row in self._separate(yi):
                cuts.setdefault(key, row)
            return list(cuts.items())
        trans = separate_transitivity(
            self.reduced, yi, self.config.tolerance, self.config.max_cuts_per_round
        )
        if trans:
            self.counters.bump(n_trans=len(trans))
            return [(("t", c.triple, c.upper), c.row()) for c in trans]

        sol = cut_to_solution(self.reduced, self.graph, yi)
        count = count_crossings(self.instance, sol)
        value = int(round(self.graph.objective(yi)))
        if count != value:
            logger.error("cut value %d disagrees with %d crossings", value, count)
        self.incumbent.offer(count, sol)
        return None

    def _branch(self, node: BranchNode, y: np.ndarray, bound: int) -> List[BranchNode]:
        frac = np.flatnonzero(np.abs(y - np.rint(y)) > INTEGRALITY_TOLERANCE)
        if not len(frac):
            # Integral point cut off in the last round; revisit the node.
            return [BranchNode(bound, self.counters.next_seq(), node.fixings)]
        if self.config.branching == "first-fractional":
            col = int(frac[0])
        else:
            col = int(frac[np.argmin(np.abs(y[frac] - 0.5))])
        logger.debug(
            "branching on edge %d (y=%.3f) at depth %d", col, y[col], node.depth
        )
        return [
            BranchNode(bound, self.counters.next_seq(), node.fixings + ((col, value),))
            for value in (0, 1)
        ]

    def process(self, node: BranchNode) -> List[BranchNode]:
        """Cut and bound one node; returns its children (the node itself on timeout)."""
        self.counters.bump(n_sub=1)
        self._set_bounds(node)
        bound = node.bound
        history: List[float] = []

        for _ in range(self.config.max_rounds_per_node):
            if self.clock.expired():
                self.timed_out = True
                return [BranchNode(bound, node.seq, node.fixings)]

            result = self._solve()
            self.clock.tick()
            if result.status is LPStatus.TIME_LIMIT:
                self.timed_out = True
                return [BranchNode(bound, node.seq, node.fixings)]
            if result.status is LPStatus.INFEASIBLE:
                return []
            if not result.ok:
                raise SolverError(f"LP relaxation is {result.status.value}")
            y = result.x
            bound = max(bound, self._bound(result.value))
            if bound >= self.incumbent.value:
                return []
            self._age_rows(y)

            if np.all(np.abs(y - np.rint(y)) <= INTEGRALITY_TOLERANCE):
                cuts = self._integral(y)
                if cuts is None:
                    return []
                self._add_cuts(cuts)
                continue

            if self.config.rounding:
                self._round(y)
                if bound >= self.incumbent.value:
                    return []

            history.append(result.value)
            if len(history) > TAILING_ROUNDS and (
                history[-1] - history[-1 - TAILING_ROUNDS] < TAILING_GAIN
            ):
                break

            cuts = self._from_pool(y)
            if not cuts:
                cuts = self._separate(y)
            if not self._add_cuts(cuts):
                break
        else:
            logger.debug("round limit reached at depth %d", node.depth)

        return self._branch(node, y, bound)
