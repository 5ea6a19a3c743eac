"""Separation of odd-cycle and transitivity inequalities."""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Sequence, Tuple

import networkx as nx
import numpy as np

from storymin import MAX_CUTS_PER_ROUND, SEPARATION_TOLERANCE
from storymin.maxcut.graph import MaxCutGraph
from storymin.ordering.reduce import ReducedModel

logger = logging.getLogger(__name__)

Row = Tuple[Dict[int, float], float, float]


@dataclass(frozen=True)
class OddCycleInequality:
    """``sum(y[F]) - sum(y[C - F]) <= |F| - 1`` for a cycle ``C`` and odd ``F``."""

    cycle: Tuple[int, ...]
    odd: FrozenSet[int]

    def __post_init__(self):
        if len(self.odd) % 2 != 1:
            raise ValueError("odd-cycle inequality needs an odd edge subset")
        if not self.odd <= set(self.cycle):
            raise ValueError("odd subset is not part of the cycle")

    @property
    def key(self) -> Tuple[FrozenSet[int], FrozenSet[int]]:
        return frozenset(self.cycle), self.odd

    def violation(self, y: Sequence[float]) -> float:
        inside = sum(y[e] for e in self.odd)
        outside = sum(y[e] for e in self.cycle if e not in self.odd)
        return inside - outside - (len(self.odd) - 1)

    def row(self) -> Row:
        coefs = {e: (1.0 if e in self.odd else -1.0) for e in self.cycle}
        return coefs, -np.inf, float(len(self.odd) - 1)


@dataclass(frozen=True)
class TransitivityCut:
    """A violated side of ``0 <= x_a + x_b - x_c <= 1`` over class values."""

    triple: Tuple[int, int, int]
    upper: bool
    violation: float

    def row(self) -> Row:
        a, b, c = self.triple
        coefs: Dict[int, float] = {}
        for e, w in ((a, 1.0), (b, 1.0), (c, -1.0)):
            coefs[e] = coefs.get(e, 0.0) + w
        if self.upper:
            return coefs, -np.inf, 1.0
        return coefs, 0.0, np.inf


def _doubled(graph: MaxCutGraph, y: np.ndarray) -> nx.Graph:
    d = nx.Graph()
    for e, (u, v) in enumerate(graph.ends):
        u, v, w = int(u), int(v), float(np.clip(y[e], 0.0, 1.0))
        for s in (0, 1):
            d.add_edge((u, s), (v, s), weight=w, index=e, cross=False)
            d.add_edge((u, s), (v, 1 - s), weight=1.0 - w, index=e, cross=True)
    return d


def _odd_simple_cycle(
    nodes: List[int], steps: List[Tuple[int, bool]]
) -> List[Tuple[int, bool]]:
    """Shorten a closed walk with an odd number of cross steps to a simple cycle."""
    while True:
        seen: Dict[int, int] = {}
        split = None
        for q, node in enumerate(nodes[:-1]):
            if node in seen:
                split = seen[node], q
                break
            seen[node] = q
        if split is None:
            return steps
        p, q = split
        inner = steps[p:q]
        if sum(cross for _, cross in inner) % 2 == 1:
            nodes, steps = nodes[p : q + 1], inner
        else:
            nodes, steps = nodes[: p + 1] + nodes[q + 1 :], steps[:p] + steps[q:]


def separate_odd_cycles(
    graph: MaxCutGraph,
    y: Sequence[float],
    tolerance: float = SEPARATION_TOLERANCE,
    max_cuts: int = MAX_CUTS_PER_ROUND,
) -> List[OddCycleInequality]:
    """Most violated odd-cycle inequalities through every node.

    Each node is split into two copies; same-side arcs cost ``y_e`` and
    side-changing arcs ``1 - y_e``. A path between the two copies of a node
    shorter than one closes a cycle whose side-changing edges form ``F``.
    """
    y = np.asarray(y, dtype=float)
    if graph.n_edges < 3:
        return []
    d = _doubled(graph, y)
    found: Dict[Tuple[FrozenSet[int], FrozenSet[int]], OddCycleInequality] = {}
    for v in range(graph.n_nodes):
        if (v, 0) not in d:
            continue
        try:
            length, path = nx.single_source_dijkstra(d, (v, 0), (v, 1), weight="weight")
        except nx.NetworkXNoPath:
            continue
        if length >= 1.0 - tolerance:
            continue
        steps = [
            (d.edges[a, b]["index"], d.edges[a, b]["cross"])
            for a, b in zip(path, path[1:])
        ]
        cycle = _odd_simple_cycle([node for node, _ in path], steps)
        cut = OddCycleInequality(
            tuple(e for e, _ in cycle), frozenset(e for e, cross in cycle if cross)
        )
        if cut.key not in found and cut.violation(y) > tolerance:
            found[cut.key] = cut

    cuts = sorted(found.values(), key=lambda c: (-c.violation(y), sorted(c.cycle)))
    logger.debug(
        "odd-cycle separation: %d violated of %d nodes", len(cuts), graph.n_nodes
    )
    return cuts[:max_cuts]


def separate_transitivity(
    reduced: ReducedModel,
    y: Sequence[float],
    tolerance: float = SEPARATION_TOLERANCE,
    max_cuts: int = MAX_CUTS_PER_ROUND,
) -> List[TransitivityCut]:
    """Check every reduced transitivity row at ``x = y[root edges]``."""
    t = reduced.triples
    if not len(t):
        return []
    x = np.asarray(y, dtype=float)[: reduced.n_vars]
    sums = x[t[:, 0]] + x[t[:, 1]] - x[t[:, 2]]
    cuts = []
    for k in np.flatnonzero(sums > 1.0 + tolerance):
        triple = tuple(int(v) for v in t[k])
        cuts.append(TransitivityCut(triple, True, float(sums[k] - 1.0)))
    for k in np.flatnonzero(sums < -tolerance):
        triple = tuple(int(v) for v in t[k])
        cuts.append(TransitivityCut(triple, False, float(-sums[k])))
    cuts.sort(key=lambda c: (-c.violation, c.triple, c.upper))
    return cuts[:max_cuts]
