"""Max-cut form of the reduced ordering model.

Node 0 is the root; class ``c`` is node ``c + 1``. Edge ``c`` is the root
edge of class ``c``, so on an integral cut ``y[c]`` is the class value. Pair
edges follow, one per class pair carrying crossing terms: xor terms are the
cut indicator of the edge, xnor terms its complement.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from storymin.mlcm.instance import Solution
from storymin.ordering.model import Parity, decode_assignment, encode_solution
from storymin.ordering.reduce import ReducedModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MaxCutGraph:
    n_nodes: int
    ends: np.ndarray
    weights: np.ndarray
    n_root: int
    offset: int

    @property
    def n_edges(self) -> int:
        return len(self.ends)

    @cached_property
    def edge_index(self) -> Dict[Tuple[int, int], int]:
        return {(int(u), int(v)): e for e, (u, v) in enumerate(self.ends)}

    @cached_property
    def nx_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n_nodes))
        for e, (u, v) in enumerate(self.ends):
            g.add_edge(int(u), int(v), index=e)
        return g

    def objective(self, y: Sequence[float]) -> float:
        return float(np.dot(self.weights, np.asarray(y, dtype=float))) + self.offset

    def root_values(self, y: Sequence[float]) -> np.ndarray:
        return np.asarray(y, dtype=float)[: self.n_root]


def build_maxcut(reduced: ReducedModel) -> MaxCutGraph:
    n = reduced.n_vars
    offset = reduced.offset
    pair: Counter = Counter()
    for term in reduced.terms:
        key = (term.var_a + 1, term.var_b + 1)
        if term.parity is Parity.XOR:
            pair[key] += term.weight
        else:
            pair[key] -= term.weight
            offset += term.weight

    ends: List[Tuple[int, int]] = [(0, c + 1) for c in range(n)]
    weights: List[int] = [0] * n
    for (u, v), w in sorted(pair.items()):
        if w:
            ends.append((u, v))
            weights.append(w)

    graph = MaxCutGraph(
        n_nodes=n + 1,
        ends=np.array(ends, dtype=np.int64).reshape(-1, 2),
        weights=np.array(weights, dtype=np.int64),
        n_root=n,
        offset=offset,
    )
    logger.info(
        "max-cut graph: %d nodes, %d edges (%d pair edges), offset %d",
        graph.n_nodes,
        graph.n_edges,
        graph.n_edges - n,
        offset,
    )
    return graph


def _tree_path(
    parent: Dict[int, Optional[Tuple[int, int]]], depth: Dict[int, int], u: int, v: int
) -> List[int]:
    up: List[int] = []
    down: List[int] = []
    while depth[u] > depth[v]:
        node, e = parent[u]  # type: ignore[misc]
        up.append(e)
        u = node
    while depth[v] > depth[u]:
        node, e = parent[v]  # type: ignore[misc]
        down.append(e)
        v = node
    while u != v:
        node, e = parent[u]  # type: ignore[misc]
        up.append(e)
        u = node
        node, e = parent[v]  # type: ignore[misc]
        down.append(e)
        v = node
    return up + down[::-1]


def cut_consistency(
    graph: MaxCutGraph, y: Sequence[float]
) -> Tuple[bool, Optional[List[int]]]:
    """Whether an integral ``y`` is the edge set of a cut.

    Labels sides along a breadth-first spanning forest; the witness is the
    edge indices of a cycle holding an odd number of cut edges.
    """
    values = np.rint(np.asarray(y, dtype=float)).astype(np.int64)
    g = graph.nx_graph
    side: Dict[int, int] = {}
    depth: Dict[int, int] = {}
    parent: Dict[int, Optional[Tuple[int, int]]] = {}
    for start in g.nodes:
        if start in side:
            continue
        side[start], depth[start], parent[start] = 0, 0, None
        for u, v in nx.bfs_edges(g, start):
            e = g.edges[u, v]["index"]
            side[v] = side[u] ^ int(values[e])
            depth[v] = depth[u] + 1
            parent[v] = (u, e)

    for e, (u, v) in enumerate(graph.ends):
        u, v = int(u), int(v)
        if side[u] ^ side[v] != values[e]:
            return False, _tree_path(parent, depth, u, v) + [e]
    return True, None


def cut_to_solution(
    reduced: ReducedModel, graph: MaxCutGraph, y: Sequence[float]
) -> Solution:
    xc = np.rint(graph.root_values(y)).astype(np.int64)
    return decode_assignment(reduced.model, reduced.expand_assignment(xc))


def solution_to_cut(
    reduced: ReducedModel, graph: MaxCutGraph, sol: Solution
) -> np.ndarray:
    xc = reduced.reduce_assignment(encode_solution(reduced.model, sol))
    side = np.concatenate([[0], xc]).astype(np.int64)
    return side[graph.ends[:, 0]] ^ side[graph.ends[:, 1]]


def dump_maxcut(graph: MaxCutGraph) -> str:
    lines = [f"nodes {graph.n_nodes}", f"offset {graph.offset}"]
    for e, ((u, v), w) in enumerate(zip(graph.ends, graph.weights)):
        kind = "root" if e < graph.n_root else "pair"
        lines.append(f"edge {e} {u} {v} {w} {kind}")
    return "\n".join(lines) + "\n"
