"""Brute-force exact solver used to check the branch-and-cut results.

Orderings of each layer are enumerated straight from its tree; the optimum
is then found by dynamic programming over layers, since crossings only
depend on pairs of adjacent layers.
"""

import itertools
import logging
import math
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from storymin import ORACLE_BUDGET, ORACLE_LEAF_CAP
from storymin.errors import OracleBudgetError
from storymin.mlcm.crossings import count_crossings
from storymin.mlcm.instance import Edge, LayerTree, MlcmInstance, Node, Solution

logger = logging.getLogger(__name__)


def count_tree_orderings(tree: LayerTree) -> int:
    return math.prod(math.factorial(len(cs)) for cs in tree.children.values())


def enumerate_tree_orderings(
    tree: LayerTree, cap: int = ORACLE_LEAF_CAP
) -> Iterator[Tuple[int, ...]]:
    """Every tree-consistent permutation of the leaves, each exactly once."""
    n_leaves = len(tree.leaf_order)
    if n_leaves > cap:
        raise OracleBudgetError(f"tree has {n_leaves} leaves, cap is {cap}")

    def orderings(node: Node) -> Iterator[Tuple[int, ...]]:
        if tree.is_leaf(node):
            yield (node,)  # type: ignore[misc]
            return
        kids = tree.children[node]  # type: ignore[index]
        for children in itertools.permutations(kids):
            for parts in itertools.product(*(list(orderings(c)) for c in children)):
                yield tuple(v for part in parts for v in part)

    return orderings(tree.root)


def _pair_signs(states: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """Sign of the position difference of every edge pair, for every state."""
    pos = states[:, columns]
    first, second = np.triu_indices(len(columns), k=1)
    return np.sign(pos[:, first] - pos[:, second]).astype(np.int64)


def _gap_costs(
    gap: Sequence[Edge], upper: np.ndarray, upper_nodes, lower: np.ndarray, lower_nodes
) -> np.ndarray:
    """Crossing counts for every (upper state, lower state) combination."""
    if len(gap) < 2:
        return np.zeros((len(upper), len(lower)), dtype=np.int64)
    up_col = {v: k for k, v in enumerate(upper_nodes)}
    low_col = {v: k for k, v in enumerate(lower_nodes)}
    su = _pair_signs(upper, np.array([up_col[u] for u, _ in gap]))
    sv = _pair_signs(lower, np.array([low_col[v] for _, v in gap]))
    both = np.abs(su) @ np.abs(sv).T
    agree = su @ sv.T
    return (both - agree) // 2


def _position_table(tree: LayerTree, nodes: Sequence[int], cap: int) -> np.ndarray:
    col = {v: k for k, v in enumerate(nodes)}
    rows = []
    for order in enumerate_tree_orderings(tree, cap):
        row = np.empty(len(nodes), dtype=np.int64)
        for k, v in enumerate(order):
            row[col[v]] = k
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(nodes))


def brute_force_optimum(
    instance: MlcmInstance, budget: int = ORACLE_BUDGET, cap: int = ORACLE_LEAF_CAP
) -> Tuple[int, Solution]:
    """Minimum crossing count and a witness, by dynamic programming over layers."""
    counts = [count_tree_orderings(tree) for tree in instance.trees]
    work = sum(a * b for a, b in zip(counts, counts[1:])) + sum(counts)
    if work > budget:
        raise OracleBudgetError(f"{work} combinations exceed the budget of {budget}")
    logger.debug("oracle: %s orderings per layer", counts)

    nodes = [tuple(layer) for layer in instance.layers]
    tables = [_position_table(t, ns, cap) for t, ns in zip(instance.trees, nodes)]
    if not tables:
        return 0, Solution(())

    value = np.zeros(len(tables[0]), dtype=np.int64)
    back: List[np.ndarray] = []
    for r, gap in enumerate(instance.edges):
        cost = _gap_costs(gap, tables[r], nodes[r], tables[r + 1], nodes[r + 1])
        total = value[:, None] + cost
        back.append(np.argmin(total, axis=0))
        value = total.min(axis=0)

    state = int(np.argmin(value))
    chosen = [state]
    for pointers in reversed(back):
        state = int(pointers[state])
        chosen.append(state)
    chosen.reverse()

    orders = []
    for table, ns, s in zip(tables, nodes, chosen):
        orders.append(tuple(ns[k] for k in np.argsort(table[s])))
    return int(value.min()), Solution(tuple(orders))


def naive_optimum(
    instance: MlcmInstance, budget: int = ORACLE_BUDGET, cap: int = ORACLE_LEAF_CAP
) -> Tuple[int, Optional[Solution]]:
    """Full product enumeration; only for cross-checking the DP on tiny inputs."""
    total = math.prod(count_tree_orderings(tree) for tree in instance.trees)
    if total > budget:
        raise OracleBudgetError(f"{total} combinations exceed the budget of {budget}")
    per_layer = [list(enumerate_tree_orderings(tree, cap)) for tree in instance.trees]
    best: Optional[int] = None
    witness: Optional[Solution] = None
    for orders in itertools.product(*per_layer):
        sol = Solution(orders)
        count = count_crossings(instance, sol)
        if best is None or count < best:
            best, witness = count, sol
    return (best or 0), witness
