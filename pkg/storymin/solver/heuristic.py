"""Layer-sweep barycenter heuristic that keeps every tree block contiguous."""

import logging
from typing import Dict, List, Optional, Tuple

from storymin import HEURISTIC_SWEEPS
from storymin.mlcm.crossings import count_crossings
from storymin.mlcm.instance import LayerTree, MlcmInstance, Node, Solution

logger = logging.getLogger(__name__)


def _relative(order: Tuple[int, ...]) -> Dict[int, float]:
    n = len(order)
    return {v: (k + 0.5) / n for k, v in enumerate(order)}


def _arrange(
    tree: LayerTree, current: Tuple[int, ...], bary: Dict[int, float]
) -> Tuple[int, ...]:
    first = {v: k for k, v in enumerate(current)}

    def key(node: Node) -> Tuple[float, int]:
        leaves = tree.leaf_sets.get(node, frozenset([node]))  # type: ignore[arg-type]
        mean = sum(bary[v] for v in leaves) / len(leaves) if leaves else 0.0
        return mean, min((first[v] for v in leaves), default=0)

    def walk(node: Node) -> List[int]:
        if tree.is_leaf(node):
            return [node]  # type: ignore[list-item]
        out: List[int] = []
        for child in sorted(tree.children[node], key=key):  # type: ignore[index]
            out.extend(walk(child))
        return out

    return tuple(walk(tree.root))


def _reorder(
    instance: MlcmInstance, orders: List[Tuple[int, ...]], r: int, ref: int
) -> Tuple[int, ...]:
    adj = instance.up if ref < r else instance.down
    ref_pos = _relative(orders[ref])
    own_pos = _relative(orders[r])
    bary = {}
    for v in orders[r]:
        neighbours = adj[v]
        if neighbours:
            bary[v] = sum(ref_pos[u] for u in neighbours) / len(neighbours)
        else:
            bary[v] = own_pos[v]
    return _arrange(instance.trees[r], orders[r], bary)


def barycenter_heuristic(
    instance: MlcmInstance,
    sweeps: int = HEURISTIC_SWEEPS,
    start: Optional[Solution] = None,
) -> Solution:
    """Alternate top-down and bottom-up sweeps, returning the best ordering seen.

    ``sweeps`` counts single passes; the first pass runs from the first layer
    to the last.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be at least 1")
    start = start if start is not None else Solution.from_trees(instance)
    orders = list(start.orders)
    best = Solution(tuple(orders))
    best_count = count_crossings(instance, best)

    for sweep in range(sweeps):
        if best_count == 0:
            break
        if sweep % 2 == 0:
            for r in range(1, instance.p):
                orders[r] = _reorder(instance, orders, r, r - 1)
        else:
            for r in range(instance.p - 2, -1, -1):
                orders[r] = _reorder(instance, orders, r, r + 1)
        candidate = Solution(tuple(orders))
        count = count_crossings(instance, candidate)
        logger.debug("barycenter sweep %d: %d crossings", sweep + 1, count)
        if count < best_count:
            best, best_count = candidate, count

    logger.info("barycenter heuristic: %d crossings", best_count)
    return best
