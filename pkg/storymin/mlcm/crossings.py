from typing import Dict, Sequence, Tuple

import numpy as np

from storymin.mlcm.instance import Edge, MlcmInstance, Solution


def gap_crossings(
    edges: Sequence[Edge], upper: Dict[int, int], lower: Dict[int, int]
) -> int:
    """Crossings between two consecutive layers given node positions on each."""
    if len(edges) < 2:
        return 0
    a = np.fromiter((upper[u] for u, _ in edges), dtype=np.int64, count=len(edges))
    b = np.fromiter((lower[v] for _, v in edges), dtype=np.int64, count=len(edges))
    da = np.sign(a[:, None] - a[None, :])
    db = np.sign(b[:, None] - b[None, :])
    # Shared endpoints give a zero sign and never count.
    return int(np.count_nonzero(da * db < 0) // 2)


def _positions(instance: MlcmInstance, sol: Solution) -> Tuple[Dict[int, int], ...]:
    if len(sol.orders) != instance.p:
        raise ValueError(
            f"solution has {len(sol.orders)} layers, expected {instance.p}"
        )
    for r, (layer, order) in enumerate(zip(instance.layers, sol.orders)):
        missing = set(layer) - set(order)
        if missing:
            raise ValueError(f"permutation of layer {r + 1} misses node {min(missing)}")
        if len(order) != len(layer) or set(order) != set(layer):
            raise ValueError(f"permutation of layer {r + 1} is not a permutation")
    return sol.positions


def count_crossings(instance: MlcmInstance, sol: Solution) -> int:
    pos = _positions(instance, sol)
    return sum(
        gap_crossings(gap, pos[r], pos[r + 1]) for r, gap in enumerate(instance.edges)
    )


def crossings_per_gap(instance: MlcmInstance, sol: Solution) -> Tuple[int, ...]:
    pos = _positions(instance, sol)
    return tuple(
        gap_crossings(gap, pos[r], pos[r + 1]) for r, gap in enumerate(instance.edges)
    )
