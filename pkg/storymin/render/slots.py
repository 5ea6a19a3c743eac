from typing import Dict, Tuple

from storymin.mlcm.instance import MlcmInstance, Solution, is_tree_consistent, lca

BUNDLE_GAP = 1
FREE_GAP = 2


def assign_slots(instance: MlcmInstance, sol: Solution) -> Tuple[Dict[int, int], ...]:
    """Vertical slot of every node, scanning each layer from the top.

    Neighbours sharing a scene bundle sit one slot apart, all others two.
    """
    slots = []
    for r, (tree, order) in enumerate(zip(instance.trees, sol.orders)):
        if not is_tree_consistent(tree, order):
            raise ValueError(f"order of layer {r + 1} is not tree-consistent")
        layer: Dict[int, int] = {}
        y = 0
        for k, v in enumerate(order):
            if k:
                shared = lca(tree, order[k - 1], v)
                y += BUNDLE_GAP if tree.is_bundle(shared) else FREE_GAP
            layer[v] = y
        slots.append(layer)
    return tuple(slots)
