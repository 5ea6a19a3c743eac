"""Story to MLCM-TC construction and the layer-merging reduction."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from storymin.errors import StoryValidationError
from storymin.mlcm.instance import (
    ROOT,
    LayerTree,
    MlcmInstance,
    Solution,
    tree_signature,
)
from storymin.story import Story, validate_story

logger = logging.getLogger(__name__)


def scene_label(scene_id: str) -> str:
    return f"s:{scene_id}"


@dataclass(frozen=True)
class TransformTrace:
    times: Tuple[Fraction, ...]
    active: Tuple[Tuple[str, ...], ...]
    alive: Tuple[Tuple[str, ...], ...]
    node_of: Dict[Tuple[str, int], int] = field(default_factory=dict)


def build_instance(story: Story) -> Tuple[MlcmInstance, TransformTrace]:
    report = validate_story(story)
    if not report.ok:
        raise StoryValidationError(report)

    times = tuple(sorted({t for s in story.scenes for t in (s.begin, s.end)}))
    spans = story.lifespans()

    layers: List[Tuple[int, ...]] = []
    trees: List[LayerTree] = []
    labels: Dict[int, str] = {}
    node_of: Dict[Tuple[str, int], int] = {}
    active_ids: List[Tuple[str, ...]] = []
    alive_names: List[Tuple[str, ...]] = []

    for r, t in enumerate(times):
        alive = tuple(
            c for c in story.characters if c in spans and spans[c].contains(t)
        )
        for c in alive:
            v = len(labels)
            node_of[(c, r)] = v
            labels[v] = c
        layers.append(tuple(node_of[(c, r)] for c in alive))
        alive_names.append(alive)

        active = [s for s in story.scenes if s.active_at(t)]
        active_ids.append(tuple(s.id for s in active))
        blocks = {
            scene_label(s.id): [node_of[(c, r)] for c in alive if c in s.members]
            for s in active
        }
        covered = {v for block in blocks.values() for v in block}
        if len(blocks) == 1 and len(covered) == len(alive):
            label, leaves = next(iter(blocks.items()))
            trees.append(LayerTree(label, {label: tuple(leaves)}))
        else:
            free = [node_of[(c, r)] for c in alive if node_of[(c, r)] not in covered]
            trees.append(LayerTree.from_blocks(blocks, free, root=ROOT))

    edges = []
    for r in range(len(times) - 1):
        edges.append(
            tuple(
                (node_of[(c, r)], node_of[(c, r + 1)])
                for c in alive_names[r]
                if (c, r + 1) in node_of
            )
        )

    instance = MlcmInstance(tuple(layers), tuple(edges), tuple(trees), labels)
    trace = TransformTrace(times, tuple(active_ids), tuple(alive_names), node_of)
    logger.info(
        "story with %d scenes -> %d layers, %d nodes, %d edges",
        len(story.scenes),
        instance.p,
        instance.n_nodes,
        instance.n_edges,
    )
    return instance, trace


@dataclass(frozen=True)
class MergeMap:
    """How the layers of an instance were folded onto fewer layers.

    ``layer_map[r]`` is the merged index of original layer ``r``;
    ``representatives[m]`` the original layer whose nodes and tree the merged
    layer ``m`` keeps; ``node_map`` sends every original node to its merged node.
    """

    layer_map: Tuple[int, ...]
    representatives: Tuple[int, ...]
    node_map: Dict[int, int]
    original: MlcmInstance

    @classmethod
    def identity(cls, instance: MlcmInstance) -> "MergeMap":
        return cls(
            tuple(range(instance.p)),
            tuple(range(instance.p)),
            {v: v for layer in instance.layers for v in layer},
            instance,
        )

    def expand(self, solution: Solution) -> Solution:
        """Carry a solution of the merged instance back to every original layer."""
        orders = []
        for r, layer in enumerate(self.original.layers):
            back = {self.node_map[v]: v for v in layer}
            merged = solution.orders[self.layer_map[r]]
            orders.append(tuple(back[v] for v in merged))
        return Solution(tuple(orders))

    def project(self, solution: Solution) -> Solution:
        """Restrict a solution of the original instance to the representative layers."""
        return Solution(
            tuple(
                tuple(self.node_map[v] for v in solution.orders[rep])
                for rep in self.representatives
            )
        )


def _matching(instance: MlcmInstance, r: int) -> Optional[Dict[int, int]]:
    """Map from V_{r+1} onto V_r when E_r is a perfect matching."""
    upper, lower, gap = instance.layers[r], instance.layers[r + 1], instance.edges[r]
    if not (len(gap) == len(upper) == len(lower)):
        return None
    back: Dict[int, int] = {}
    forward = set()
    for u, v in gap:
        if v in back or u in forward:
            return None
        back[v] = u
        forward.add(u)
    return back


def _mergeable(instance: MlcmInstance, r: int) -> Optional[Dict[int, int]]:
    back = _matching(instance, r)
    if back is None:
        return None
    if any(len(instance.down[v]) > 1 for v in instance.layers[r + 1]):
        return None
    upper = tree_signature(instance.trees[r])
    lower = tree_signature(instance.trees[r + 1], back)
    return back if upper == lower else None


def merge_layers(instance: MlcmInstance) -> Tuple[MlcmInstance, MergeMap]:
    if instance.p == 0:
        return instance, MergeMap.identity(instance)

    layer_map = [0]
    representatives = [0]
    node_map: Dict[int, int] = {v: v for v in instance.layers[0]}
    for r in range(instance.p - 1):
        back = _mergeable(instance, r)
        if back is not None:
            layer_map.append(layer_map[-1])
            for v in instance.layers[r + 1]:
                node_map[v] = node_map[back[v]]
        else:
            layer_map.append(layer_map[-1] + 1)
            representatives.append(r + 1)
            node_map.update({v: v for v in instance.layers[r + 1]})

    merge = MergeMap(tuple(layer_map), tuple(representatives), node_map, instance)
    if len(representatives) == instance.p:
        return instance, merge

    edges = []
    for m in range(len(representatives) - 1):
        last = representatives[m + 1] - 1
        edges.append(tuple((node_map[u], v) for u, v in instance.edges[last]))
    merged = MlcmInstance(
        tuple(instance.layers[rep] for rep in representatives),
        tuple(edges),
        tuple(instance.trees[rep] for rep in representatives),
        {v: instance.label(v) for rep in representatives for v in instance.layers[rep]},
    )
    logger.info("merged %d layers into %d", instance.p, merged.p)
    return merged, merge

