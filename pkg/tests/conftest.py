import json
import random
from typing import Dict, List, Optional

import pytest

from storymin.mlcm import LayerTree, MlcmInstance, Solution
from storymin.story import Scene, Story


def random_tree(rng: random.Random, layer: List[int], max_blocks: int = 2) -> LayerTree:
    """Height-2 tree with up to ``max_blocks`` scene blocks of two or more leaves."""
    leaves = list(layer)
    rng.shuffle(leaves)
    blocks: Dict[str, List[int]] = {}
    for b in range(rng.randint(0, max_blocks)):
        if len(leaves) < 2:
            break
        size = rng.randint(2, min(3, len(leaves)))
        blocks[f"s{b}"] = sorted(leaves[:size])
        leaves = leaves[size:]
    return LayerTree.from_blocks(blocks, sorted(leaves))


def random_instance(
    rng: random.Random,
    layers: Optional[int] = None,
    min_nodes: int = 3,
    max_nodes: int = 7,
    max_blocks: int = 2,
    density: float = 0.8,
) -> MlcmInstance:
    """Random instance whose gaps are partial matchings."""
    p = layers if layers is not None else rng.randint(2, 4)
    ids = 0
    node_layers = []
    for _ in range(p):
        n = rng.randint(min_nodes, max_nodes)
        node_layers.append(list(range(ids, ids + n)))
        ids += n
    edges = []
    for upper, lower in zip(node_layers, node_layers[1:]):
        targets = list(lower)
        rng.shuffle(targets)
        gap = [(u, v) for u, v in zip(upper, targets) if rng.random() < density]
        edges.append(tuple(gap))
    trees = [random_tree(rng, layer, max_blocks) for layer in node_layers]
    return MlcmInstance(tuple(map(tuple, node_layers)), tuple(edges), tuple(trees))


def random_solution(rng: random.Random, instance: MlcmInstance) -> Solution:
    """A uniformly shuffled tree-consistent order per layer."""
    orders = []
    for tree in instance.trees:

        def walk(node):
            if tree.is_leaf(node):
                return [node]
            children = list(tree.children[node])
            rng.shuffle(children)
            return [v for c in children for v in walk(c)]

        orders.append(tuple(walk(tree.root)))
    return Solution(tuple(orders))


def random_story(rng: random.Random, n_characters: int = 5, n_slots: int = 4) -> Story:
    """Scenes on a grid of time slots; no character is in two scenes of a slot."""
    characters = [f"c{k}" for k in range(n_characters)]
    scenes = []
    for slot in range(n_slots):
        pool = list(characters)
        rng.shuffle(pool)
        while len(pool) >= 2 and rng.random() < 0.7:
            size = rng.randint(2, min(3, len(pool)))
            members, pool = pool[:size], pool[size:]
            scene_id = f"t{slot}-{len(scenes)}"
            scenes.append(Scene(scene_id, members, 2 * slot, 2 * slot + 1))
    if not scenes:
        scenes.append(Scene("t0", characters[:2], 0, 1))
    used = {c for s in scenes for c in s.members}
    return Story(tuple(c for c in characters if c in used), tuple(scenes))


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def bundle_swap_story() -> Story:
    return Story(
        ("a", "b", "c", "d"),
        (
            Scene("ab", {"a", "b"}, 0, 1),
            Scene("cd", {"c", "d"}, 0, 1),
            Scene("ac", {"a", "c"}, 2, 3),
            Scene("bd", {"b", "d"}, 2, 3),
        ),
    )


@pytest.fixture
def bundle_swap_json(bundle_swap_story) -> str:
    from storymin.story import dump_story

    return dump_story(bundle_swap_story)


@pytest.fixture
def bundle_swap() -> MlcmInstance:
    """Two layers: {a,b},{c,d} above {a,c},{b,d}; the optimum is one crossing."""
    names = {0: "a", 1: "b", 2: "c", 3: "d", 4: "a", 5: "b", 6: "c", 7: "d"}
    return MlcmInstance(
        ((0, 1, 2, 3), (4, 5, 6, 7)),
        (((0, 4), (1, 5), (2, 6), (3, 7)),),
        (
            LayerTree.from_blocks({"s:ab": [0, 1], "s:cd": [2, 3]}),
            LayerTree.from_blocks({"s:ac": [4, 6], "s:bd": [5, 7]}),
        ),
        names,
    )


@pytest.fixture
def story_file(tmp_path, bundle_swap_json):
    path = tmp_path / "story.json"
    path.write_text(bundle_swap_json)
    return path


def write_json(path, doc) -> str:
    path.write_text(json.dumps(doc))
    return str(path)
