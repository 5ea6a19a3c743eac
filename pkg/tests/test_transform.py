import pytest

from storymin.errors import StoryValidationError
from storymin.mlcm import (
    LayerTree,
    MlcmInstance,
    Solution,
    build_instance,
    count_crossings,
    merge_layers,
    validate_instance,
)
from storymin.mlcm.transform import MergeMap
from storymin.oracle import brute_force_optimum
from storymin.story import Scene, Story

from conftest import random_instance, random_story


def test_one_layer_per_distinct_time(bundle_swap_story):
    instance, trace = build_instance(bundle_swap_story)
    assert instance.p == 4
    assert trace.times == (0, 1, 2, 3)
    assert validate_instance(instance).ok
    for r in range(3):
        assert len(instance.edges[r]) == 4


def test_scene_blocks_become_subtrees(bundle_swap_story):
    instance, trace = build_instance(bundle_swap_story)
    tree = instance.trees[2]
    blocks = {
        label: {instance.label(v) for v in leaves}
        for label, leaves in tree.leaf_sets.items()
        if label != tree.root
    }
    assert blocks == {"s:ac": {"a", "c"}, "s:bd": {"b", "d"}}
    assert set(trace.active[2]) == {"ac", "bd"}


def test_single_scene_covering_everyone_is_the_root():
    story = Story(("a", "b"), (Scene("all", {"a", "b"}, 0, 1),))
    instance, _ = build_instance(story)
    assert instance.trees[0].root == "s:all"
    assert instance.trees[0].is_bundle("s:all")


def test_characters_exist_only_during_their_lifespan():
    story = Story(
        ("a", "b", "c"),
        (Scene("s1", {"a", "b"}, 0, 1), Scene("s2", {"b", "c"}, 2, 3)),
    )
    instance, trace = build_instance(story)
    assert trace.alive[0] == ("a", "b")
    assert trace.alive[2] == ("b", "c")
    # a leaves after t=1, c enters at t=2
    assert len(instance.edges[1]) == 1


def test_invalid_story_is_rejected():
    story = Story(("a",), (Scene("s1", {"a"}, 0, 2), Scene("s2", {"a"}, 1, 3)))
    with pytest.raises(StoryValidationError) as err:
        build_instance(story)
    assert "overlapping_scenes" in err.value.report.codes()


def test_merge_folds_identical_neighbours(bundle_swap_story):
    instance, _ = build_instance(bundle_swap_story)
    merged, merge = merge_layers(instance)
    assert merged.p == 2
    assert merge.layer_map == (0, 0, 1, 1)
    assert merge.representatives == (0, 2)
    assert validate_instance(merged).ok


def test_merge_is_idempotent(rng):
    for _ in range(30):
        instance, _ = build_instance(random_story(rng))
        once, _ = merge_layers(instance)
        twice, _ = merge_layers(once)
        assert twice.p == once.p
        assert twice.layers == once.layers


def test_expand_keeps_crossings(rng):
    for _ in range(30):
        instance, _ = build_instance(random_story(rng))
        merged, merge = merge_layers(instance)
        sol = Solution.from_trees(merged)
        expanded = merge.expand(sol)
        assert count_crossings(instance, expanded) == count_crossings(merged, sol)
        assert merge.project(expanded) == sol


def test_merge_keeps_the_optimum(rng):
    checked = 0
    for _ in range(60):
        instance, _ = build_instance(random_story(rng, n_characters=5, n_slots=3))
        merged, _ = merge_layers(instance)
        if merged.p == instance.p:
            continue
        assert brute_force_optimum(merged)[0] == brute_force_optimum(instance)[0]
        checked += 1
    assert checked > 0


def test_merge_needs_a_single_edge_downwards():
    # 2 and 3 both lead to 4; folding layers 0 and 1 would hide that edge pair
    instance = MlcmInstance(
        ((0, 1), (2, 3), (4, 5)),
        (((0, 2), (1, 3)), ((2, 4), (2, 5), (3, 4))),
        (LayerTree.star([0, 1]), LayerTree.star([2, 3]), LayerTree.star([4, 5])),
    )
    merged, merge = merge_layers(instance)
    assert merged.p == 3
    assert merge == MergeMap.identity(instance)
