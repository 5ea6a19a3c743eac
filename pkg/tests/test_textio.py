import pytest

from storymin.errors import InstanceError
from storymin.mlcm import (
    LayerTree,
    MlcmInstance,
    Solution,
    dump_instance,
    dump_solution,
    parse_instance,
    parse_solution,
    validate_instance,
)

from conftest import random_instance, random_solution

EXAMPLE = """\
p=2
layer 1: a b c
tree 1: (root (s:1 a b) c)
edges 1: a-a, b-b, c-c
layer 2: a b c
tree 2: (root a b c)
"""


def test_parse_example():
    instance = parse_instance(EXAMPLE)
    assert instance.p == 2
    assert [instance.label(v) for v in instance.layers[0]] == ["a", "b", "c"]
    assert instance.trees[0].leaf_sets["s:1"] == frozenset({0, 1})
    assert instance.edges == (((0, 3), (1, 4), (2, 5)),)
    assert validate_instance(instance).ok


def test_dump_is_stable(rng):
    for _ in range(20):
        text = dump_instance(random_instance(rng))
        assert dump_instance(parse_instance(text)) == text


def test_missing_tree_is_a_star():
    instance = parse_instance("p=1\nlayer 1: x y\n")
    assert instance.trees[0] == LayerTree.star(instance.layers[0])


def test_names_with_punctuation_are_quoted():
    instance = MlcmInstance(
        ((0, 1),), (), (LayerTree.star([0, 1]),), {0: "Mrs. Smith", 1: "x-y"}
    )
    text = dump_instance(instance)
    assert '"Mrs. Smith"' in text
    assert '"x-y"' in text
    again = parse_instance(text)
    assert [again.label(v) for v in again.layers[0]] == ["Mrs. Smith", "x-y"]


@pytest.mark.parametrize(
    "text",
    [
        "layer 1: a\n",
        "p=1\nlayer 1: a a\n",
        "p=1\nlayer 1: a\ntree 1: (root b)\n",
        "p=2\nlayer 1: a\nlayer 2: b\nedges 1: a b\n",
        "p=1\nnonsense\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(InstanceError):
        parse_instance(text)


def test_solution_round_trip(rng):
    instance = random_instance(rng)
    sol = random_solution(rng, instance)
    text = dump_solution(instance, sol)
    assert text.rstrip().splitlines()[-1].startswith("crossings=")
    assert parse_solution(text, instance) == sol


def test_parse_solution_needs_every_layer():
    instance = parse_instance(EXAMPLE)
    with pytest.raises(InstanceError):
        parse_solution("layer 1: c b a\n", instance)


def test_solution_crossings_line():
    instance = parse_instance(EXAMPLE)
    sol = Solution(((2, 1, 0), (3, 4, 5)))
    assert dump_solution(instance, sol).endswith("crossings=3\n")
