import itertools

import numpy as np
import pytest

from storymin.errors import OrderingError
from storymin.mlcm import (
    LayerTree,
    MlcmInstance,
    Solution,
    count_crossings,
    is_tree_consistent,
)
from storymin.ordering import (
    Parity,
    build_model,
    decode_assignment,
    dump_model,
    encode_solution,
    objective_value,
    transitivity_witness,
)

from conftest import random_instance, random_solution


def test_variable_index_counts_pairs(bundle_swap):
    model = build_model(bundle_swap)
    assert model.n_vars == 6 + 6
    assert model.index.layer_vars(1) == slice(6, 12)
    assert model.n_triples == 4 + 4


def test_crossing_terms_of_bundle_swap(bundle_swap):
    model = build_model(bundle_swap)
    assert len(model.terms) == 6
    assert all(t.parity in (Parity.XOR, Parity.XNOR) for t in model.terms)


@pytest.mark.parametrize("seed", range(10))
def test_objective_matches_crossings(seed):
    import random

    rng = random.Random(seed)
    for _ in range(100):
        instance = random_instance(rng)
        indexed_by = random_solution(rng, instance) if rng.random() < 0.5 else None
        model = build_model(instance, indexed_by)
        sol = random_solution(rng, instance)
        x = encode_solution(model, sol)
        assert objective_value(model, x) == count_crossings(instance, sol)


def test_decode_inverts_encode(rng):
    for _ in range(50):
        instance = random_instance(rng)
        model = build_model(instance)
        sol = random_solution(rng, instance)
        assert decode_assignment(model, encode_solution(model, sol)) == sol


def test_tree_equalities_hold_on_consistent_orders(rng):
    for _ in range(50):
        instance = random_instance(rng)
        model = build_model(instance, random_solution(rng, instance))
        x = encode_solution(model, random_solution(rng, instance))
        for eq in model.equalities:
            assert x[eq.u] == x[eq.v]


def test_equalities_follow_the_tree():
    tree = LayerTree.from_blocks({"s:1": [0, 1]}, [2])
    instance = MlcmInstance(((0, 1, 2),), (), (tree,))
    model = build_model(instance)
    # 0 and 1 sit on the same side of 2
    x02, x12 = model.index.var(0, 2), model.index.var(1, 2)
    assert {(eq.u, eq.v) for eq in model.equalities} == {(x02, x12)}


def test_decode_rejects_cyclic_assignment():
    instance = MlcmInstance(((0, 1, 2),), (), (LayerTree.star([0, 1, 2]),))
    model = build_model(instance)
    x = np.zeros(model.n_vars, dtype=np.int64)
    x[model.index.var(0, 1)] = 1
    x[model.index.var(1, 2)] = 1
    x[model.index.var(0, 2)] = 0
    with pytest.raises(OrderingError) as err:
        decode_assignment(model, x)
    assert err.value.witness == (0, 1, 2)


def test_index_order_must_be_tree_consistent(bundle_swap):
    with pytest.raises(ValueError):
        build_model(bundle_swap, Solution(((0, 2, 1, 3), (4, 5, 6, 7))))


def test_dump_model_lists_everything(bundle_swap):
    text = dump_model(build_model(bundle_swap))
    assert text.startswith("variables 12\n")
    assert text.count("\nterm ") == 6
    assert text.count("\ntriple ") == 8


def consistent_assignments(model):
    for bits in itertools.product((0, 1), repeat=model.n_vars):
        x = np.array(bits, dtype=np.int64)
        if transitivity_witness(model, x) is not None:
            continue
        if all(x[eq.u] == x[eq.v] for eq in model.equalities):
            yield x


@pytest.mark.parametrize(
    "tree",
    [
        LayerTree.from_blocks({"s:1": [0, 1]}, [2, 3]),
        LayerTree.from_blocks({"s:1": [0, 2], "s:2": [1, 3, 4]}),
        LayerTree("root", {"root": ("s:x", 3, 4), "s:x": ("s:y", 2), "s:y": (0, 1)}),
        LayerTree.star([0, 1, 2, 3]),
    ],
)
def test_transitive_assignments_with_equalities_are_tree_orders(tree):
    layer = tuple(sorted(tree.leaf_order))
    instance = MlcmInstance((layer,), (), (tree,))
    model = build_model(instance)
    decoded = set()
    for x in consistent_assignments(model):
        (order,) = decode_assignment(model, x).orders
        assert is_tree_consistent(tree, order)
        decoded.add(order)
    expected = {
        pi for pi in itertools.permutations(layer) if is_tree_consistent(tree, pi)
    }
    assert decoded == expected


def test_random_trees_admit_only_tree_orders(rng):
    for _ in range(20):
        instance = random_instance(rng, layers=1, min_nodes=3, max_nodes=5)
        model = build_model(instance, random_solution(rng, instance))
        (tree,) = instance.trees
        for x in consistent_assignments(model):
            (order,) = decode_assignment(model, x).orders
            assert is_tree_consistent(tree, order)
