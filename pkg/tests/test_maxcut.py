import itertools

import numpy as np

from storymin.errors import OrderingError
from storymin.maxcut import (
    build_maxcut,
    cut_consistency,
    cut_to_solution,
    dump_maxcut,
    solution_to_cut,
)
from storymin.mlcm import count_crossings, is_tree_consistent
from storymin.ordering import (
    build_model,
    decode_assignment,
    encode_solution,
    identify_variables,
    objective_value,
)

from conftest import random_instance, random_solution


def pipeline(instance, order=None):
    reduced, _ = identify_variables(build_model(instance, order))
    return reduced, build_maxcut(reduced)


def test_root_edges_come_first(bundle_swap):
    reduced, graph = pipeline(bundle_swap)
    assert graph.n_nodes == reduced.n_vars + 1
    assert all(tuple(graph.ends[c]) == (0, c + 1) for c in range(reduced.n_vars))
    assert (graph.weights[: graph.n_root] == 0).all()
    assert (graph.weights[graph.n_root :] != 0).all()


def test_cut_value_equals_crossings(rng):
    for _ in range(200):
        instance = random_instance(rng)
        reduced, graph = pipeline(instance, random_solution(rng, instance))
        sol = random_solution(rng, instance)
        y = solution_to_cut(reduced, graph, sol)
        assert cut_consistency(graph, y)[0]
        assert graph.objective(y) == count_crossings(instance, sol)
        back = cut_to_solution(reduced, graph, y)
        assert count_crossings(instance, back) == count_crossings(instance, sol)


def test_inconsistent_cut_has_odd_witness(bundle_swap):
    reduced, graph = pipeline(bundle_swap)
    pair = graph.n_root
    u, v = graph.ends[pair]
    y = np.zeros(graph.n_edges)
    y[pair] = 1  # a pair edge cut while both its root edges are not
    ok, witness = cut_consistency(graph, y)
    assert not ok
    assert sum(y[e] for e in witness) % 2 == 1
    assert pair in witness


def test_exhaustive_cuts_reproduce_the_ordering_model(rng):
    checked = 0
    while checked < 25:
        instance = random_instance(rng, layers=2, min_nodes=2, max_nodes=4)
        model = build_model(instance)
        reduced, graph = pipeline(instance)
        if reduced.n_vars > 12:
            continue
        feasible = set()
        for bits in itertools.product((0, 1), repeat=reduced.n_vars):
            x = reduced.expand_assignment(bits)
            try:
                sol = decode_assignment(model, x)
            except OrderingError:
                continue
            pairs = zip(instance.trees, sol.orders)
            if not all(is_tree_consistent(t, o) for t, o in pairs):
                continue
            y = solution_to_cut(reduced, graph, sol)
            assert tuple(graph.root_values(y).astype(int)) == bits
            assert graph.objective(y) == objective_value(model, x)
            feasible.add(bits)
        expected = set()
        for _ in range(40):
            sol = random_solution(rng, instance)
            expected.add(tuple(reduced.reduce_assignment(encode_solution(model, sol))))
        assert expected <= feasible
        checked += 1


def test_dump_maxcut(bundle_swap):
    _, graph = pipeline(bundle_swap)
    text = dump_maxcut(graph)
    assert text.count(" root\n") == graph.n_root
    assert text.startswith(f"nodes {graph.n_nodes}\n")


def test_flipping_every_variable_side_mirrors_the_solution(rng):
    for _ in range(100):
        instance = random_instance(rng)
        reduced, graph = pipeline(instance, random_solution(rng, instance))
        sol = random_solution(rng, instance)
        y = solution_to_cut(reduced, graph, sol)
        # Same partition with the root moved across: root edges flip, pair edges stay.
        mirrored = y.copy()
        mirrored[: graph.n_root] = 1 - mirrored[: graph.n_root]
        assert cut_consistency(graph, mirrored)[0]
        back = cut_to_solution(reduced, graph, mirrored)
        assert back == sol.reversed()
        assert graph.objective(mirrored) == graph.objective(y)
        assert count_crossings(instance, back) == count_crossings(instance, sol)
