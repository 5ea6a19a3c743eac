import random
import time

import jsonschema
import pytest

from storymin.mlcm import (
    LayerTree,
    MlcmInstance,
    build_instance,
    count_crossings,
    is_tree_consistent,
)
from storymin.oracle import brute_force_optimum
from storymin.schemas import load_schema
from storymin.solver import (
    SolveConfig,
    SolveStatus,
    branch_and_cut,
    heuristic_result,
    instance_stats,
)
from storymin.solver.backends import DenseSimplexBackend

from conftest import random_instance, random_story


def check_optimal(instance, config=None):
    result = branch_and_cut(instance, config)
    expected, _ = brute_force_optimum(instance)
    assert result.status is SolveStatus.OPTIMAL
    assert result.crossings == expected
    assert result.lower_bound == expected
    assert count_crossings(instance, result.solution) == expected
    for tree, order in zip(instance.trees, result.solution.orders):
        assert is_tree_consistent(tree, order)
    return result


def test_bundle_swap(bundle_swap):
    result = check_optimal(bundle_swap)
    assert result.crossings == 1
    assert result.stats.n_var > 0


def test_bundle_swap_story(bundle_swap_story):
    instance, _ = build_instance(bundle_swap_story)
    assert check_optimal(instance).crossings == 1


@pytest.mark.parametrize("seed", range(30))
def test_matches_the_oracle(seed):
    rng = random.Random(seed)
    check_optimal(random_instance(rng))


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(30, 230))
def test_matches_the_oracle_at_scale(seed):
    rng = random.Random(seed)
    check_optimal(random_instance(rng))


@pytest.mark.parametrize("seed", range(10))
def test_story_instances(seed):
    rng = random.Random(1000 + seed)
    instance, _ = build_instance(random_story(rng, n_characters=6, n_slots=4))
    check_optimal(instance)


@pytest.mark.parametrize(
    "options",
    [
        {"merge_layers": False},
        {"identify_variables": False},
        {"symmetry_breaking": False},
        {"rounding": False},
        {"branching": "first-fractional"},
        {"backend": "highs"},
        {"threads": 2},
    ],
)
def test_switches_keep_the_optimum(options):
    rng = random.Random(7)
    config = SolveConfig(**options)
    for _ in range(5):
        check_optimal(random_instance(rng), config)


def test_explicit_backend(bundle_swap):
    lp = DenseSimplexBackend()
    result = branch_and_cut(bundle_swap, backend=lp)
    assert result.crossings == 1
    assert result.stats.n_LPs > 0


def test_zero_crossing_instance_skips_the_search():
    instance = MlcmInstance(
        ((0, 1), (2, 3)),
        (((0, 2), (1, 3)),),
        (LayerTree.star([0, 1]), LayerTree.star([2, 3])),
    )
    result = branch_and_cut(instance)
    assert result.status is SolveStatus.OPTIMAL
    assert result.crossings == 0
    assert result.stats.n_sub == 1
    assert result.stats.n_LPs == 0


def test_timeout_reports_incumbent_and_bound(bundle_swap):
    result = branch_and_cut(bundle_swap, SolveConfig(time_limit=1e-9))
    assert result.status is SolveStatus.TIMEOUT
    assert result.crossings == 1
    assert 0 <= result.lower_bound <= result.crossings


@pytest.mark.parametrize("backend", ["simplex", "highs"])
def test_time_limit_holds_on_a_large_instance(backend):
    story = random_story(random.Random(77), n_characters=12, n_slots=12)
    instance, _ = build_instance(story)
    config = SolveConfig(time_limit=2.0, backend=backend)
    start = time.perf_counter()
    result = branch_and_cut(instance, config)
    assert time.perf_counter() - start < config.time_limit + 5.0
    assert result.status in (SolveStatus.OPTIMAL, SolveStatus.TIMEOUT)
    assert 0 <= result.lower_bound <= result.crossings
    assert count_crossings(instance, result.solution) == result.crossings


def test_heuristic_only(bundle_swap):
    result = branch_and_cut(bundle_swap, SolveConfig(heuristic_only=True))
    assert result.status is SolveStatus.FEASIBLE
    assert result.crossings == 1
    assert heuristic_result(bundle_swap).crossings == 1


def test_invalid_instance():
    instance = MlcmInstance(((0, 1),), (), (LayerTree.star([0]),))
    result = branch_and_cut(instance)
    assert result.status is SolveStatus.INFEASIBLE_INPUT
    assert result.solution is None
    assert "tree_leaf_mismatch" in result.report.codes()


def test_result_record_matches_schema(bundle_swap):
    result = branch_and_cut(bundle_swap)
    record = result.record(bundle_swap)
    jsonschema.validate(record, load_schema("result"))
    jsonschema.validate(record["stats"], load_schema("stats"))
    assert sorted(record["layers"][0]) == ["a", "b", "c", "d"]


def test_instance_stats(bundle_swap_story):
    instance, _ = build_instance(bundle_swap_story)
    stats = instance_stats(instance)
    jsonschema.validate(stats, load_schema("instance-stats"))
    assert stats["p"] == 4
    assert stats["p_merged"] == 2
    assert stats["V"] == 16
    assert stats["E"] == 12
    assert stats["n_var_raw"] == 24


@pytest.mark.parametrize("bad", [{"time_limit": 0}, {"threads": 0}, {"branching": "x"}])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        SolveConfig(**bad)
