import json

import jsonschema
import pytest

from storymin.__main__ import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_TIMEOUT,
    EXIT_USAGE,
    launcher,
)
from storymin.mlcm import dump_instance, parse_instance
from storymin.schemas import load_schema

from conftest import write_json


def run(capsys, *argv):
    code = launcher([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_validate_ok(capsys, story_file):
    code, out = run(capsys, "validate", story_file)
    assert code == EXIT_OK
    assert out.strip() == "ok"


def test_validate_reports_overlaps(capsys, tmp_path):
    doc = {
        "characters": ["a", "b"],
        "scenes": [
            {"id": "s1", "members": ["a", "b"], "begin": 0, "end": 2},
            {"id": "s2", "members": ["a"], "begin": 2, "end": 4},
        ],
    }
    path = write_json(tmp_path / "s.json", doc)
    code, out = run(capsys, "validate", path, "--format", "json")
    assert code == EXIT_INVALID
    report = json.loads(out)
    jsonschema.validate(report, load_schema("report"))
    assert [v["code"] for v in report["violations"]] == ["overlapping_scenes"]


def test_malformed_story(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{")
    code, out = run(capsys, "validate", path, "--format", "json")
    assert code == EXIT_INVALID
    assert json.loads(out)["violations"][0]["code"] == "syntax"


def test_convert_merges_layers(capsys, story_file):
    code, out = run(capsys, "convert", story_file)
    assert code == EXIT_OK
    assert parse_instance(out).p == 2
    code, out = run(capsys, "convert", story_file, "--no-merge", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out) == {"p": 4, "V": 16, "E": 12}


def test_convert_text_and_out_file(capsys, story_file, tmp_path):
    code, out = run(capsys, "convert", story_file, "--no-merge")
    assert code == EXIT_OK
    assert out.startswith("p=4\n")
    assert "tree 1:" in out
    target = tmp_path / "story.mlcm"
    code, out = run(capsys, "convert", story_file, "--out", target)
    assert code == EXIT_OK
    assert out.strip() == "p=2 V=8 E=4"
    assert parse_instance(target.read_text()).n_nodes == 8


def test_module_entry_point():
    import storymin.__main__ as entry

    assert entry.main is entry.launcher


def test_solve(capsys, story_file, tmp_path):
    stats = tmp_path / "stats.json"
    solution = tmp_path / "story.sol"
    argv = ["solve", story_file, "--format", "json", "--stats-json", stats]
    code, out = run(capsys, *argv, "--out", solution)
    assert code == EXIT_OK
    result = json.loads(out)
    jsonschema.validate(result, load_schema("result"))
    assert result["status"] == "optimal"
    assert result["crossings"] == result["lower_bound"] == 1
    assert len(result["layers"]) == 4
    jsonschema.validate(json.loads(stats.read_text()), load_schema("stats"))
    assert solution.read_text().endswith("crossings=1\n")


def test_solve_reports_timeout(capsys, story_file):
    argv = ["solve", story_file, "--time-limit", "1e-9", "--format", "json"]
    code, out = run(capsys, *argv)
    assert code == EXIT_TIMEOUT
    assert json.loads(out)["status"] == "timeout"


def test_solve_instance_text(capsys, bundle_swap, tmp_path):
    path = tmp_path / "swap.mlcm"
    path.write_text(dump_instance(bundle_swap))
    code, out = run(capsys, "solve", path)
    assert code == EXIT_OK
    assert "crossings=1" in out
    assert "status=optimal" in out


def test_heuristic_and_oracle(capsys, story_file):
    code, out = run(capsys, "heuristic", story_file, "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["crossings"] >= 1
    code, out = run(capsys, "oracle", story_file, "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["crossings"] == 1


def test_oracle_budget(capsys, story_file):
    code, _ = run(capsys, "oracle", story_file, "--budget", "1")
    assert code == 3


def test_render(capsys, story_file, tmp_path):
    svg = tmp_path / "story.svg"
    code, out = run(capsys, "render", story_file, "--out", svg, "--smooth")
    assert code == EXIT_OK
    assert svg.read_text().startswith("<svg")
    assert "crossings=1" in svg.read_text()


def test_render_given_solution(capsys, story_file, tmp_path):
    solution = tmp_path / "story.sol"
    run(capsys, "solve", story_file, "--out", solution)
    code, out = run(capsys, "render", story_file, "--solution", solution)
    assert code == EXIT_OK
    assert "crossings=1" in out


def test_stats(capsys, story_file):
    code, out = run(capsys, "stats", story_file, "--format", "json")
    assert code == EXIT_OK
    stats = json.loads(out)
    jsonschema.validate(stats, load_schema("instance-stats"))
    assert stats["p_merged"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["solve"],
        ["solve", "x.json", "--branching", "random"],
    ],
)
def test_usage_errors(capsys, argv):
    assert launcher(argv) == EXIT_USAGE


def test_missing_file(capsys, tmp_path):
    assert launcher(["solve", str(tmp_path / "missing.json")]) == EXIT_USAGE
