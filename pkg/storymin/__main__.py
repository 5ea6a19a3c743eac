import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from storymin import DEFAULT_TIME_LIMIT, ORACLE_BUDGET, __version__
from storymin.errors import (
    InstanceError,
    OracleBudgetError,
    StoryError,
    StoryValidationError,
    ValidationReport,
)

logger = logging.getLogger("storymin")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_TIMEOUT = 2
EXIT_INTERNAL = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(args, record: Any, text: str):
    if args.format == "json":
        print(json.dumps(record, indent=2, sort_keys=True))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _is_story(args) -> bool:
    return args.sgb or args.input.endswith(".json")


def load_story(args):
    from storymin.story import parse_sgb, parse_story

    text = _read(args.input)
    if args.sgb:
        return parse_sgb(text, args.parts)
    return parse_story(text, book_mode=args.book_mode)


def load_instance(args, merge: bool = False):
    """The instance named on the command line; stories are converted first."""
    from storymin.mlcm import build_instance, merge_layers, parse_instance

    if not _is_story(args):
        return parse_instance(_read(args.input))
    instance, _ = build_instance(load_story(args))
    if merge:
        instance, _ = merge_layers(instance)
    return instance


def _report_text(report: ValidationReport) -> str:
    if report.ok:
        return "ok"
    lines = [f"{len(report)} problem(s)"]
    for v in report:
        where = f" at {v.location}" if v.location else ""
        lines.append(f"  {v.code}{where}: {v.message}")
    return "\n".join(lines)


def _emit_report(args, report: ValidationReport) -> int:
    record = {"ok": report.ok, "violations": report.records()}
    _emit(args, record, _report_text(report))
    return EXIT_OK if report.ok else EXIT_INVALID


def _single(
    code: str, message: str, location: Optional[str] = None
) -> ValidationReport:
    report = ValidationReport()
    report.add(code, message, location)
    return report


def cmd_validate(args) -> int:
    from storymin.mlcm import parse_instance, validate_instance
    from storymin.story import validate_story

    if _is_story(args):
        return _emit_report(args, validate_story(load_story(args)))
    return _emit_report(args, validate_instance(parse_instance(_read(args.input))))


def cmd_convert(args) -> int:
    from storymin.mlcm import dump_instance

    instance = load_instance(args, merge=not args.no_merge)
    text = dump_instance(instance)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    record = {"p": instance.p, "V": instance.n_nodes, "E": instance.n_edges}
    if args.format == "json" or args.out:
        summary = f"p={instance.p} V={instance.n_nodes} E={instance.n_edges}"
        _emit(args, record, summary)
    else:
        print(text, end="")
    return EXIT_OK


def _solve_config(args):
    from storymin.solver import SolveConfig

    return SolveConfig(
        time_limit=args.time_limit,
        heuristic_only=getattr(args, "heuristic_only", False),
        merge_layers=not args.no_merge,
        identify_variables=not args.no_identify,
        symmetry_breaking=not args.no_symmetry,
        rounding=not args.no_rounding,
        branching=args.branching,
        threads=args.threads,
        backend=args.backend,
        seed=args.seed,
    )


def _result_text(instance, result) -> str:
    from storymin.mlcm import dump_solution

    lines = [f"status={result.status.value}", f"lower_bound={result.lower_bound}"]
    if result.report is not None:
        lines.append(_report_text(result.report))
    text = "\n".join(lines) + "\n"
    if result.solution is not None:
        text = dump_solution(instance, result.solution, result.crossings) + text
    return text


def _finish_result(args, instance, result) -> int:
    from storymin.mlcm import dump_solution
    from storymin.solver import SolveStatus

    if getattr(args, "stats_json", None):
        stats = json.dumps(result.stats.record(), indent=2, sort_keys=True)
        Path(args.stats_json).write_text(stats, encoding="utf-8")
    if getattr(args, "out", None) and result.solution is not None:
        Path(args.out).write_text(
            dump_solution(instance, result.solution, result.crossings), encoding="utf-8"
        )
    _emit(args, result.record(instance), _result_text(instance, result))
    if result.status is SolveStatus.INFEASIBLE_INPUT:
        return EXIT_INVALID
    if result.status is SolveStatus.TIMEOUT:
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_solve(args) -> int:
    from storymin.solver import branch_and_cut

    instance = load_instance(args)
    result = branch_and_cut(instance, _solve_config(args))
    return _finish_result(args, instance, result)


def cmd_heuristic(args) -> int:
    from storymin.solver import heuristic_result

    instance = load_instance(args)
    result = heuristic_result(instance, _solve_config(args))
    return _finish_result(args, instance, result)


def cmd_oracle(args) -> int:
    from storymin.mlcm import validate_instance
    from storymin.oracle import brute_force_optimum
    from storymin.solver import OptResult, SolveStats, SolveStatus

    instance = load_instance(args)
    report = validate_instance(instance)
    if not report.ok:
        return _emit_report(args, report)
    count, sol = brute_force_optimum(instance, args.budget)
    result = OptResult(SolveStatus.OPTIMAL, sol, count, count, SolveStats())
    return _finish_result(args, instance, result)


def cmd_render(args) -> int:
    from storymin.mlcm import parse_solution, validate_instance
    from storymin.render import RenderOptions, render_svg
    from storymin.solver import branch_and_cut

    instance = load_instance(args)
    report = validate_instance(instance)
    if not report.ok:
        return _emit_report(args, report)
    if args.solution:
        sol = parse_solution(_read(args.solution), instance)
    else:
        sol = branch_and_cut(instance, _solve_config(args)).solution
    options = RenderOptions(
        column_width=args.width, row_height=args.row_height, smooth=args.smooth
    )
    svg = render_svg(instance, sol, options)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
        _emit(args, {"out": args.out}, f"wrote {args.out}")
    else:
        print(svg)
    return EXIT_OK


def cmd_stats(args) -> int:
    from storymin.solver import instance_stats

    stats = instance_stats(load_instance(args))
    _emit(args, stats, " ".join(f"{k}={v}" for k, v in stats.items()))
    return EXIT_OK


def _input_options(parser: argparse.ArgumentParser):
    parser.add_argument(
        "input", help="story (.json), GraphBase book (--sgb) or instance"
    )
    parser.add_argument("--book-mode", action="store_true", help="one layer per scene")
    parser.add_argument("--sgb", action="store_true", help="read a GraphBase .dat book")
    parser.add_argument(
        "--parts", type=int, nargs="+", help="book parts to keep, e.g. --parts 3"
    )


def _solver_options(parser: argparse.ArgumentParser):
    from storymin.solver import BRANCHING_RULES
    from storymin.solver.backends import BACKENDS

    parser.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--backend", choices=sorted(BACKENDS))
    parser.add_argument(
        "--branching", choices=BRANCHING_RULES, default=BRANCHING_RULES[0]
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--no-merge", action="store_true")
    parser.add_argument("--no-identify", action="store_true")
    parser.add_argument("--no-symmetry", action="store_true")
    parser.add_argument("--no-rounding", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--quiet", action="store_true")

    parser = _Parser(prog="storymin", description="Storyline crossing minimization")
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", parents=[common])
    _input_options(validate)
    validate.set_defaults(func=cmd_validate)

    convert = commands.add_parser("convert", parents=[common])
    _input_options(convert)
    convert.add_argument("--no-merge", action="store_true")
    convert.add_argument("--out")
    convert.set_defaults(func=cmd_convert)

    solve = commands.add_parser("solve", parents=[common])
    _input_options(solve)
    _solver_options(solve)
    solve.add_argument("--heuristic-only", action="store_true")
    solve.add_argument("--stats-json")
    solve.add_argument("--out", help="write the solution file here")
    solve.set_defaults(func=cmd_solve)

    heuristic = commands.add_parser("heuristic", parents=[common])
    _input_options(heuristic)
    _solver_options(heuristic)
    heuristic.add_argument("--out", help="write the solution file here")
    heuristic.set_defaults(func=cmd_heuristic)

    oracle = commands.add_parser("oracle", parents=[common])
    _input_options(oracle)
    oracle.add_argument("--budget", type=int, default=ORACLE_BUDGET)
    oracle.add_argument("--out", help="write the solution file here")
    oracle.set_defaults(func=cmd_oracle)

    render = commands.add_parser("render", parents=[common])
    _input_options(render)
    _solver_options(render)
    render.add_argument("--solution", help="solution file; solved exactly when absent")
    render.add_argument("--width", type=float, default=60.0, help="column width")
    render.add_argument("--row-height", type=float, default=12.0)
    render.add_argument("--smooth", action="store_true")
    render.add_argument("--out", help="SVG file to write")
    render.set_defaults(func=cmd_render)

    stats = commands.add_parser("stats", parents=[common])
    _input_options(stats)
    stats.set_defaults(func=cmd_stats)

    return parser


def _configure_logging(args):
    level = logging.WARNING
    if args.quiet:
        level = logging.ERROR
    elif args.verbose == 1:
        level = logging.INFO
    elif args.verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.getLogger("storymin").setLevel(level)


def launcher(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    _configure_logging(args)

    try:
        return args.func(args)
    except StoryError as e:
        return _emit_report(args, _single(e.code, e.message, e.location))
    except StoryValidationError as e:
        return _emit_report(args, e.report)
    except InstanceError as e:
        return _emit_report(args, _single("syntax", str(e)))
    except OracleBudgetError as e:
        logger.error("%s", e)
        return EXIT_INTERNAL
    except OSError as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL


main = launcher


if __name__ == "__main__":
    sys.exit(launcher())
