"""Command-line interface.

Subcommands: analyze, corpus, compare, dump-ast, lint. Data goes to
stdout (or --output); diagnostics and warnings go to stderr.

Exit codes: 0 success, 1 analysis or io failure, 2 usage or config
error, 3 manifest error. Configuration precedence, lowest to highest:
built-in defaults, config file (--config flag, else the ABCD_CONFIG
environment variable), individual flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Optional, Sequence

from abcd.corpus import AnalysisConfig, analyze_corpus, analyze_program, load_manifest
from abcd.dump import dump_tree
from abcd.errors import ConfigError, ManifestError, ParseError, ReportSchemaError
from abcd.lint import lint_api_usage
from abcd.parser import parse_program
from abcd.report import (
    CorpusReport,
    build_report,
    compare,
    deserialize_report,
    render_comparison,
    render_csv,
    render_table,
    serialize_report,
    _metrics_to_json,
)
from abcd.version import VERSION

CONFIG_ENV_VAR = "ABCD_CONFIG"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_MANIFEST = 3


def _fail(message: str) -> None:
    print(f"abcd: {message}", file=sys.stderr)


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    with open(output, "w", encoding="utf-8") as handle:
        handle.write(text)
        if not text.endswith("\n"):
            handle.write("\n")


def _add_config_flags(parser: argparse.ArgumentParser, *, sampling: bool) -> None:
    parser.add_argument(
        "--config",
        metavar="PATH",
        help=f"JSON config file (default: ${CONFIG_ENV_VAR} if set)",
    )
    parser.add_argument(
        "--registry",
        metavar="NAMES",
        help="comma-separated VLM callee names (overrides config)",
    )
    parser.add_argument(
        "--edge-mode",
        choices=("tree", "field"),
        help="edge counting mode (overrides config)",
    )
    parser.add_argument(
        "--aggregation",
        choices=("macro", "micro"),
        help="token aggregation for headline columns (overrides config)",
    )
    if sampling:
        parser.add_argument(
            "--sample", type=int, metavar="N", help="per-dataset sample size"
        )
        parser.add_argument("--seed", type=int, metavar="S", help="sampling seed")
        parser.add_argument(
            "--pooled",
            action="store_const",
            const=True,
            default=None,
            help="sample across all datasets pooled instead of per dataset",
        )
        parser.add_argument(
            "--warn-threshold",
            type=float,
            metavar="F",
            help="exclusion fraction above which a warning is emitted",
        )


def _load_config(args: argparse.Namespace) -> AnalysisConfig:
    """Merge config file and flag overrides into an AnalysisConfig."""
    fields: Dict[str, object] = {}
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if path:
        with open(path, "r", encoding="utf-8") as handle:
            try:
                loaded = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file {path}: invalid JSON: {exc.msg}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {path}: expected a JSON object")
        fields.update(loaded)
    if getattr(args, "registry", None) is not None:
        fields["registry"] = [n.strip() for n in args.registry.split(",") if n.strip()]
    if getattr(args, "edge_mode", None) is not None:
        fields["edge_mode"] = args.edge_mode
    if getattr(args, "aggregation", None) is not None:
        fields["token_aggregation"] = args.aggregation
    if getattr(args, "sample", None) is not None:
        fields["sample_size"] = args.sample
    if getattr(args, "seed", None) is not None:
        fields["seed"] = args.seed
    if getattr(args, "pooled", None) is not None:
        fields["pooled_sampling"] = args.pooled
    if getattr(args, "warn_threshold", None) is not None:
        fields["exclusion_warn_threshold"] = args.warn_threshold
    return AnalysisConfig.from_dict(fields)


def _read_file(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _cmd_analyze(args: argparse.Namespace) -> int:
    try:
        config = _load_config(args)
    except (ConfigError, OSError) as exc:
        _fail(str(exc))
        return EXIT_USAGE
    try:
        text = _read_file(args.file)
    except OSError as exc:
        _fail(str(exc))
        return EXIT_FAILURE
    try:
        metrics = analyze_program(text, config, args.file)
    except ParseError as exc:
        _fail(f"{args.file}: {exc}")
        return EXIT_FAILURE
    if args.format == "json":
        payload = {"path": args.file, **_metrics_to_json(metrics)}
        _emit(json.dumps(payload, ensure_ascii=False, indent=2), args.output)
    else:
        token_mean = metrics.vlm.token_mean
        lines = [
            f"path:            {args.file}",
            f"vlm calls:       {metrics.vlm.call_count}",
            f"vlm tokens:      {token_mean:.2f} mean over {len(metrics.vlm.token_counts)} resolved site(s)",
            f"unresolved:      {metrics.vlm.unresolved_sites}",
            f"ast nodes:       {metrics.nodes}",
            f"ast edges:       {metrics.edges_tree} (tree), {metrics.edges_field} (field)",
            f"max depth:       {metrics.profile.max_depth}",
            f"lint findings:   {metrics.lint_finding_count}",
        ]
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _cmd_corpus(args: argparse.Namespace) -> int:
    try:
        config = _load_config(args)
    except (ConfigError, OSError) as exc:
        _fail(str(exc))
        return EXIT_USAGE
    try:
        manifest = load_manifest(args.manifest)
    except ManifestError as exc:
        _fail(f"{args.manifest}: {exc}")
        return EXIT_MANIFEST
    except OSError as exc:
        _fail(str(exc))
        return EXIT_FAILURE
    try:
        result = analyze_corpus(manifest, config, jobs=args.jobs)
    except ConfigError as exc:
        _fail(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _fail(str(exc))
        return EXIT_FAILURE
    report = build_report(result)
    if args.format == "json":
        _emit(serialize_report(report), args.output)
    elif args.format == "csv":
        _emit(render_csv(report), args.output)
    else:
        _emit(render_table(report), args.output)
    return EXIT_OK


def _pick_dataset(report: CorpusReport, label: Optional[str], which: str, path: str):
    if label is None:
        if len(report.datasets) == 1:
            return report.datasets[0]
        raise ConfigError(
            f"{path} has {len(report.datasets)} datasets; pass --dataset-{which}"
        )
    for summary in report.datasets:
        if summary.dataset == label:
            return summary
    raise ConfigError(f"{path} has no dataset {label!r}")


def _cmd_compare(args: argparse.Namespace) -> int:
    reports = []
    for path in (args.report_a, args.report_b):
        try:
            reports.append(deserialize_report(_read_file(path)))
        except OSError as exc:
            _fail(str(exc))
            return EXIT_FAILURE
        except ReportSchemaError as exc:
            _fail(f"{path}: {exc}")
            return EXIT_FAILURE
    report_a, report_b = reports
    try:
        summary_a = _pick_dataset(report_a, args.dataset_a, "a", args.report_a)
        summary_b = _pick_dataset(report_b, args.dataset_b, "b", args.report_b)
        comparison = compare(
            summary_a,
            summary_b,
            config_hash_a=report_a.config_hash,
            config_hash_b=report_b.config_hash,
        )
    except ConfigError as exc:
        _fail(str(exc))
        return EXIT_USAGE
    _emit(render_comparison(comparison), args.output)
    return EXIT_OK


def _cmd_dump_ast(args: argparse.Namespace) -> int:
    try:
        text = _read_file(args.file)
    except OSError as exc:
        _fail(str(exc))
        return EXIT_FAILURE
    try:
        tree = parse_program(text, args.file)
    except ParseError as exc:
        _fail(f"{args.file}: {exc}")
        return EXIT_FAILURE
    _emit(dump_tree(tree, args.format), args.output)
    return EXIT_OK


def _cmd_lint(args: argparse.Namespace) -> int:
    try:
        config = _load_config(args)
    except (ConfigError, OSError) as exc:
        _fail(str(exc))
        return EXIT_USAGE
    try:
        text = _read_file(args.file)
    except OSError as exc:
        _fail(str(exc))
        return EXIT_FAILURE
    try:
        tree = parse_program(text, args.file)
    except ParseError as exc:
        _fail(f"{args.file}: {exc}")
        return EXIT_FAILURE
    findings = lint_api_usage(tree, config.api_spec)
    lines = [f"{args.file}: {finding}" for finding in findings]
    if lines:
        _emit("\n".join(lines) + "\n", args.output)
    if any(f.severity == "error" for f in findings):
        return EXIT_FAILURE
    return EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abcd",
        description="Static diagnosis metrics for generated visual programs.",
    )
    parser.add_argument("--version", action="version", version=f"abcd {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p_analyze = sub.add_parser("analyze", help="analyze a single program file")
    p_analyze.add_argument("file", help="program file to analyze")
    p_analyze.add_argument("--format", choices=("json", "table"), default="table")
    p_analyze.add_argument("--output", metavar="PATH", help="write output to a file")
    _add_config_flags(p_analyze, sampling=False)
    p_analyze.set_defaults(func=_cmd_analyze)

    p_corpus = sub.add_parser("corpus", help="analyze a manifest of programs")
    p_corpus.add_argument("manifest", help="JSON Lines manifest (id, path, dataset)")
    p_corpus.add_argument("--format", choices=("json", "table", "csv"), default="json")
    p_corpus.add_argument("--output", metavar="PATH", help="write output to a file")
    p_corpus.add_argument(
        "--jobs", type=int, default=1, metavar="N", help="parallel analysis processes"
    )
    _add_config_flags(p_corpus, sampling=True)
    p_corpus.set_defaults(func=_cmd_corpus)

    p_compare = sub.add_parser("compare", help="compare datasets from two reports")
    p_compare.add_argument("report_a", help="first report JSON file")
    p_compare.add_argument("report_b", help="second report JSON file")
    p_compare.add_argument(
        "--dataset-a", metavar="LABEL", help="dataset label from the first report"
    )
    p_compare.add_argument(
        "--dataset-b", metavar="LABEL", help="dataset label from the second report"
    )
    p_compare.add_argument("--output", metavar="PATH", help="write output to a file")
    p_compare.set_defaults(func=_cmd_compare)

    p_dump = sub.add_parser("dump-ast", help="print a program's syntax tree")
    p_dump.add_argument("file", help="program file to parse")
    p_dump.add_argument("--format", choices=("sexpr", "json"), default="sexpr")
    p_dump.add_argument("--output", metavar="PATH", help="write output to a file")
    p_dump.set_defaults(func=_cmd_dump_ast)

    p_lint = sub.add_parser("lint", help="check VP API usage")
    p_lint.add_argument("file", help="program file to lint")
    p_lint.add_argument("--output", metavar="PATH", help="write output to a file")
    _add_config_flags(p_lint, sampling=False)
    p_lint.set_defaults(func=_cmd_lint)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
