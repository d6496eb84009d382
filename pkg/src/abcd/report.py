"""Aggregation, comparison, and (de)serialization of corpus reports.

A report is the durable artifact of a corpus run: per-dataset summary
rows shaped like the ABCD table plus the full per-program record list,
stamped with the tool version and a hash of the configuration that
produced it. Serialization is canonical (two runs with identical inputs
produce byte-identical JSON), so reports can be diffed and compared
safely.

Token means come in two flavors. The macro mean averages per-program
token means (every program weighs the same); the micro mean pools every
resolved call site across the dataset (every call weighs the same). Both
are always computed; rendering picks the one named by the config.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from abcd.corpus import (
    STATUS_ANALYZED,
    STATUS_EXCLUDED,
    AnalysisConfig,
    CorpusResult,
    ProgramMetrics,
    ProgramRecord,
)
from abcd.errors import ConfigError, ReportSchemaError
from abcd.lint import LintFinding
from abcd.metrics import StructuralProfile
from abcd.tree import KIND_ENUM_VERSION, NODE_KINDS, AstNode, Span
from abcd.version import VERSION
from abcd.vlm import VlmMetrics

REPORT_SCHEMA = "abcd-report/1"

METRIC_KEYS = (
    "vlm_calls",
    "vlm_tokens_macro",
    "vlm_tokens_micro",
    "ast_nodes",
    "ast_edges_tree",
    "ast_edges_field",
)

FLAG_NO_ANALYZED = "no_analyzed_records"
FLAG_TOKENS_MACRO_UNDEFINED = "vlm_tokens_macro_undefined"
FLAG_TOKENS_MICRO_UNDEFINED = "vlm_tokens_micro_undefined"


@dataclass(frozen=True)
class DatasetSummary:
    dataset: str
    n_analyzed: int
    n_excluded: int
    exclusion_warned: bool
    mean_vlm_calls: Optional[float]
    std_vlm_calls: Optional[float]
    mean_vlm_tokens_macro: Optional[float]
    std_vlm_tokens_macro: Optional[float]
    mean_vlm_tokens_micro: Optional[float]
    std_vlm_tokens_micro: Optional[float]
    mean_ast_nodes: Optional[float]
    std_ast_nodes: Optional[float]
    mean_ast_edges_tree: Optional[float]
    std_ast_edges_tree: Optional[float]
    mean_ast_edges_field: Optional[float]
    std_ast_edges_field: Optional[float]
    flags: Tuple[str, ...]

    def mean(self, key: str) -> Optional[float]:
        return getattr(self, f"mean_{key}")

    def std(self, key: str) -> Optional[float]:
        return getattr(self, f"std_{key}")


def _moments(values: Sequence[float]) -> Tuple[Optional[float], Optional[float]]:
    if not values:
        return None, None
    return statistics.fmean(values), statistics.pstdev(values)


def _summarize(
    label: str,
    group: Sequence[ProgramRecord],
    exclusion_warn_threshold: Optional[float],
) -> DatasetSummary:
    analyzed = [r.metrics for r in group if r.status == STATUS_ANALYZED]
    n_excluded = sum(1 for r in group if r.status == STATUS_EXCLUDED)
    flags: List[str] = []

    calls = [float(m.vlm.call_count) for m in analyzed]
    nodes = [float(m.nodes) for m in analyzed]
    edges_tree = [float(m.edges_tree) for m in analyzed]
    edges_field = [float(m.edges_field) for m in analyzed]
    # macro: one value per program that resolved at least one query
    macro = [m.vlm.token_mean for m in analyzed if m.vlm.token_counts]
    micro = [float(c) for m in analyzed for c in m.vlm.token_counts]

    if not analyzed:
        flags.append(FLAG_NO_ANALYZED)
    else:
        if not macro:
            flags.append(FLAG_TOKENS_MACRO_UNDEFINED)
        if not micro:
            flags.append(FLAG_TOKENS_MICRO_UNDEFINED)

    warned = False
    if exclusion_warn_threshold is not None and group:
        warned = n_excluded / len(group) > exclusion_warn_threshold

    mean_calls, std_calls = _moments(calls)
    mean_macro, std_macro = _moments(macro)
    mean_micro, std_micro = _moments(micro)
    mean_nodes, std_nodes = _moments(nodes)
    mean_et, std_et = _moments(edges_tree)
    mean_ef, std_ef = _moments(edges_field)
    return DatasetSummary(
        dataset=label,
        n_analyzed=len(analyzed),
        n_excluded=n_excluded,
        exclusion_warned=warned,
        mean_vlm_calls=mean_calls,
        std_vlm_calls=std_calls,
        mean_vlm_tokens_macro=mean_macro,
        std_vlm_tokens_macro=std_macro,
        mean_vlm_tokens_micro=mean_micro,
        std_vlm_tokens_micro=std_micro,
        mean_ast_nodes=mean_nodes,
        std_ast_nodes=std_nodes,
        mean_ast_edges_tree=mean_et,
        std_ast_edges_tree=std_et,
        mean_ast_edges_field=mean_ef,
        std_ast_edges_field=std_ef,
        flags=tuple(flags),
    )


def aggregate(
    records: Sequence[ProgramRecord],
    *,
    exclusion_warn_threshold: Optional[float] = None,
) -> List[DatasetSummary]:
    """One summary per dataset label, in first-appearance order."""
    order: List[str] = []
    groups: Dict[str, List[ProgramRecord]] = {}
    for record in records:
        if record.dataset not in groups:
            order.append(record.dataset)
            groups[record.dataset] = []
        groups[record.dataset].append(record)
    return [_summarize(label, groups[label], exclusion_warn_threshold) for label in order]


@dataclass(frozen=True)
class ComparisonReport:
    a: DatasetSummary
    b: DatasetSummary
    deltas: Tuple[Tuple[str, Optional[float]], ...]
    verdicts: Tuple[Tuple[str, str], ...]

    def delta(self, key: str) -> Optional[float]:
        return dict(self.deltas)[key]

    def verdict(self, key: str) -> str:
        return dict(self.verdicts)[key]


def compare(
    a: DatasetSummary,
    b: DatasetSummary,
    *,
    config_hash_a: Optional[str] = None,
    config_hash_b: Optional[str] = None,
) -> ComparisonReport:
    """Per-metric deltas (B minus A) with verdicts at printed precision.

    Verdicts say how B relates to A after both means are rounded to the
    two decimals the table prints, so a comparison never contradicts the
    rendered report. Raises ConfigError when both config hashes are given
    and differ.
    """
    if config_hash_a is not None and config_hash_b is not None:
        if config_hash_a != config_hash_b:
            raise ConfigError(
                f"config hashes differ: {config_hash_a} vs {config_hash_b};"
                " reports are not comparable"
            )
    deltas: List[Tuple[str, Optional[float]]] = []
    verdicts: List[Tuple[str, str]] = []
    for key in METRIC_KEYS:
        ma, mb = a.mean(key), b.mean(key)
        if ma is None or mb is None:
            deltas.append((key, None))
            verdicts.append((key, "undefined"))
            continue
        deltas.append((key, mb - ma))
        ra, rb = round(ma, 2), round(mb, 2)
        if rb > ra:
            verdicts.append((key, "greater"))
        elif rb < ra:
            verdicts.append((key, "less"))
        else:
            verdicts.append((key, "equal"))
    return ComparisonReport(a=a, b=b, deltas=tuple(deltas), verdicts=tuple(verdicts))


@dataclass(frozen=True)
class CorpusReport:
    schema: str
    tool_version: str
    config: Mapping[str, object]
    config_hash: str
    seed: int
    kind_enum_version: int
    warned: bool
    datasets: Tuple[DatasetSummary, ...]
    records: Tuple[ProgramRecord, ...]


def build_report(result: CorpusResult) -> CorpusReport:
    config = result.config
    summaries = aggregate(
        result.records, exclusion_warn_threshold=config.exclusion_warn_threshold
    )
    return CorpusReport(
        schema=REPORT_SCHEMA,
        tool_version=VERSION,
        config=config.canonical_dict(),
        config_hash=config.config_hash,
        seed=config.seed,
        kind_enum_version=KIND_ENUM_VERSION,
        warned=result.warned,
        datasets=tuple(summaries),
        records=result.records,
    )


# -- serialization ------------------------------------------------------


def _span_to_json(span: Optional[Span]) -> Optional[List[int]]:
    return None if span is None else [span.line, span.col, span.offset, span.length]


def _finding_to_json(finding: LintFinding) -> Dict[str, object]:
    return {
        "rule": finding.rule,
        "severity": finding.severity,
        "message": finding.message,
        "span": _span_to_json(finding.span),
    }


def _metrics_to_json(metrics: ProgramMetrics) -> Dict[str, object]:
    profile = metrics.profile
    return {
        "vlm": {
            "call_count": metrics.vlm.call_count,
            "token_counts": list(metrics.vlm.token_counts),
            "token_mean": metrics.vlm.token_mean,
            "unresolved_sites": metrics.vlm.unresolved_sites,
            "flagged": metrics.vlm.flagged,
        },
        "nodes": metrics.nodes,
        "edges_tree": metrics.edges_tree,
        "edges_field": metrics.edges_field,
        "profile": {
            "nodes_total": profile.nodes_total,
            "edges_tree": profile.edges_tree,
            "edges_field": profile.edges_field,
            "max_depth": profile.max_depth,
            "per_kind": {k: profile.per_kind[k] for k in sorted(profile.per_kind)},
        },
        "lint_findings": [_finding_to_json(f) for f in metrics.lint_findings],
    }


def _record_to_json(record: ProgramRecord) -> Dict[str, object]:
    obj: Dict[str, object] = {
        "id": record.id,
        "dataset": record.dataset,
        "status": record.status,
    }
    if record.metrics is not None:
        obj["metrics"] = _metrics_to_json(record.metrics)
    if record.error is not None:
        obj["error"] = record.error
    return obj


def _summary_to_json(summary: DatasetSummary) -> Dict[str, object]:
    obj: Dict[str, object] = {
        "dataset": summary.dataset,
        "n_analyzed": summary.n_analyzed,
        "n_excluded": summary.n_excluded,
        "exclusion_warned": summary.exclusion_warned,
    }
    for key in METRIC_KEYS:
        obj[f"mean_{key}"] = summary.mean(key)
        obj[f"std_{key}"] = summary.std(key)
    obj["flags"] = list(summary.flags)
    return obj


def serialize_report(report: CorpusReport) -> str:
    """Canonical JSON: fixed key order, full float precision, 2-space indent."""
    payload = {
        "schema": report.schema,
        "tool_version": report.tool_version,
        "config": report.config,
        "config_hash": report.config_hash,
        "seed": report.seed,
        "kind_enum_version": report.kind_enum_version,
        "warned": report.warned,
        "datasets": [_summary_to_json(s) for s in report.datasets],
        "records": [_record_to_json(r) for r in report.records],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


# -- deserialization ----------------------------------------------------


def _want(obj: Mapping, key: str, kinds, path: str, allow_none: bool = False):
    if not isinstance(obj, Mapping):
        raise ReportSchemaError("expected an object", path or "/")
    if key not in obj:
        raise ReportSchemaError(f"missing field {key!r}", path or "/")
    value = obj[key]
    if value is None and allow_none:
        return None
    ok = isinstance(value, kinds)
    if ok and isinstance(value, bool) and bool not in _as_tuple(kinds):
        # bool is an int subclass; only accept it where bool was asked for
        ok = False
    if not ok:
        raise ReportSchemaError(
            f"field {key!r} has wrong type {type(value).__name__}", f"{path}/{key}"
        )
    return value


def _as_tuple(kinds) -> tuple:
    return kinds if isinstance(kinds, tuple) else (kinds,)


def _number(obj: Mapping, key: str, path: str, allow_none: bool = False) -> Optional[float]:
    value = _want(obj, key, (int, float), path, allow_none=allow_none)
    return None if value is None else float(value)


def _integer(obj: Mapping, key: str, path: str) -> int:
    return _want(obj, key, int, path)


def _span_from_json(value: object, path: str) -> Optional[Span]:
    if value is None:
        return None
    if (
        not isinstance(value, list)
        or len(value) != 4
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        raise ReportSchemaError("span must be null or four integers", path)
    return Span(*value)


def _finding_from_json(obj: object, path: str) -> LintFinding:
    rule = _want(obj, "rule", str, path)
    severity = _want(obj, "severity", str, path)
    if severity not in ("warn", "error"):
        raise ReportSchemaError(f"unknown severity {severity!r}", f"{path}/severity")
    message = _want(obj, "message", str, path)
    if "span" not in obj:
        raise ReportSchemaError("missing field 'span'", path)
    span = _span_from_json(obj["span"], f"{path}/span")
    return LintFinding(rule=rule, severity=severity, message=message, span=span)


def _metrics_from_json(obj: object, path: str) -> ProgramMetrics:
    vlm_obj = _want(obj, "vlm", Mapping, path)
    vlm_path = f"{path}/vlm"
    counts_raw = _want(vlm_obj, "token_counts", list, vlm_path)
    for i, c in enumerate(counts_raw):
        if not isinstance(c, int) or isinstance(c, bool):
            raise ReportSchemaError("token count must be an integer", f"{vlm_path}/token_counts/{i}")
    vlm = VlmMetrics(
        call_count=_integer(vlm_obj, "call_count", vlm_path),
        token_counts=tuple(counts_raw),
        token_mean=_number(vlm_obj, "token_mean", vlm_path),
        unresolved_sites=_integer(vlm_obj, "unresolved_sites", vlm_path),
        flagged=_want(vlm_obj, "flagged", bool, vlm_path),
    )
    profile_obj = _want(obj, "profile", Mapping, path)
    profile_path = f"{path}/profile"
    per_kind_obj = _want(profile_obj, "per_kind", Mapping, profile_path)
    per_kind: Dict[str, int] = {}
    for kind, count in per_kind_obj.items():
        if not isinstance(count, int) or isinstance(count, bool):
            raise ReportSchemaError("kind count must be an integer", f"{profile_path}/per_kind/{kind}")
        per_kind[str(kind)] = count
    profile = StructuralProfile(
        nodes_total=_integer(profile_obj, "nodes_total", profile_path),
        edges_tree=_integer(profile_obj, "edges_tree", profile_path),
        edges_field=_integer(profile_obj, "edges_field", profile_path),
        per_kind=per_kind,
        max_depth=_integer(profile_obj, "max_depth", profile_path),
    )
    findings_raw = _want(obj, "lint_findings", list, path)
    findings = tuple(
        _finding_from_json(f, f"{path}/lint_findings/{i}") for i, f in enumerate(findings_raw)
    )
    return ProgramMetrics(
        vlm=vlm,
        nodes=_integer(obj, "nodes", path),
        edges_tree=_integer(obj, "edges_tree", path),
        edges_field=_integer(obj, "edges_field", path),
        profile=profile,
        lint_findings=findings,
    )


def _record_from_json(obj: object, path: str) -> ProgramRecord:
    rid = _want(obj, "id", str, path)
    dataset = _want(obj, "dataset", str, path)
    status = _want(obj, "status", str, path)
    if status == STATUS_ANALYZED:
        metrics = _metrics_from_json(_want(obj, "metrics", Mapping, path), f"{path}/metrics")
        return ProgramRecord(id=rid, dataset=dataset, status=status, metrics=metrics)
    if status == STATUS_EXCLUDED:
        error = _want(obj, "error", str, path)
        return ProgramRecord(id=rid, dataset=dataset, status=status, error=error)
    raise ReportSchemaError(f"unknown status {status!r}", f"{path}/status")


def _summary_from_json(obj: object, path: str) -> DatasetSummary:
    kwargs: Dict[str, object] = {
        "dataset": _want(obj, "dataset", str, path),
        "n_analyzed": _integer(obj, "n_analyzed", path),
        "n_excluded": _integer(obj, "n_excluded", path),
        "exclusion_warned": _want(obj, "exclusion_warned", bool, path),
    }
    for key in METRIC_KEYS:
        kwargs[f"mean_{key}"] = _number(obj, f"mean_{key}", path, allow_none=True)
        kwargs[f"std_{key}"] = _number(obj, f"std_{key}", path, allow_none=True)
    flags_raw = _want(obj, "flags", list, path)
    for i, flag in enumerate(flags_raw):
        if not isinstance(flag, str):
            raise ReportSchemaError("flag must be a string", f"{path}/flags/{i}")
    kwargs["flags"] = tuple(flags_raw)
    return DatasetSummary(**kwargs)  # type: ignore[arg-type]


def deserialize_report(text: str) -> CorpusReport:
    """Parse report JSON back into a CorpusReport, validating the schema.

    Violations raise ReportSchemaError carrying a JSON-pointer path.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportSchemaError(f"not valid JSON: {exc.msg}", "/") from exc
    if not isinstance(payload, dict):
        raise ReportSchemaError("report must be a JSON object", "/")
    schema = _want(payload, "schema", str, "")
    if schema != REPORT_SCHEMA:
        raise ReportSchemaError(
            f"unsupported schema {schema!r}, expected {REPORT_SCHEMA!r}", "/schema"
        )
    config = _want(payload, "config", Mapping, "")
    datasets_raw = _want(payload, "datasets", list, "")
    records_raw = _want(payload, "records", list, "")
    datasets = tuple(
        _summary_from_json(s, f"/datasets/{i}") for i, s in enumerate(datasets_raw)
    )
    records = tuple(
        _record_from_json(r, f"/records/{i}") for i, r in enumerate(records_raw)
    )
    return CorpusReport(
        schema=schema,
        tool_version=_want(payload, "tool_version", str, ""),
        config=dict(config),
        config_hash=_want(payload, "config_hash", str, ""),
        seed=_integer(payload, "seed", ""),
        kind_enum_version=_integer(payload, "kind_enum_version", ""),
        warned=_want(payload, "warned", bool, ""),
        datasets=datasets,
        records=records,
    )


# -- tree deserialization (inverse of dump_tree's json format) ----------


def _node_from_json(obj: object, path: str) -> AstNode:
    kind = _want(obj, "kind", str, path)
    if kind not in NODE_KINDS:
        raise ReportSchemaError(f"unknown node kind {kind!r}", f"{path}/kind")
    if "span" not in obj:
        raise ReportSchemaError("missing field 'span'", path)
    span = _span_from_json(obj["span"], f"{path}/span")
    attrs_raw = _want(obj, "attrs", list, path)
    attrs: List[Tuple[str, object]] = []
    for i, pair in enumerate(attrs_raw):
        if not isinstance(pair, list) or len(pair) != 2 or not isinstance(pair[0], str):
            raise ReportSchemaError("attr must be a [name, value] pair", f"{path}/attrs/{i}")
        value = pair[1]
        if value is not None and not isinstance(value, (str, int, float, bool)):
            raise ReportSchemaError("attr value must be scalar", f"{path}/attrs/{i}")
        attrs.append((pair[0], value))
    children_raw = _want(obj, "children", list, path)
    children: List[Tuple[str, AstNode]] = []
    for i, pair in enumerate(children_raw):
        if not isinstance(pair, list) or len(pair) != 2 or not isinstance(pair[0], str):
            raise ReportSchemaError(
                "child must be a [field, node] pair", f"{path}/children/{i}"
            )
        children.append((pair[0], _node_from_json(pair[1], f"{path}/children/{i}")))
    return AstNode(kind, attrs=tuple(attrs), children=tuple(children), span=span)


def tree_from_json(text: str) -> AstNode:
    """Rebuild a tree from dump_tree's json format."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportSchemaError(f"not valid JSON: {exc.msg}", "/") from exc
    schema = _want(payload, "schema", str, "")
    if schema != "abcd-tree/1":
        raise ReportSchemaError(f"unsupported schema {schema!r}", "/schema")
    root = _want(payload, "root", Mapping, "")
    return _node_from_json(root, "/root")


# -- rendering ----------------------------------------------------------


def _fmt2(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.2f}"


def _headline_keys(config: Mapping[str, object]) -> Tuple[str, str]:
    token_key = (
        "vlm_tokens_micro"
        if config.get("token_aggregation") == "micro"
        else "vlm_tokens_macro"
    )
    edge_key = (
        "ast_edges_tree" if config.get("edge_mode") == "tree" else "ast_edges_field"
    )
    return token_key, edge_key


def render_table(report: CorpusReport) -> str:
    """Aligned plain-text table, one dataset per row, 2-decimal means.

    Headline token and edge columns follow the report's config; the
    excluded column shows count over group total.
    """
    token_key, edge_key = _headline_keys(report.config)
    header = ["Dataset", "Programs", "Excluded", "VLM Calls", "VLM Tokens", "AST Nodes", "AST Edges"]
    rows = [header]
    for s in report.datasets:
        total = s.n_analyzed + s.n_excluded
        excluded = f"{s.n_excluded}/{total}"
        if s.exclusion_warned:
            excluded += " !"
        rows.append(
            [
                s.dataset,
                str(s.n_analyzed),
                excluded,
                _fmt2(s.mean_vlm_calls),
                _fmt2(s.mean(token_key)),
                _fmt2(s.mean_ast_nodes),
                _fmt2(s.mean(edge_key)),
            ]
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for index, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])]
        cells.extend(cell.rjust(widths[i]) for i, cell in enumerate(row) if i > 0)
        lines.append("  ".join(cells).rstrip())
        if index == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_csv(report: CorpusReport) -> str:
    """CSV export: one header line, one line per dataset, full precision."""
    columns = ["dataset", "n_analyzed", "n_excluded", "exclusion_warned"]
    for key in METRIC_KEYS:
        columns.append(f"mean_{key}")
        columns.append(f"std_{key}")
    lines = [",".join(columns)]
    for s in report.datasets:
        cells = [s.dataset, str(s.n_analyzed), str(s.n_excluded), str(s.exclusion_warned).lower()]
        for key in METRIC_KEYS:
            mean, std = s.mean(key), s.std(key)
            cells.append("" if mean is None else repr(mean))
            cells.append("" if std is None else repr(std))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_comparison(comparison: ComparisonReport) -> str:
    """Plain-text delta table for a pair of dataset summaries."""
    rows = [["Metric", f"A: {comparison.a.dataset}", f"B: {comparison.b.dataset}", "Delta (B-A)", "Verdict"]]
    deltas = dict(comparison.deltas)
    verdicts = dict(comparison.verdicts)
    for key in METRIC_KEYS:
        delta = deltas[key]
        rows.append(
            [
                key,
                _fmt2(comparison.a.mean(key)),
                _fmt2(comparison.b.mean(key)),
                "-" if delta is None else f"{delta:+.2f}",
                verdicts[key],
            ]
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for index, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])]
        cells.extend(cell.rjust(widths[i]) for i, cell in enumerate(row) if i > 0)
        lines.append("  ".join(cells).rstrip())
        if index == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
