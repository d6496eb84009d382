"""AST-based code diagnosis (ABCD) for visual-programming code.

Parses VPLang (the indentation-based scripting subset that LLM-generated
visual programs are written in) into syntax trees and computes four
diagnosis metrics per program: VLM call count, VLM query token length,
AST node count and AST edge count. Corpus tooling aggregates the metrics
per dataset label into comparable reports.
"""

from abcd.corpus import (
    AnalysisConfig,
    CorpusManifest,
    CorpusResult,
    ExclusionSummary,
    ManifestEntry,
    ProgramMetrics,
    ProgramRecord,
    analyze_corpus,
    analyze_program,
    load_manifest,
    sample_corpus,
)
from abcd.dump import dump_tree
from abcd.errors import (
    ConfigError,
    ManifestError,
    ParseError,
    ReportSchemaError,
    SampleSizeError,
)
from abcd.lexer import Token, tokenize_source
from abcd.lint import ApiSpec, LintFinding, lint_api_usage
from abcd.metrics import EdgeMode, StructuralProfile, count_edges, count_nodes, structural_profile
from abcd.parser import parse_program
from abcd.report import (
    ComparisonReport,
    CorpusReport,
    DatasetSummary,
    aggregate,
    build_report,
    compare,
    deserialize_report,
    render_comparison,
    render_csv,
    render_table,
    serialize_report,
    tree_from_json,
)
from abcd.rng import SplitMix64, fnv1a64, sample_indices, stratum_seed
from abcd.synth import generate_program
from abcd.tree import AstNode, SourceProgram, Span, SyntaxTree
from abcd.version import VERSION as __version__
from abcd.vlm import (
    CalleeRegistry,
    QueryText,
    VlmCallSite,
    VlmMetrics,
    extract_call_sites,
    resolve_query_text,
    tokenize_query,
    vlm_metrics,
)

__all__ = [
    "AnalysisConfig",
    "ApiSpec",
    "AstNode",
    "CalleeRegistry",
    "ComparisonReport",
    "ConfigError",
    "CorpusManifest",
    "CorpusReport",
    "CorpusResult",
    "DatasetSummary",
    "EdgeMode",
    "ExclusionSummary",
    "LintFinding",
    "ManifestEntry",
    "ManifestError",
    "ParseError",
    "ProgramMetrics",
    "ProgramRecord",
    "QueryText",
    "ReportSchemaError",
    "SampleSizeError",
    "SourceProgram",
    "Span",
    "SplitMix64",
    "StructuralProfile",
    "SyntaxTree",
    "Token",
    "VlmCallSite",
    "VlmMetrics",
    "aggregate",
    "analyze_corpus",
    "analyze_program",
    "build_report",
    "compare",
    "count_edges",
    "count_nodes",
    "deserialize_report",
    "dump_tree",
    "extract_call_sites",
    "fnv1a64",
    "generate_program",
    "lint_api_usage",
    "load_manifest",
    "parse_program",
    "render_comparison",
    "render_csv",
    "render_table",
    "resolve_query_text",
    "sample_corpus",
    "sample_indices",
    "serialize_report",
    "stratum_seed",
    "structural_profile",
    "tokenize_query",
    "tokenize_source",
    "tree_from_json",
    "vlm_metrics",
]
