"""Corpus ingestion, sampling, and per-file analysis.

A corpus is described by a JSON Lines manifest: one object per line with
``id``, ``path``, and ``dataset`` fields. Relative paths resolve against
the manifest's directory. Sampling is stratified per dataset label by
default (each label gets its own seeded stream) so adding a dataset never
perturbs another dataset's selection.

Analysis separates two failure classes. A file that cannot be read is an
environment problem and aborts the run; a file that reads but does not
parse is excluded and recorded, since unparsable generations are an
expected (and measured) fraction of any corpus.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from abcd.errors import ConfigError, ManifestError, ParseError, SampleSizeError
from abcd.lint import ApiSpec, LintFinding, lint_api_usage
from abcd.metrics import (
    DEFAULT_EDGE_MODE,
    EdgeMode,
    StructuralProfile,
    count_edges,
    structural_profile,
)
from abcd.parser import parse_program
from abcd.rng import sample_indices, stratum_seed
from abcd.vlm import CalleeRegistry, VlmMetrics, vlm_metrics

logger = logging.getLogger("abcd.corpus")

TOKEN_AGGREGATIONS = ("macro", "micro")

STATUS_ANALYZED = "analyzed"
STATUS_EXCLUDED = "excluded"


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    path: str
    dataset: str


@dataclass(frozen=True)
class CorpusManifest:
    entries: Tuple[ManifestEntry, ...]
    source: Optional[str] = None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ManifestEntry]:
        return iter(self.entries)

    def datasets(self) -> Tuple[str, ...]:
        """Dataset labels in first-appearance order."""
        seen: Dict[str, None] = {}
        for entry in self.entries:
            seen.setdefault(entry.dataset, None)
        return tuple(seen)


def load_manifest(path: str) -> CorpusManifest:
    """Read a JSON Lines manifest. Blank lines are skipped.

    Raises ManifestError for malformed lines (named by line number) and
    duplicate ids (naming both offending lines). IO errors propagate.
    """
    base = os.path.dirname(os.path.abspath(path))
    entries: List[ManifestEntry] = []
    seen_ids: Dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise ManifestError(f"line {lineno}: expected an object, got {type(obj).__name__}")
            for key in ("id", "path", "dataset"):
                if key not in obj:
                    raise ManifestError(f"line {lineno}: missing field {key!r}")
                if not isinstance(obj[key], str) or not obj[key]:
                    raise ManifestError(f"line {lineno}: field {key!r} must be a non-empty string")
            entry_id = obj["id"]
            if entry_id in seen_ids:
                raise ManifestError(
                    f"duplicate id {entry_id!r} on lines {seen_ids[entry_id]} and {lineno}"
                )
            seen_ids[entry_id] = lineno
            file_path = obj["path"]
            if not os.path.isabs(file_path):
                file_path = os.path.normpath(os.path.join(base, file_path))
            entries.append(ManifestEntry(id=entry_id, path=file_path, dataset=obj["dataset"]))
    return CorpusManifest(entries=tuple(entries), source=os.path.abspath(path))


def sample_corpus(
    manifest: CorpusManifest, n: int, seed: int, *, pooled: bool = False
) -> CorpusManifest:
    """Draw a deterministic without-replacement sample.

    Stratified by default: ``n`` entries from every dataset label, each
    label seeded independently. With ``pooled=True`` a single draw of
    ``n`` is taken across all entries. Output preserves manifest order.
    """
    if n <= 0:
        raise SampleSizeError("sample size must be positive")
    if pooled:
        if n > len(manifest.entries):
            raise SampleSizeError(
                f"sample size {n} exceeds corpus size {len(manifest.entries)}"
            )
        chosen = sample_indices(len(manifest.entries), n, seed)
        picked = [manifest.entries[i] for i in chosen]
        return CorpusManifest(entries=tuple(picked), source=manifest.source)

    groups: Dict[str, List[int]] = {}
    for index, entry in enumerate(manifest.entries):
        groups.setdefault(entry.dataset, []).append(index)
    selected: List[int] = []
    for label, indices in groups.items():
        if n > len(indices):
            raise SampleSizeError(
                f"sample size {n} exceeds dataset {label!r} size {len(indices)}"
            )
        for pos in sample_indices(len(indices), n, stratum_seed(seed, label)):
            selected.append(indices[pos])
    selected.sort()
    picked = [manifest.entries[i] for i in selected]
    return CorpusManifest(entries=tuple(picked), source=manifest.source)


@dataclass(frozen=True)
class AnalysisConfig:
    """Everything that affects analysis output, in one hashable bundle."""

    registry: CalleeRegistry = dataclasses.field(default_factory=CalleeRegistry)
    edge_mode: EdgeMode = DEFAULT_EDGE_MODE
    token_aggregation: str = "macro"
    sample_size: Optional[int] = None
    seed: int = 0
    exclusion_warn_threshold: float = 0.03
    pooled_sampling: bool = False
    api_spec: ApiSpec = dataclasses.field(default_factory=ApiSpec)

    def __post_init__(self) -> None:
        if not isinstance(self.registry, CalleeRegistry):
            raise ConfigError("registry must be a CalleeRegistry")
        if not isinstance(self.edge_mode, EdgeMode):
            raise ConfigError("edge_mode must be an EdgeMode")
        if self.token_aggregation not in TOKEN_AGGREGATIONS:
            raise ConfigError(
                f"token_aggregation must be one of {TOKEN_AGGREGATIONS}, "
                f"got {self.token_aggregation!r}"
            )
        if self.sample_size is not None:
            if not isinstance(self.sample_size, int) or self.sample_size <= 0:
                raise ConfigError("sample_size must be a positive integer when set")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 1 << 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not 0.0 < self.exclusion_warn_threshold <= 1.0:
            raise ConfigError("exclusion_warn_threshold must be in (0, 1]")
        if not isinstance(self.api_spec, ApiSpec):
            raise ConfigError("api_spec must be an ApiSpec")

    def canonical_dict(self) -> Dict[str, object]:
        """Stable plain-data form used for hashing and report embedding."""
        spec = self.api_spec
        return {
            "registry": list(self.registry.names),
            "edge_mode": self.edge_mode.value,
            "token_aggregation": self.token_aggregation,
            "sample_size": self.sample_size,
            "seed": self.seed,
            "exclusion_warn_threshold": self.exclusion_warn_threshold,
            "pooled_sampling": self.pooled_sampling,
            "api_spec": {
                "constructor": spec.constructor,
                "segment_methods": sorted(spec.segment_methods),
                "frame_methods": sorted(spec.frame_methods),
                "patch_methods": sorted(spec.patch_methods),
                "frame_source": spec.frame_source,
                "patch_source": spec.patch_source,
                "entry_name": spec.entry_name,
                "entry_arity": spec.entry_arity,
                "answer_method": spec.answer_method,
            },
        }

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(
            self.canonical_dict(), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    @classmethod
    def from_dict(cls, mapping: Mapping[str, object]) -> "AnalysisConfig":
        """Build a config from parsed JSON mirroring the field names."""
        kwargs: Dict[str, object] = {}
        valid = set(cls.__dataclass_fields__)
        for key, value in mapping.items():
            if key not in valid:
                raise ConfigError(f"unknown config field: {key!r}")
            if key == "registry":
                if not isinstance(value, (list, tuple)):
                    raise ConfigError("registry must be a list of callee names")
                value = CalleeRegistry(tuple(str(v) for v in value))
            elif key == "edge_mode":
                try:
                    value = EdgeMode(value)
                except ValueError:
                    raise ConfigError(
                        f"edge_mode must be 'tree' or 'field', got {value!r}"
                    ) from None
            elif key == "api_spec":
                if not isinstance(value, Mapping):
                    raise ConfigError("api_spec must be an object")
                try:
                    value = ApiSpec.from_mapping(value)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
            kwargs[key] = value
        return cls(**kwargs)  # type: ignore[arg-type]


@dataclass(frozen=True)
class ProgramMetrics:
    vlm: VlmMetrics
    nodes: int
    edges_tree: int
    edges_field: int
    profile: StructuralProfile
    lint_findings: Tuple[LintFinding, ...]

    @property
    def lint_finding_count(self) -> int:
        return len(self.lint_findings)


@dataclass(frozen=True)
class ProgramRecord:
    id: str
    dataset: str
    status: str
    metrics: Optional[ProgramMetrics] = None
    error: Optional[str] = None

    def __post_init__(self) -> None:
        if self.status == STATUS_ANALYZED:
            if self.metrics is None or self.error is not None:
                raise ValueError("analyzed record must carry metrics and no error")
        elif self.status == STATUS_EXCLUDED:
            if self.error is None or self.metrics is not None:
                raise ValueError("excluded record must carry an error and no metrics")
        else:
            raise ValueError(f"unknown record status: {self.status!r}")


@dataclass(frozen=True)
class ExclusionSummary:
    dataset: str
    total: int
    excluded: int
    warned: bool

    @property
    def fraction(self) -> float:
        return self.excluded / self.total if self.total else 0.0


@dataclass(frozen=True)
class CorpusResult:
    records: Tuple[ProgramRecord, ...]
    exclusions: Tuple[ExclusionSummary, ...]
    warned: bool
    config: AnalysisConfig


def analyze_program(
    text: str, config: Optional[AnalysisConfig] = None, path: str = "<string>"
) -> ProgramMetrics:
    """Parse one program and compute its full metric row.

    Raises ParseError when the text is not in the grammar.
    """
    cfg = config if config is not None else AnalysisConfig()
    tree = parse_program(text, path)
    profile = structural_profile(tree)
    return ProgramMetrics(
        vlm=vlm_metrics(tree, cfg.registry),
        nodes=profile.nodes_total,
        edges_tree=profile.edges_tree,
        edges_field=profile.edges_field,
        profile=profile,
        lint_findings=tuple(lint_api_usage(tree, cfg.api_spec)),
    )


def _analyze_one(job: Tuple[str, str, str, str, AnalysisConfig]) -> ProgramRecord:
    entry_id, dataset, path, text, config = job
    try:
        metrics = analyze_program(text, config, path)
    except ParseError as exc:
        return ProgramRecord(
            id=entry_id, dataset=dataset, status=STATUS_EXCLUDED, error=str(exc)
        )
    return ProgramRecord(
        id=entry_id, dataset=dataset, status=STATUS_ANALYZED, metrics=metrics
    )


def analyze_corpus(
    manifest: CorpusManifest,
    config: Optional[AnalysisConfig] = None,
    *,
    jobs: int = 1,
) -> CorpusResult:
    """Analyze every manifest entry (after optional sampling) into records.

    Records come back in manifest order regardless of ``jobs``. Unreadable
    files abort with the underlying OSError; unparsable files become
    excluded records. A dataset whose exclusion fraction exceeds the
    configured threshold is logged as a warning and flagged in the result.
    """
    cfg = config if config is not None else AnalysisConfig()
    if cfg.sample_size is not None:
        manifest = sample_corpus(
            manifest, cfg.sample_size, cfg.seed, pooled=cfg.pooled_sampling
        )

    jobs_list: List[Tuple[str, str, str, str, AnalysisConfig]] = []
    for entry in manifest.entries:
        with open(entry.path, "r", encoding="utf-8") as handle:
            text = handle.read()
        jobs_list.append((entry.id, entry.dataset, entry.path, text, cfg))

    if jobs > 1 and len(jobs_list) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            records = tuple(pool.map(_analyze_one, jobs_list, chunksize=16))
    else:
        records = tuple(_analyze_one(job) for job in jobs_list)

    totals: Dict[str, int] = {}
    excluded: Dict[str, int] = {}
    for record in records:
        totals[record.dataset] = totals.get(record.dataset, 0) + 1
        if record.status == STATUS_EXCLUDED:
            excluded[record.dataset] = excluded.get(record.dataset, 0) + 1

    summaries: List[ExclusionSummary] = []
    warned = False
    for label in manifest.datasets():
        total = totals.get(label, 0)
        bad = excluded.get(label, 0)
        fraction = bad / total if total else 0.0
        over = fraction > cfg.exclusion_warn_threshold
        if over:
            warned = True
            logger.warning(
                "dataset %r: excluded %d of %d programs (%.1f%%), above the %.1f%% threshold",
                label,
                bad,
                total,
                100.0 * fraction,
                100.0 * cfg.exclusion_warn_threshold,
            )
        summaries.append(
            ExclusionSummary(dataset=label, total=total, excluded=bad, warned=over)
        )
    return CorpusResult(
        records=records, exclusions=tuple(summaries), warned=warned, config=cfg
    )
