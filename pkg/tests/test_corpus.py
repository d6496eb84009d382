"""Manifest handling, sampling, configuration, and corpus analysis."""

import json
import logging
import os

import pytest

from abcd.corpus import (
    STATUS_ANALYZED,
    STATUS_EXCLUDED,
    AnalysisConfig,
    CorpusManifest,
    ManifestEntry,
    ProgramRecord,
    analyze_corpus,
    analyze_program,
    load_manifest,
    sample_corpus,
)
from abcd.errors import ConfigError, ManifestError, ParseError, SampleSizeError
from abcd.metrics import EdgeMode
from abcd.synth import generate_program
from conftest import FIXTURES

TREND_MANIFEST = str(FIXTURES / "trend_manifest.jsonl")


def write_manifest(tmp_path, rows, name="manifest.jsonl"):
    path = tmp_path / name
    lines = []
    for row in rows:
        lines.append(row if isinstance(row, str) else json.dumps(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def make_corpus(tmp_path, sizes, bad=()):
    """Write synth programs per dataset label; ``bad`` ids get junk bodies."""
    rows = []
    seed = 0
    for dataset, count in sizes.items():
        for i in range(count):
            entry_id = f"{dataset}-{i}"
            rel = f"{dataset}_{i}.vp"
            text = "def f(:\n" if entry_id in bad else generate_program(seed, target_lines=8)
            (tmp_path / rel).write_text(text, encoding="utf-8")
            rows.append({"id": entry_id, "path": rel, "dataset": dataset})
            seed += 1
    return write_manifest(tmp_path, rows)


# ------------------------------------------------------------------ manifest


def test_load_manifest_happy_path(tmp_path):
    path = write_manifest(
        tmp_path,
        [
            {"id": "a", "path": "sub/a.vp", "dataset": "d1", "extra": "ignored"},
            "",
            {"id": "b", "path": "b.vp", "dataset": "d2"},
        ],
    )
    manifest = load_manifest(path)
    assert len(manifest) == 2
    assert [e.id for e in manifest] == ["a", "b"]
    assert manifest.entries[0].path == os.path.join(str(tmp_path), "sub", "a.vp")
    assert manifest.datasets() == ("d1", "d2")
    assert manifest.source == os.path.abspath(path)


def test_absolute_paths_kept(tmp_path):
    abs_path = str(tmp_path / "x.vp")
    path = write_manifest(tmp_path, [{"id": "a", "path": abs_path, "dataset": "d"}])
    assert load_manifest(path).entries[0].path == abs_path


@pytest.mark.parametrize(
    "row,fragment",
    [
        ("{broken", "invalid JSON"),
        ('"just a string"', "object"),
        ('{"path": "x.vp", "dataset": "d"}', "id"),
        ('{"id": "a", "dataset": "d"}', "path"),
        ('{"id": "a", "path": "x.vp"}', "dataset"),
        ('{"id": "", "path": "x.vp", "dataset": "d"}', "id"),
        ('{"id": "a", "path": "x.vp", "dataset": 3}', "dataset"),
    ],
)
def test_load_manifest_line_errors(tmp_path, row, fragment):
    path = write_manifest(tmp_path, [row])
    with pytest.raises(ManifestError, match="line 1") as exc:
        load_manifest(path)
    assert fragment in str(exc.value)


def test_duplicate_ids_name_both_lines(tmp_path):
    path = write_manifest(
        tmp_path,
        [
            {"id": "a", "path": "x.vp", "dataset": "d"},
            {"id": "b", "path": "y.vp", "dataset": "d"},
            {"id": "a", "path": "z.vp", "dataset": "d"},
        ],
    )
    with pytest.raises(ManifestError, match="duplicate id 'a' on lines 1 and 3"):
        load_manifest(path)


def test_datasets_in_first_appearance_order():
    entries = tuple(
        ManifestEntry(id=f"e{i}", path=f"{i}.vp", dataset=ds)
        for i, ds in enumerate(["b", "a", "b", "c", "a"])
    )
    assert CorpusManifest(entries, source="m").datasets() == ("b", "a", "c")


# ------------------------------------------------------------------ sampling


def big_manifest(per_label=40, labels=("x", "y")):
    entries = []
    for label in labels:
        for i in range(per_label):
            entries.append(ManifestEntry(id=f"{label}{i}", path=f"{label}{i}.vp", dataset=label))
    return CorpusManifest(tuple(entries), source="m")


def test_stratified_sampling_takes_n_per_label():
    manifest = big_manifest()
    sampled = sample_corpus(manifest, 10, seed=1)
    by_label = {}
    for entry in sampled:
        by_label.setdefault(entry.dataset, []).append(entry.id)
    assert {k: len(v) for k, v in by_label.items()} == {"x": 10, "y": 10}


def test_sampling_preserves_manifest_order():
    manifest = big_manifest()
    sampled = sample_corpus(manifest, 5, seed=9)
    positions = {e.id: i for i, e in enumerate(manifest)}
    order = [positions[e.id] for e in sampled]
    assert order == sorted(order)


def test_sampling_deterministic_and_seed_sensitive():
    manifest = big_manifest()
    a = [e.id for e in sample_corpus(manifest, 12, seed=4)]
    b = [e.id for e in sample_corpus(manifest, 12, seed=4)]
    c = [e.id for e in sample_corpus(manifest, 12, seed=5)]
    assert a == b
    assert a != c


def test_pooled_sampling_draws_from_union():
    manifest = big_manifest(per_label=6)
    sampled = sample_corpus(manifest, 9, seed=2, pooled=True)
    assert len(sampled) == 9
    # 9 > 6, impossible per-label, so this must be pooled across labels.
    labels = {e.dataset for e in sampled}
    assert labels == {"x", "y"}


def test_stratified_overdraw_names_the_dataset():
    manifest = big_manifest(per_label=6)
    with pytest.raises(SampleSizeError, match="sample size 7 exceeds dataset 'x' size 6"):
        sample_corpus(manifest, 7, seed=0)


def test_pooled_overdraw():
    manifest = big_manifest(per_label=6)
    with pytest.raises(SampleSizeError):
        sample_corpus(manifest, 13, seed=0, pooled=True)


# --------------------------------------------------------------------- config


def test_config_defaults():
    config = AnalysisConfig()
    assert config.registry.names == ("simple_query", "llm_query")
    assert config.edge_mode is EdgeMode.FIELD
    assert config.token_aggregation == "macro"
    assert config.sample_size is None
    assert config.seed == 0
    assert config.exclusion_warn_threshold == pytest.approx(0.03)
    assert config.pooled_sampling is False


@pytest.mark.parametrize(
    "kwargs",
    [
        {"token_aggregation": "median"},
        {"sample_size": 0},
        {"sample_size": -3},
        {"seed": -1},
        {"seed": 2**64},
        {"exclusion_warn_threshold": -0.1},
        {"exclusion_warn_threshold": 1.5},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        AnalysisConfig(**kwargs)


def test_config_from_dict_and_canonical_roundtrip():
    config = AnalysisConfig.from_dict(
        {
            "registry": ["simple_query"],
            "edge_mode": "tree",
            "token_aggregation": "micro",
            "sample_size": 16,
            "seed": 99,
        }
    )
    assert config.registry.names == ("simple_query",)
    assert config.edge_mode is EdgeMode.TREE
    rebuilt = AnalysisConfig.from_dict(config.canonical_dict())
    assert rebuilt == config
    assert rebuilt.config_hash == config.config_hash


def test_config_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown config field"):
        AnalysisConfig.from_dict({"bogus": 1})


def test_config_hash_tracks_content():
    base = AnalysisConfig()
    assert base.config_hash == AnalysisConfig().config_hash
    assert base.config_hash != AnalysisConfig(seed=1).config_hash
    assert len(base.config_hash) == 12


def test_config_api_spec_from_mapping():
    config = AnalysisConfig.from_dict({"api_spec": {"entry_arity": 3}})
    assert config.api_spec.entry_arity == 3


# ------------------------------------------------------------------ analysis


def test_analyze_program_happy_path():
    metrics = analyze_program("x = f.simple_query(\"Is it day?\")\n")
    assert metrics.vlm.call_count == 1
    assert metrics.nodes > 0
    assert metrics.edges_tree == metrics.nodes - 1


def test_analyze_program_propagates_parse_errors():
    with pytest.raises(ParseError):
        analyze_program("def f(:\n")


def test_program_record_requires_exactly_one_outcome():
    with pytest.raises(ValueError):
        ProgramRecord(id="a", dataset="d", status=STATUS_ANALYZED, metrics=None, error=None)


def test_analyze_corpus_end_to_end(tmp_path):
    manifest_path = make_corpus(tmp_path, {"d1": 4, "d2": 3}, bad={"d2-1"})
    result = analyze_corpus(load_manifest(manifest_path))
    assert len(result.records) == 7
    statuses = {r.id: r.status for r in result.records}
    assert statuses["d2-1"] == STATUS_EXCLUDED
    assert sum(1 for r in result.records if r.status == STATUS_ANALYZED) == 6
    excluded = {s.dataset: s.excluded for s in result.exclusions}
    assert excluded == {"d1": 0, "d2": 1}
    bad_record = [r for r in result.records if r.id == "d2-1"][0]
    assert bad_record.metrics is None
    assert "line" in bad_record.error


def test_exclusion_warning_logged(tmp_path, caplog):
    manifest_path = make_corpus(tmp_path, {"d1": 4}, bad={"d1-0"})
    with caplog.at_level(logging.WARNING, logger="abcd.corpus"):
        result = analyze_corpus(load_manifest(manifest_path))
    assert result.warned is True
    assert any("d1" in rec.message for rec in caplog.records)
    summary = result.exclusions[0]
    assert summary.warned is True
    assert summary.fraction == pytest.approx(0.25)


def test_no_warning_at_exact_threshold(tmp_path, caplog):
    # 1 of 4 excluded, threshold 0.25: the fraction must be strictly
    # greater than the threshold to warn.
    manifest_path = make_corpus(tmp_path, {"d1": 4}, bad={"d1-0"})
    config = AnalysisConfig(exclusion_warn_threshold=0.25)
    with caplog.at_level(logging.WARNING, logger="abcd.corpus"):
        result = analyze_corpus(load_manifest(manifest_path), config)
    assert result.warned is False
    assert not caplog.records


def test_threshold_zero_is_rejected():
    with pytest.raises(ConfigError, match="exclusion_warn_threshold"):
        AnalysisConfig(exclusion_warn_threshold=0.0)


def test_missing_file_aborts(tmp_path):
    manifest_path = write_manifest(
        tmp_path, [{"id": "a", "path": "missing.vp", "dataset": "d"}]
    )
    with pytest.raises(OSError):
        analyze_corpus(load_manifest(manifest_path))


def test_sample_size_applied_by_analyze(tmp_path):
    manifest_path = make_corpus(tmp_path, {"d1": 6, "d2": 6})
    config = AnalysisConfig(sample_size=2, seed=7)
    result = analyze_corpus(load_manifest(manifest_path), config)
    assert len(result.records) == 4
    per_label = {}
    for record in result.records:
        per_label[record.dataset] = per_label.get(record.dataset, 0) + 1
    assert per_label == {"d1": 2, "d2": 2}


def test_concurrent_matches_serial(tmp_path):
    manifest_path = make_corpus(tmp_path, {"d1": 5, "d2": 5}, bad={"d1-2"})
    manifest = load_manifest(manifest_path)
    serial = analyze_corpus(manifest, jobs=1)
    parallel = analyze_corpus(manifest, jobs=2)
    assert serial.records == parallel.records
    assert serial.exclusions == parallel.exclusions
    assert serial.warned == parallel.warned


def test_trend_fixture_corpus_all_parse():
    result = analyze_corpus(load_manifest(TREND_MANIFEST))
    assert all(r.status == STATUS_ANALYZED for r in result.records)
    assert result.warned is False
