"""Command-line interface: subcommands, exit codes, config precedence."""

import json

import pytest

from abcd.cli import EXIT_FAILURE, EXIT_MANIFEST, EXIT_OK, EXIT_USAGE, main
from abcd.corpus import AnalysisConfig
from conftest import FIXTURES

FEVORI = str(FIXTURES / "fevori.vp")
CONQUER = str(FIXTURES / "conquer.vp")
BAD_ENTRY = str(FIXTURES / "bad_entry.vp")
TREND_MANIFEST = str(FIXTURES / "trend_manifest.jsonl")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ------------------------------------------------------------------- analyze


def test_analyze_table_default(capsys):
    code, out, err = run(capsys, "analyze", FEVORI)
    assert code == EXIT_OK
    assert "vlm calls:       2" in out
    assert "ast nodes:       129" in out


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", FEVORI, "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["path"] == FEVORI
    assert payload["vlm"]["call_count"] == 2
    assert payload["vlm"]["token_counts"] == [6, 11]
    assert payload["nodes"] == 129


def test_analyze_missing_file(capsys):
    code, out, err = run(capsys, "analyze", "no_such_file.vp")
    assert code == EXIT_FAILURE
    assert err.startswith("abcd: ")


def test_analyze_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.vp"
    bad.write_text("def f(:\n", encoding="utf-8")
    code, out, err = run(capsys, "analyze", str(bad))
    assert code == EXIT_FAILURE
    assert "parse error" in err


def test_analyze_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "analyze", FEVORI, "--format", "json", "--output", str(target))
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(target.read_text())["nodes"] == 129


def test_analyze_registry_override(capsys):
    code, out, _ = run(
        capsys, "analyze", CONQUER, "--format", "json", "--registry", "llm_query"
    )
    assert code == EXIT_OK
    assert json.loads(out)["vlm"]["call_count"] == 0


# -------------------------------------------------------------------- corpus


def test_corpus_json(capsys):
    code, out, _ = run(capsys, "corpus", TREND_MANIFEST)
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["schema"] == "abcd-report/1"
    assert len(payload["records"]) == 15


def test_corpus_table(capsys):
    code, out, _ = run(capsys, "corpus", TREND_MANIFEST, "--format", "table")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("Dataset")
    assert "tim-conquer-style" in out


def test_corpus_csv(capsys):
    code, out, _ = run(capsys, "corpus", TREND_MANIFEST, "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("dataset,")


def test_corpus_manifest_error(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{broken\n", encoding="utf-8")
    code, _, err = run(capsys, "corpus", str(bad))
    assert code == EXIT_MANIFEST
    assert "line 1" in err


def test_corpus_missing_manifest(capsys):
    # An unreadable manifest is an io failure, not a manifest-format error.
    code, _, err = run(capsys, "corpus", "nope.jsonl")
    assert code == EXIT_FAILURE


def test_corpus_sample_flags(capsys):
    code, out, _ = run(
        capsys, "corpus", TREND_MANIFEST, "--sample", "2", "--seed", "11"
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert len(payload["records"]) == 6  # 2 per dataset label
    assert payload["seed"] == 11


def test_corpus_sample_too_large(capsys):
    code, _, err = run(capsys, "corpus", TREND_MANIFEST, "--sample", "9")
    assert code == EXIT_USAGE
    assert "exceeds dataset" in err


def test_corpus_jobs_must_be_positive(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["corpus", TREND_MANIFEST, "--jobs", "0"])
    assert exc.value.code == EXIT_USAGE


def test_corpus_jobs_two_matches_serial(capsys):
    code_a, out_a, _ = run(capsys, "corpus", TREND_MANIFEST)
    code_b, out_b, _ = run(capsys, "corpus", TREND_MANIFEST, "--jobs", "2")
    assert code_a == code_b == EXIT_OK
    assert out_a == out_b


# ------------------------------------------------------------------- compare


@pytest.fixture()
def report_path(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, _, _ = run(capsys, "corpus", TREND_MANIFEST, "--output", str(path))
    assert code == EXIT_OK
    return str(path)


def test_compare_requires_dataset_choice(capsys, report_path):
    code, _, err = run(capsys, "compare", report_path, report_path)
    assert code == EXIT_USAGE
    assert "--dataset" in err


def test_compare_two_datasets(capsys, report_path):
    code, out, _ = run(
        capsys,
        "compare",
        report_path,
        report_path,
        "--dataset-a",
        "nextqa-style",
        "--dataset-b",
        "tim-conquer-style",
    )
    assert code == EXIT_OK
    assert "A: nextqa-style" in out
    assert "greater" in out


def test_compare_report_with_itself(capsys, report_path):
    code, out, _ = run(
        capsys,
        "compare",
        report_path,
        report_path,
        "--dataset-a",
        "tim-style",
        "--dataset-b",
        "tim-style",
    )
    assert code == EXIT_OK
    assert "equal" in out
    assert "greater" not in out
    assert "less" not in out


def test_compare_unknown_dataset(capsys, report_path):
    code, _, err = run(
        capsys, "compare", report_path, report_path,
        "--dataset-a", "missing", "--dataset-b", "nextqa-style",
    )
    assert code == EXIT_USAGE


def test_compare_mismatched_config_hashes(capsys, tmp_path, report_path):
    other = tmp_path / "other.json"
    code, _, _ = run(
        capsys, "corpus", TREND_MANIFEST, "--edge-mode", "tree", "--output", str(other)
    )
    assert code == EXIT_OK
    code, _, err = run(
        capsys, "compare", report_path, str(other),
        "--dataset-a", "nextqa-style", "--dataset-b", "nextqa-style",
    )
    assert code == EXIT_USAGE
    assert "config hashes differ" in err


def test_compare_bad_report_file(capsys, tmp_path, report_path):
    junk = tmp_path / "junk.json"
    junk.write_text("{}", encoding="utf-8")
    code, _, err = run(capsys, "compare", report_path, str(junk))
    assert code == EXIT_FAILURE


# ------------------------------------------------------------------ dump-ast


def test_dump_ast_sexpr(capsys, tmp_path):
    prog = tmp_path / "p.vp"
    prog.write_text("x = 1\n", encoding="utf-8")
    code, out, _ = run(capsys, "dump-ast", str(prog))
    assert code == EXIT_OK
    assert out.strip() == "(Module (Assign (Name id=x) (Constant value=1)))"


def test_dump_ast_json(capsys, tmp_path):
    prog = tmp_path / "p.vp"
    prog.write_text("x = 1\n", encoding="utf-8")
    code, out, _ = run(capsys, "dump-ast", str(prog), "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["schema"] == "abcd-tree/1"


def test_dump_ast_pass_fixture(capsys):
    code, out, _ = run(capsys, "dump-ast", str(FIXTURES / "pass.vp"))
    assert code == EXIT_OK
    assert out.strip() == "(Module (Pass))"


# ---------------------------------------------------------------------- lint


def test_lint_clean_file(capsys):
    code, out, _ = run(capsys, "lint", FEVORI)
    assert code == EXIT_OK
    assert out == ""


def test_lint_error_exits_one(capsys):
    code, out, _ = run(capsys, "lint", BAD_ENTRY)
    assert code == EXIT_FAILURE
    assert "error[entry-point]" in out
    assert out.startswith(BAD_ENTRY + ":")


def test_lint_warning_exits_zero(capsys, tmp_path):
    prog = tmp_path / "warn.vp"
    prog.write_text(
        "def execute_command(video, annotation, possible_answers, query):\n"
        "    segment = VideoSegment(video, annotation)\n"
        "    segment.select_answer({}, query, possible_answers)\n"
        "    return query\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, "lint", str(prog))
    assert code == EXIT_OK
    assert "warn[unreturned-answer]" in out


# -------------------------------------------------------------------- config


def test_config_file_flag_overrides(capsys, tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"edge_mode": "tree", "seed": 5}), encoding="utf-8")
    code, out, _ = run(
        capsys, "corpus", TREND_MANIFEST, "--config", str(config_path)
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["config"]["edge_mode"] == "tree"
    assert payload["seed"] == 5
    # Flags outrank the file.
    code, out, _ = run(
        capsys, "corpus", TREND_MANIFEST, "--config", str(config_path),
        "--edge-mode", "field",
    )
    payload = json.loads(out)
    assert payload["config"]["edge_mode"] == "field"
    assert payload["seed"] == 5


def test_config_env_var(capsys, tmp_path, monkeypatch):
    config_path = tmp_path / "env.json"
    config_path.write_text(json.dumps({"token_aggregation": "micro"}), encoding="utf-8")
    monkeypatch.setenv("ABCD_CONFIG", str(config_path))
    code, out, _ = run(capsys, "corpus", TREND_MANIFEST)
    assert code == EXIT_OK
    assert json.loads(out)["config"]["token_aggregation"] == "micro"


def test_explicit_config_beats_env(capsys, tmp_path, monkeypatch):
    env_cfg = tmp_path / "env.json"
    env_cfg.write_text(json.dumps({"seed": 1}), encoding="utf-8")
    flag_cfg = tmp_path / "flag.json"
    flag_cfg.write_text(json.dumps({"seed": 2}), encoding="utf-8")
    monkeypatch.setenv("ABCD_CONFIG", str(env_cfg))
    code, out, _ = run(capsys, "corpus", TREND_MANIFEST, "--config", str(flag_cfg))
    assert json.loads(out)["seed"] == 2


def test_bad_config_file(capsys, tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"bogus": True}), encoding="utf-8")
    code, _, err = run(capsys, "analyze", FEVORI, "--config", str(config_path))
    assert code == EXIT_USAGE
    assert "unknown config field" in err


def test_config_hash_stability_between_runs(capsys):
    code_a, out_a, _ = run(capsys, "corpus", TREND_MANIFEST)
    code_b, out_b, _ = run(capsys, "corpus", TREND_MANIFEST)
    assert json.loads(out_a)["config_hash"] == json.loads(out_b)["config_hash"]
    assert json.loads(out_a)["config_hash"] == AnalysisConfig().config_hash


# ------------------------------------------------------------------- general


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "0.1.0" in capsys.readouterr().out


@pytest.mark.parametrize(
    "command,flags",
    [
        ("analyze", ["--format", "--output", "--config", "--registry", "--edge-mode", "--aggregation"]),
        ("corpus", ["--format", "--output", "--jobs", "--sample", "--seed", "--pooled", "--warn-threshold"]),
        ("compare", ["--dataset-a", "--dataset-b", "--output"]),
        ("dump-ast", ["--format", "--output"]),
        ("lint", ["--output", "--config"]),
    ],
)
def test_help_lists_every_flag(capsys, command, flags):
    with pytest.raises(SystemExit) as exc:
        main([command, "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    for flag in flags:
        assert flag in text


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_no_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == EXIT_USAGE
