import json
from pathlib import Path

from click.testing import CliRunner

from indexkit.cli import main

from .conftest import FIXTURES


def run_build(tmp_path, extra=()):
    runner = CliRunner()
    out = tmp_path / "draft"
    result = runner.invoke(
        main,
        [
            "build",
            "--input", str(FIXTURES / "ai_primer.txt"),
            "--config", str(FIXTURES / "config.ini"),
            "--out", str(out),
            *extra,
        ],
    )
    return result, out


def test_build_writes_outputs(tmp_path):
    result, out = run_build(tmp_path)
    assert result.exit_code == 0, result.output
    assert out.with_suffix(".json").exists()
    assert out.with_suffix(".txt").exists()
    assert "AI see Artificial Intelligence" in out.with_suffix(".txt").read_text()
    assert "terms=" in result.output and "relations=" in result.output


def test_build_missing_input_nonzero(tmp_path):
    runner = CliRunner()
    result = runner.invoke(
        main,
        ["build", "--input", str(tmp_path / "missing.txt"), "--out", str(tmp_path / "o")],
    )
    assert result.exit_code != 0


def test_build_deterministic(tmp_path):
    _, out1 = run_build(tmp_path / "a")
    _, out2 = run_build(tmp_path / "b")
    assert out1.with_suffix(".json").read_bytes() == out2.with_suffix(".json").read_bytes()
    assert out1.with_suffix(".txt").read_bytes() == out2.with_suffix(".txt").read_bytes()


def test_eval_draft_against_itself(tmp_path):
    result, out = run_build(tmp_path)
    assert result.exit_code == 0
    runner = CliRunner()
    eval_result = runner.invoke(
        main,
        [
            "eval",
            "--draft", str(out.with_suffix(".json")),
            "--reference", str(out.with_suffix(".json")),
            "--report", "machine",
        ],
    )
    assert eval_result.exit_code == 0, eval_result.output
    payload = json.loads(eval_result.output)
    assert payload["descriptor_precision"] == 1.0
    assert payload["ranked_precision"] == 1.0
    assert payload["relation_precision"] == 1.0


def test_eval_table_with_traditional(tmp_path):
    result, out = run_build(tmp_path)
    runner = CliRunner()
    eval_result = runner.invoke(
        main,
        [
            "eval",
            "--draft", str(out.with_suffix(".json")),
            "--reference", str(out.with_suffix(".json")),
            "--traditional", str(FIXTURES / "traditional_index.txt"),
        ],
    )
    assert eval_result.exit_code == 0, eval_result.output
    assert "Size increase (# of descriptors) – comparison 1" in eval_result.output
    assert "+" in eval_result.output  # growth over the traditional index


def test_eval_missing_reference_nonzero(tmp_path):
    result, out = run_build(tmp_path)
    runner = CliRunner()
    eval_result = runner.invoke(
        main,
        ["eval", "--draft", str(out.with_suffix(".json")),
         "--reference", str(tmp_path / "nope.txt")],
    )
    assert eval_result.exit_code != 0


def test_config_errors_are_reported(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("weights.frequency = 0.9\n")
    runner = CliRunner()
    result = runner.invoke(
        main,
        ["build", "--input", str(FIXTURES / "ai_primer.txt"),
         "--config", str(bad), "--out", str(tmp_path / "o")],
    )
    assert result.exit_code == 1
    assert "BadWeights" in result.output
