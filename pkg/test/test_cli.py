import json

import pandas as pd
import pytest

from main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main, task_overrides
from modules.errors import ConfigError
from modules.exporter import parse_export_text
from utils.jsonl_util import read_jsonl


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_oracle_eval_is_perfect(tmp_path):
    code = run(tmp_path, "eval", "--task", "add", "--difficulty", "3", "--n", "20", "--workers", "2", "--trace", "2")
    assert code == EXIT_OK
    report = json.loads((tmp_path / "eval" / "report.json").read_text(encoding="utf-8"))
    assert report["summary"][0]["mean"] == 1.0
    assert "workers" not in report["config"]
    traces = json.loads((tmp_path / "eval" / "traces.json").read_text(encoding="utf-8"))
    assert [t["correct"] for t in traces] == [True, True]
    assert (tmp_path / "eval" / "eval.xlsx").exists()


def test_seeds_are_summarized(tmp_path):
    assert run(tmp_path, "eval", "--task", "sub", "--difficulty", "4", "--n", "10", "--seed", "1", "--seed", "2") == EXIT_OK
    results = pd.read_csv(tmp_path / "eval" / "results.csv")
    assert results["seed"].tolist() == [1, 2]
    summary = pd.read_csv(tmp_path / "eval" / "summary.csv")
    assert summary["runs"].tolist() == [2]
    assert summary["std"].tolist() == [0.0]


def test_cot_beyond_context_limit_fails(tmp_path):
    code = run(tmp_path, "eval", "--task", "mul", "--difficulty", "8", "--n", "20", "--thought", "cot",
               "--max-context", "256")
    assert code == EXIT_FAILED
    report = json.loads((tmp_path / "eval" / "report.json").read_text(encoding="utf-8"))
    assert report["infeasible"] == ["mul-8"]
    assert report["reports"][0]["feasibility"]["feasible"] is False


def test_min_accuracy_is_checked(tmp_path):
    assert run(tmp_path, "eval", "--task", "add", "--difficulty", "2", "--n", "5", "--min-accuracy", "1.0") == EXIT_OK


def test_usage_errors(tmp_path, capsys):
    assert run(tmp_path, "eval", "--task", "add") == EXIT_USAGE
    assert run(tmp_path, "eval", "--task", "calculus", "--difficulty", "2") == EXIT_USAGE
    assert run(tmp_path, "eval", "--predictor", "neural") == EXIT_USAGE
    assert run(tmp_path, "eval", "--config", str(tmp_path / "missing.json")) == EXIT_USAGE
    assert "[ERROR]" in capsys.readouterr().err
    with pytest.raises(SystemExit) as e:
        main(["fly"])
    assert e.value.code == 2


def test_task_pairing():
    assert task_overrides(["add"], [2, 3]) == [{"task": "add", "difficulty": 2}, {"task": "add", "difficulty": 3}]
    assert task_overrides(["add", "sub"], [2, 3]) == [{"task": "add", "difficulty": 2}, {"task": "sub", "difficulty": 3}]
    assert task_overrides(None, None) is None
    with pytest.raises(ConfigError):
        task_overrides(["add", "sub"], [1, 2, 3])


def test_generate_is_reproducible(tmp_path):
    args = ["generate", "--task", "lcs", "--difficulty", "5", "--n", "10", "--seed", "3"]
    assert run(tmp_path / "a", *args, "--workers", "1") == EXIT_OK
    assert run(tmp_path / "b", *args, "--workers", "4") == EXIT_OK
    name = "lcs_5_rot_seed3.jsonl"
    first = (tmp_path / "a" / "generate" / name).read_bytes()
    assert first == (tmp_path / "b" / "generate" / name).read_bytes()
    records = list(read_jsonl(tmp_path / "a" / "generate" / name))
    assert {r["problem_id"] for r in records} == {f"lcs-5-3-{i}" for i in range(10)}
    manifest = json.loads((tmp_path / "a" / "generate" / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["files"][0]["records"] == len(records)
    assert (tmp_path / "a" / "generate" / "vocab.json").exists()


def test_stats_rot_stays_shorter_than_cot(tmp_path):
    assert run(tmp_path, "stats", "--task", "add", "--difficulty", "6", "--n", "50") == EXIT_OK
    summary = json.loads((tmp_path / "stats" / "summary.json").read_text(encoding="utf-8"))["summaries"][0]
    assert summary["rot_max_length"]["max"] < summary["cot_length"]["max"]
    assert 0.0 <= summary["cache_saving"] < 1.0
    assert (tmp_path / "stats" / "add_6_length_chart.png").exists()
    assert (tmp_path / "stats" / "add_6_stats.xlsx").exists()


def test_export_lines_parse(tmp_path):
    assert run(tmp_path, "export", "--task", "mul", "--difficulty", "3", "--n", "5") == EXIT_OK
    lines = (tmp_path / "export" / "mul_3_rot_seed0.jsonl").read_text(encoding="utf-8").splitlines()
    assert lines
    for line in lines:
        record = json.loads(line)
        assert set(record) == {"prompt", "completion"}
        completion = parse_export_text(record["completion"])
        assert completion[-1].text in ("THINK", "STOP")
        assert parse_export_text(record["prompt"])


@pytest.mark.slow
def test_train_command(tmp_path):
    config = tmp_path / "train.json"
    config.write_text(json.dumps({
        "model": {"d_model": 16, "n_layers": 1, "n_heads": 2, "ffn_hidden": 32, "max_context": 64},
        "train": {"batch_size": 4, "total_steps": 2, "eval_interval": 2, "eval_problems": 5, "log_interval": 1},
    }), encoding="utf-8")
    code = run(tmp_path, "train", "--config", str(config), "--task", "add", "--difficulty", "1", "--workers", "1")
    assert code == EXIT_OK
    assert (tmp_path / "train" / "seed0" / "checkpoints" / "rot_latest.pt").exists()
