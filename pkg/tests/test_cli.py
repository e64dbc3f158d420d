import json
import math

import pytest

from app.cli import main
from app.data import load_pseudo_data, load_run
from app.policy import load_checkpoint

from conftest import FIXTURES


def fixture_config(name, tmp_path):
    """Copy of a fixture config with its paths made absolute"""
    text = (FIXTURES / name).read_text(encoding="utf-8").replace("tests/fixtures/", f"{FIXTURES}/")
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def config_file(tmp_path):
    return fixture_config("run.cfg", tmp_path)


def eval_args(config_file, out, mode="retrieve_then_read", *extra):
    return [
        "eval",
        "--config", str(config_file),
        "--dataset", str(FIXTURES / "open_qa.jsonl"),
        "--mode", mode,
        "--out", str(out),
        *extra,
    ]


def test_eval_writes_run_directory(config_file, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(eval_args(config_file, out)) == 0
    report = load_run(out)
    assert report.aggregates.em == pytest.approx(75.0)
    assert report.dataset_id == "open_qa"
    assert len(report.records) == 4
    assert "75.00" in capsys.readouterr().out


def test_eval_retrieval_override(config_file, tmp_path):
    out = tmp_path / "bm25"
    assert main(eval_args(config_file, out, "retrieve_then_read", "--retrieval", "bm25", "--seed", "3")) == 0
    assert load_run(out).label == "retrieve_then_read/bm25"


def test_unknown_mode_is_a_usage_error(config_file, tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(eval_args(config_file, tmp_path / "run", "bogus"))
    assert excinfo.value.code == 2


def test_missing_dataset_exits_two(config_file, tmp_path):
    args = eval_args(config_file, tmp_path / "run")
    args[args.index("--dataset") + 1] = str(tmp_path / "absent.jsonl")
    assert main(args) == 2


def test_invalid_config_value_exits_two(tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("top_k=0\n", encoding="utf-8")
    assert main(eval_args(config, tmp_path / "run", "direct_reader")) == 2


def test_trained_rewriter_needs_checkpoint(config_file, tmp_path):
    assert main(eval_args(config_file, tmp_path / "run", "trained_rewriter")) == 2


def test_unwritable_out_exits_one(config_file, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    assert main(eval_args(config_file, blocker / "run")) == 1


def test_warmup_with_empty_pseudo_data_exits_two(config_file, tmp_path):
    pseudo = tmp_path / "pseudo.jsonl"
    pseudo.write_text("", encoding="utf-8")
    args = ["warmup", "--config", str(config_file), "--pseudo", str(pseudo), "--out", str(tmp_path / "w.ckpt")]
    assert main(args) == 2
    assert not (tmp_path / "w.ckpt").exists()


def test_report_orders_runs_by_pipeline(config_file, tmp_path, capsys):
    direct, retrieve = tmp_path / "direct", tmp_path / "retrieve"
    assert main(eval_args(config_file, retrieve)) == 0
    assert main(eval_args(config_file, direct, "direct_reader")) == 0
    capsys.readouterr()

    assert main(["report", "--runs", str(retrieve), str(direct)]) == 0
    table = capsys.readouterr().out
    header = table.splitlines()[0]
    assert header.index("direct_reader") < header.index("retrieve_then_read/snippet")
    assert table.splitlines()[3].split() == ["hit-rate", "-", "75.00"]


def test_report_on_missing_run_exits_two(tmp_path):
    assert main(["report", "--runs", str(tmp_path / "nothing")]) == 2


def test_help_lists_config_keys(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["ppo-train", "--help"])
    assert excinfo.value.code == 0
    text = capsys.readouterr().out
    for key in ("retrieval_mode", "top_k", "kl_beta", "clip_epsilon", "rollout_batch_size"):
        assert key in text


@pytest.mark.slow
def test_full_training_chain(tmp_path):
    config = fixture_config("keyword_chain.cfg", tmp_path)
    dataset = str(FIXTURES / "open_qa.jsonl")
    pseudo = tmp_path / "pseudo.jsonl"
    warm = tmp_path / "warm.ckpt"
    trained = tmp_path / "trained.ckpt"

    assert main(["collect-pseudo", "--config", str(config), "--dataset", dataset, "--out", str(pseudo)]) == 0
    pairs = load_pseudo_data(pseudo)
    assert [p.sample_id for p in pairs] == ["q1", "q2"]
    assert all("magic" in p.rewrite.split() for p in pairs)

    assert main(["warmup", "--config", str(config), "--pseudo", str(pseudo), "--out", str(warm)]) == 0
    assert load_checkpoint(warm).value is None

    args = ["ppo-train", "--config", str(config), "--dataset", dataset, "--init", str(warm), "--out", str(trained)]
    assert main(args) == 0
    assert load_checkpoint(trained).value is not None
    log_lines = (tmp_path / "trained.ckpt.log.jsonl").read_text(encoding="utf-8").splitlines()
    logs = [json.loads(line) for line in log_lines]
    assert [log["iter"] for log in logs] == list(range(1, 61))
    assert all(math.isfinite(log["mean_kl"]) for log in logs)
    early = sum(log["mean_reward"] for log in logs[:5]) / 5
    late = sum(log["mean_reward"] for log in logs[-10:]) / 10
    assert late > early + 0.2

    out = tmp_path / "trained_run"
    assert main(eval_args(config, out, "trained_rewriter", "--checkpoint", str(trained))) == 0
    assert load_run(out).label == "trained_rewriter/snippet"
    assert main(["report", "--runs", str(out), str(tmp_path / "nothing")]) == 2
