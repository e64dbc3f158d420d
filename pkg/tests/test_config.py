import pytest
from pydantic import ValidationError

from app.config import RunConfig, TrainConfig, config_keys, load_config_file, load_run_config, load_train_config
from app.errors import MissingArtifactError
from app.models import RetrievalMode
from app.utils import config_hash


def test_config_file_keys_are_lowercased(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nRETRIEVAL_MODE=bm25\ntop_k = 3\nempty=\nkl_beta=0.5\n", encoding="utf-8")
    assert load_config_file(path) == {"retrieval_mode": "bm25", "top_k": "3", "kl_beta": "0.5"}

    run = load_run_config(path)
    assert run.retrieval_mode is RetrievalMode.BM25
    assert run.top_k == 3
    assert load_train_config(path).kl_beta == 0.5


def test_defaults_without_a_file():
    assert load_run_config() == RunConfig()
    train = load_train_config()
    assert (train.clip_epsilon, train.gamma, train.gae_lambda, train.value_coef) == (0.2, 1.0, 0.95, 0.5)


def test_missing_config_file(tmp_path):
    with pytest.raises(MissingArtifactError):
        load_config_file(tmp_path / "absent.cfg")


def test_chunk_stride_cannot_exceed_size():
    with pytest.raises(ValidationError):
        RunConfig(chunk_size=10, chunk_stride=20)


def test_policy_dim_range():
    with pytest.raises(ValidationError):
        TrainConfig(dim=4)
    with pytest.raises(ValidationError):
        TrainConfig(dim=128)


def test_config_keys_and_hash():
    assert "top_k" in config_keys(RunConfig)
    assert config_hash(RunConfig()) == config_hash(RunConfig())
    assert config_hash(RunConfig(top_k=2)) != config_hash(RunConfig())
