import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv, dotenv_values
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import MissingArtifactError
from .models.retrieval import RetrievalMode

# Load environment variables from .env file
load_dotenv()

PACKAGE_DIR = Path(__file__).resolve().parent
DEFAULT_DEMOS_PATH = PACKAGE_DIR / "llm" / "demos.json"


class Settings:
    # Live search service
    SEARCH_ENDPOINT: str = os.getenv("SEARCH_ENDPOINT", "")
    SEARCH_API_KEY: str = os.getenv("SEARCH_API_KEY", "")
    SEARCH_API_KEY_HEADER: str = os.getenv("SEARCH_API_KEY_HEADER", "X-Api-Key")

    # Live chat-completions service
    LLM_ENDPOINT: str = os.getenv("LLM_ENDPOINT", "")
    LLM_API_KEY: str = os.getenv("LLM_API_KEY", "")
    LLM_MODEL: str = os.getenv("LLM_MODEL", "gpt-3.5-turbo")

    # Mock harness fixtures served by app.main
    MOCK_INDEX_PATH: str = os.getenv("MOCK_INDEX_PATH", "")
    MOCK_READER_PATH: str = os.getenv("MOCK_READER_PATH", "")

    # API Configuration
    API_HOST: str = os.getenv("API_HOST", "127.0.0.1")
    API_PORT: int = int(os.getenv("API_PORT", "8000"))
    DEBUG: bool = os.getenv("DEBUG", "False").lower() == "true"
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # API Metadata
    API_TITLE: str = "Rewrite-Retrieve-Read Mock Services"
    API_DESCRIPTION: str = "Offline search engine and chat reader speaking the live wire formats"
    API_VERSION: str = "1.0.0"


settings = Settings()


class RunConfig(BaseModel):
    """Pipeline settings read from the flat key-value config file."""

    model_config = ConfigDict(extra="ignore")

    retrieval_mode: RetrievalMode = Field(default=RetrievalMode.SNIPPET, description="snippet or bm25")
    top_k: int = Field(default=5, ge=1, description="Search hits requested per query")
    keep_top: int = Field(default=5, ge=1, description="BM25 chunks kept for the reader")
    bm25_k1: float = Field(default=1.5, gt=0)
    bm25_b: float = Field(default=0.75, ge=0, le=1)
    chunk_size: int = Field(default=100, ge=1, description="BM25 chunk length in words")
    chunk_stride: int = Field(default=50, ge=1, description="BM25 chunk stride in words")
    demos_path: Optional[str] = Field(default=None, description="Demonstration fixture JSON")
    reader_model: str = Field(default=settings.LLM_MODEL)
    rewriter_model: str = Field(default=settings.LLM_MODEL)
    temperature: float = Field(default=0.0, ge=0)
    max_tokens: int = Field(default=256, gt=0)
    parallelism: int = Field(default=1, ge=1)
    max_failure_fraction: float = Field(default=0.5, ge=0, le=1)
    seed: int = Field(default=0, description="Sampling seed sent with every chat request")
    page_max_bytes: int = Field(default=500_000, gt=0)
    fetch_parallelism: int = Field(default=4, ge=1)
    politeness_delay: float = Field(default=0.0, ge=0)
    request_timeout: float = Field(default=20.0, gt=0)
    max_retries: int = Field(default=3, ge=0)
    backoff_base: float = Field(default=0.5, ge=0)
    rate_limit_per_second: float = Field(default=0.0, ge=0, description="0 disables the limiter")
    mock_index: Optional[str] = Field(default=None, description="Use the in-process mock search engine")
    mock_reader: Optional[str] = Field(default=None, description="Use the in-process mock reader")
    mock_rewriter: Optional[str] = Field(default=None, description="Use a mock frozen rewriter")
    checkpoint: Optional[str] = Field(default=None, description="Trained rewriter checkpoint")

    @model_validator(mode="after")
    def _check_chunking(self):
        if self.chunk_stride > self.chunk_size:
            raise ValueError("chunk_stride must not exceed chunk_size")
        return self


class TrainConfig(BaseModel):
    """Scalar hyperparameters for warm-up and PPO training."""

    model_config = ConfigDict(extra="ignore")

    clip_epsilon: float = Field(default=0.2, gt=0, description="PPO ratio clip")
    gamma: float = Field(default=1.0, gt=0, le=1, description="Discount factor")
    gae_lambda: float = Field(default=0.95, ge=0, le=1)
    kl_beta: float = Field(default=0.02, ge=0)
    value_coef: float = Field(default=0.5, ge=0)
    f1_coef: float = Field(default=1.0, ge=0)
    hit_coef: float = Field(default=0.2, ge=0)
    ppo_epochs: int = Field(default=4, ge=1)
    minibatch_size: int = Field(default=8, ge=1)
    rollout_batch_size: int = Field(default=16, ge=1)
    learning_rate: float = Field(default=0.01, ge=0)
    max_grad_norm: float = Field(default=1.0, gt=0)
    total_iterations: int = Field(default=200, ge=0)
    seed: int = 0
    normalize_advantages: bool = True
    rollout_workers: int = Field(default=1, ge=1)
    checkpoint_every: int = Field(default=0, ge=0, description="0 disables periodic checkpoints")
    dim: int = Field(default=32, ge=8, le=64)
    max_len: int = Field(default=32, ge=1)
    init_scale: float = Field(default=1.0, gt=0)
    warmup_epochs: int = Field(default=300, ge=0)
    warmup_lr: float = Field(default=0.02, ge=0)
    warmup_batch_size: int = Field(default=32, ge=1)


def load_config_file(path) -> dict:
    """Read a dotenv-syntax key=value file into a plain dict"""
    config_path = Path(path)
    if not config_path.is_file():
        raise MissingArtifactError(config_path, "config file")
    values = dotenv_values(config_path)
    return {key.lower(): value for key, value in values.items() if value is not None and value != ""}


def load_run_config(path=None) -> RunConfig:
    return RunConfig(**load_config_file(path)) if path else RunConfig()


def load_train_config(path=None) -> TrainConfig:
    return TrainConfig(**load_config_file(path)) if path else TrainConfig()


def config_keys(model: type[BaseModel]) -> list[str]:
    return list(model.model_fields)
