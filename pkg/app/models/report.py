from datetime import datetime
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from .qa import PredictionRecord, TaskKind
from .retrieval import RetrievalMode


class PipelineMode(str, Enum):
    DIRECT_READER = "direct_reader"
    RETRIEVE_THEN_READ = "retrieve_then_read"
    FROZEN_REWRITER = "frozen_rewriter"
    TRAINED_REWRITER = "trained_rewriter"

    @property
    def retrieves(self) -> bool:
        return self is not PipelineMode.DIRECT_READER


class Aggregates(BaseModel):
    em: float = Field(..., description="Exact match, percent")
    f1: float = Field(..., description="Token F1, percent")
    hit_rate: Optional[float] = Field(None, description="Percent of retrieving samples whose docs hold a gold answer")
    samples: int
    failures: int


class RunReport(BaseModel):
    model_config = ConfigDict(json_encoders={datetime: lambda v: v.isoformat()})

    mode: PipelineMode
    dataset_id: str
    task_kind: TaskKind
    retrieval_mode: Optional[RetrievalMode] = None
    records: List[PredictionRecord] = Field(default_factory=list, exclude=True)
    aggregates: Aggregates
    timestamp: datetime
    config_hash: str
    partial: bool = False

    @property
    def label(self) -> str:
        if self.retrieval_mode is None or not self.mode.retrieves:
            return self.mode.value
        return f"{self.mode.value}/{self.retrieval_mode.value}"


class IterationLog(BaseModel):
    iter: int
    mean_reward: float
    mean_em: float
    mean_f1: float
    mean_kl: float
    policy_loss: float
    value_loss: float
    skipped: int = 0
