import math
from enum import Enum

from pydantic import BaseModel, Field, field_validator, model_validator


class RetrievalMode(str, Enum):
    SNIPPET = "snippet"
    BM25 = "bm25"


class SearchHit(BaseModel):
    url: str = Field(..., min_length=1)
    title: str = ""
    snippet: str = ""


class Document(BaseModel):
    id: str
    source_url: str
    text: str = Field(..., min_length=1)
    score: float = Field(default=0.0, ge=0.0, description="BM25 score, 0 for snippets")

    @field_validator("score")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("score must be finite")
        return value


class Bm25Params(BaseModel):
    k1: float = Field(default=1.5, gt=0)
    b: float = Field(default=0.75, ge=0, le=1)
    chunk_size: int = Field(default=100, gt=0, description="Words per chunk")
    chunk_stride: int = Field(default=50, gt=0, description="Words between chunk starts")
    keep_top: int = Field(default=5, gt=0)

    @model_validator(mode="after")
    def _stride_within_size(self):
        if self.chunk_stride > self.chunk_size:
            raise ValueError("chunk_stride must not exceed chunk_size")
        return self
