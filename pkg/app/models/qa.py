import re
from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# an option label as it appears in serialized multi-choice text
_LABEL_MARKER = re.compile(r"(?:^|\s)[A-Z]\.(?=\s|$)")


class TaskKind(str, Enum):
    OPEN_QA = "open_qa"
    MULTI_CHOICE = "multi_choice"


class Choice(BaseModel):
    label: str = Field(..., pattern=r"^[A-Z]$", description="Single option letter")
    text: str


class QASample(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1)
    question: str = Field(..., min_length=1)
    gold_answers: List[str] = Field(..., min_length=1, description="Accepted answers; option letters for multi-choice")
    choices: Optional[List[Choice]] = None
    task_kind: TaskKind = TaskKind.OPEN_QA

    @model_validator(mode="after")
    def _check_choices(self):
        if self.task_kind is TaskKind.MULTI_CHOICE:
            if not self.choices:
                raise ValueError("multi_choice sample requires choices")
            labels = [choice.label for choice in self.choices]
            expected = [chr(ord("A") + i) for i in range(len(labels))]
            if labels != expected:
                raise ValueError(f"choice labels must run A.. in order, got {labels}")
            for choice in self.choices:
                if _LABEL_MARKER.search(choice.text):
                    raise ValueError(f"choice {choice.label} text contains an option label: {choice.text!r}")
        return self

    @property
    def pipeline_text(self) -> str:
        """Question as the rewriter and reader see it"""
        if self.task_kind is TaskKind.OPEN_QA or not self.choices:
            return self.question
        options = " ".join(f"{choice.label}. {choice.text}" for choice in self.choices)
        return f"{self.question} {options}"

    @classmethod
    def from_record(cls, record: dict, kind: TaskKind, fallback_id: str):
        """Create QASample from one dataset JSON object"""
        choices = record.get("choices") if kind is TaskKind.MULTI_CHOICE else None
        return cls(
            id=str(record.get("id") or fallback_id),
            question=record.get("question", ""),
            gold_answers=record.get("answers", []),
            choices=choices,
            task_kind=kind,
        )

    def to_record(self) -> dict:
        record = {"id": self.id, "question": self.question, "answers": list(self.gold_answers)}
        if self.choices:
            record["choices"] = [choice.model_dump() for choice in self.choices]
        return record


class PseudoPair(BaseModel):
    sample_id: str = Field(..., min_length=1)
    original_question: str
    rewrite: str = Field(..., min_length=1)

    @field_validator("rewrite")
    @classmethod
    def _non_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("rewrite must not be blank")
        return value


class ScoreTriple(BaseModel):
    em: Literal[0, 1]
    f1: float = Field(..., ge=0.0, le=1.0)
    hit: Optional[Literal[-1, 1]] = None


class PredictionRecord(BaseModel):
    sample_id: str
    rewrites: List[str] = Field(default_factory=list)
    doc_ids: List[str] = Field(default_factory=list)
    raw_output: str = ""
    answer: str = ""
    em: Literal[0, 1] = 0
    f1: float = Field(default=0.0, ge=0.0, le=1.0)
    hit: Optional[Literal[-1, 1]] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_json_line(self) -> str:
        return self.model_dump_json(exclude_none=True)
