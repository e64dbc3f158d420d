from .qa import Choice, PredictionRecord, PseudoPair, QASample, ScoreTriple, TaskKind
from .retrieval import Bm25Params, Document, RetrievalMode, SearchHit
from .chat import ChatMessage, ChatRequest, ChatResponse
from .report import Aggregates, IterationLog, PipelineMode, RunReport
from .mock import MockIndex, MockPage, MockReaderRule, ReaderBehavior

__all__ = [
    "Choice", "PredictionRecord", "PseudoPair", "QASample", "ScoreTriple", "TaskKind",
    "Bm25Params", "Document", "RetrievalMode", "SearchHit",
    "ChatMessage", "ChatRequest", "ChatResponse",
    "Aggregates", "IterationLog", "PipelineMode", "RunReport",
    "MockIndex", "MockPage", "MockReaderRule", "ReaderBehavior",
]
