"""Rewrite-retrieve-read orchestration.

The reader always sees the original question; rewrites only drive retrieval.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import pandas as pd

from .config import RunConfig, TrainConfig
from .errors import RunAborted
from .llm import ChatBackend, Demonstrations, build_reader_prompt, build_rewriter_prompt, parse_answer, parse_queries
from .metrics import score_prediction
from .models import (
    Aggregates,
    ChatRequest,
    Document,
    PipelineMode,
    PredictionRecord,
    PseudoPair,
    QASample,
    RunReport,
    ScoreTriple,
    TaskKind,
)
from .policy import RewriterPolicy
from .retrieval import Retriever
from .rl import Env, task_reward
from .utils import config_hash, utc_now

logger = logging.getLogger(__name__)

PSEUDO_QUERY_SEPARATOR = "; "


@dataclass
class PipelineComponents:
    reader: ChatBackend
    config: RunConfig = field(default_factory=RunConfig)
    retriever: Optional[Retriever] = None
    rewriter_llm: Optional[ChatBackend] = None
    policy: Optional[RewriterPolicy] = None
    demos: Demonstrations = field(default_factory=Demonstrations)

    def check(self, mode: PipelineMode) -> None:
        """Raise ValueError when a component the mode needs is missing"""
        if mode.retrieves and self.retriever is None:
            raise ValueError(f"{mode.value} needs a retriever")
        if mode is PipelineMode.FROZEN_REWRITER and self.rewriter_llm is None:
            raise ValueError("frozen_rewriter needs a rewriter LLM")
        if mode is PipelineMode.TRAINED_REWRITER and self.policy is None:
            raise ValueError("trained_rewriter needs a rewriter checkpoint")


def _chat(backend: ChatBackend, prompt: str, model: str, config: RunConfig) -> str:
    request = ChatRequest.single_turn(
        prompt, model, temperature=config.temperature, max_tokens=config.max_tokens, seed=config.seed
    )
    return backend.complete(request)


def rewrite_queries(sample: QASample, mode: PipelineMode, components: PipelineComponents) -> Tuple[List[str], List[str]]:
    """Return (search queries, rewrites) for one sample"""
    if mode is PipelineMode.DIRECT_READER:
        return [], []
    if mode is PipelineMode.RETRIEVE_THEN_READ:
        return [sample.pipeline_text], []
    if mode is PipelineMode.FROZEN_REWRITER:
        prompt = build_rewriter_prompt(sample, demos=components.demos.rewriter(sample.task_kind))
        queries = parse_queries(_chat(components.rewriter_llm, prompt, components.config.rewriter_model, components.config))
        return queries, queries
    rewrite = components.policy.rewrite(sample.pipeline_text)
    return ([rewrite], [rewrite]) if rewrite else ([], [])


def read(sample: QASample, docs: Sequence[Document], components: PipelineComponents) -> Tuple[str, str]:
    """Prompt the reader with [docs, original question]; returns (raw output, parsed answer)"""
    prompt = build_reader_prompt(sample, docs, demos=components.demos.reader)
    raw = _chat(components.reader, prompt, components.config.reader_model, components.config)
    return raw, parse_answer(raw)


def run_sample(sample: QASample, mode: PipelineMode, components: PipelineComponents) -> PredictionRecord:
    try:
        queries, rewrites = rewrite_queries(sample, mode, components)
        docs: Optional[List[Document]] = components.retriever.retrieve(queries) if queries else None
        raw, answer = read(sample, docs or [], components)
        scores = score_prediction(answer, sample.gold_answers, sample.task_kind, docs)
    except Exception as e:
        logger.error(f"Sample {sample.id} failed in {mode.value}: {type(e).__name__}: {e}")
        return PredictionRecord(sample_id=sample.id, error=f"{type(e).__name__}: {e}")

    return PredictionRecord(
        sample_id=sample.id,
        rewrites=rewrites,
        doc_ids=[doc.id for doc in docs or []],
        raw_output=raw,
        answer=answer,
        em=scores.em,
        f1=scores.f1,
        hit=scores.hit,
    )


def aggregate(records: Sequence[PredictionRecord]) -> Aggregates:
    frame = pd.DataFrame(
        {
            "em": [record.em for record in records],
            "f1": [record.f1 for record in records],
            "hit": pd.array([record.hit for record in records], dtype="Int64"),
            "failed": [record.failed for record in records],
        }
    )
    hits = frame["hit"].dropna()
    return Aggregates(
        em=float(frame["em"].mean() * 100),
        f1=float(frame["f1"].mean() * 100),
        hit_rate=float((hits == 1).mean() * 100) if len(hits) else None,
        samples=len(frame),
        failures=int(frame["failed"].sum()),
    )


def run_dataset(
    dataset: Sequence[QASample],
    mode: PipelineMode,
    components: PipelineComponents,
    dataset_id: str = "dataset",
    parallelism: Optional[int] = None,
) -> RunReport:
    """Run every sample through one pipeline configuration, preserving dataset order"""
    if not dataset:
        raise ValueError("dataset is empty; nothing to evaluate")
    components.check(mode)
    config = components.config
    workers = parallelism or config.parallelism

    logger.info(f"Running {mode.value} on {len(dataset)} samples with {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        records = list(pool.map(lambda sample: run_sample(sample, mode, components), dataset))

    aggregates = aggregate(records)
    report = RunReport(
        mode=mode,
        dataset_id=dataset_id,
        task_kind=dataset[0].task_kind,
        retrieval_mode=config.retrieval_mode if mode.retrieves else None,
        records=records,
        aggregates=aggregates,
        timestamp=utc_now(),
        config_hash=config_hash(config),
    )

    if aggregates.failures > config.max_failure_fraction * len(dataset):
        report.partial = True
        raise RunAborted(
            f"{aggregates.failures}/{len(dataset)} samples failed in {mode.value} "
            f"(limit {config.max_failure_fraction:.0%})",
            partial_report=report,
        )
    logger.info(f"Finished {report.label}: EM={aggregates.em:.2f} F1={aggregates.f1:.2f} failures={aggregates.failures}")
    return report


def collect_pseudo_data(dataset: Sequence[QASample], components: PipelineComponents) -> List[PseudoPair]:
    """Frozen-rewriter rewrites of the samples the reader then answered exactly"""
    report = run_dataset(dataset, PipelineMode.FROZEN_REWRITER, components, dataset_id="pseudo")
    pairs = [
        PseudoPair(
            sample_id=sample.id,
            original_question=sample.pipeline_text,
            rewrite=PSEUDO_QUERY_SEPARATOR.join(record.rewrites),
        )
        for sample, record in zip(dataset, report.records)
        if record.em == 1 and record.rewrites
    ]
    if not pairs:
        logger.warning(f"No pseudo pairs collected from {len(dataset)} samples")
    else:
        logger.info(f"Collected {len(pairs)} pseudo pairs from {len(dataset)} samples")
    return pairs


def make_env(components: PipelineComponents, task_kind: TaskKind, cfg: TrainConfig) -> Env:
    """Reward closure for PPO: retrieve with the rewrite, read the original question, score"""
    if components.retriever is None:
        raise ValueError("the training environment needs a retriever")

    def env(sample: QASample, rewrite: str) -> Tuple[float, ScoreTriple]:
        query = rewrite.strip()
        docs = components.retriever.retrieve([query]) if query else []
        _, answer = read(sample, docs, components)
        scores = score_prediction(answer, sample.gold_answers, task_kind, docs)
        return task_reward(scores, task_kind, cfg), scores

    return env
