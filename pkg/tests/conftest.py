from pathlib import Path

import numpy as np
import pytest

from app.data import load_dataset
from app.llm import Demonstrations
from app.mock import MockPageSource, MockReader, MockSearchEngine, golds_by_question, load_mock_index
from app.models import MockReaderRule, ReaderBehavior, RetrievalMode, TaskKind
from app.config import RunConfig
from app.pipeline import PipelineComponents
from app.policy import RewriterPolicy, Vocab
from app.retrieval import Retriever

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def open_qa_samples():
    return load_dataset(FIXTURES / "open_qa.jsonl", TaskKind.OPEN_QA)


@pytest.fixture
def multi_choice_samples():
    return load_dataset(FIXTURES / "multi_choice.jsonl", TaskKind.MULTI_CHOICE)


@pytest.fixture
def mock_index():
    return load_mock_index(FIXTURES / "mock_index.json")


@pytest.fixture
def search_engine(mock_index):
    return MockSearchEngine(mock_index)


@pytest.fixture
def page_source(mock_index):
    return MockPageSource(mock_index)


@pytest.fixture
def extractive_reader(open_qa_samples):
    return MockReader(MockReaderRule(behavior=ReaderBehavior.EXTRACTIVE, golds=golds_by_question(open_qa_samples)))


@pytest.fixture
def scripted_rewriter():
    return MockReader.from_file(FIXTURES / "rewriter_scripted.json")


@pytest.fixture
def make_components(search_engine, page_source):
    """Factory for pipeline components over the mock index"""

    def build(reader, mode=RetrievalMode.SNIPPET, rewriter_llm=None, policy=None, **config):
        run_config = RunConfig(retrieval_mode=mode, **config)
        retriever = Retriever(search_engine, page_source, mode=mode, top_k=run_config.top_k)
        return PipelineComponents(
            reader=reader,
            config=run_config,
            retriever=retriever,
            rewriter_llm=rewriter_llm,
            policy=policy,
            demos=Demonstrations(),
        )

    return build


@pytest.fixture
def toy_vocab():
    return Vocab.build(["alpha beta gamma delta", "red blue green magic"])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_policy(toy_vocab):
    return RewriterPolicy.create(toy_vocab, dim=8, max_len=6, seed=3)
