import json
from pathlib import Path

import numpy as np
import pytest

from app.llm import prompts as prompts_module
from app.llm import SENTINEL, Demonstrations, build_reader_prompt, build_rewriter_prompt, parse_answer, parse_queries
from app.models import Document, TaskKind

from conftest import FIXTURES

PINNED = json.loads((FIXTURES / "prompts.json").read_text(encoding="utf-8"))


def docs(*texts):
    return [Document(id=f"d{i}", source_url="https://x", text=text) for i, text in enumerate(texts)]


def test_reader_prompt_without_documents(open_qa_samples):
    assert build_reader_prompt(open_qa_samples[0], []) == PINNED["reader_direct"]


def test_reader_prompt_with_documents(open_qa_samples):
    context = docs("France is a country in Western Europe.", "Its capital is Paris.")
    assert build_reader_prompt(open_qa_samples[0], context) == PINNED["reader_with_docs"]


def test_open_qa_rewriter_prompt_with_demo(open_qa_samples):
    demos = Demonstrations.load(FIXTURES / "demos.json")
    prompt = build_rewriter_prompt(open_qa_samples[0], demos=demos.rewriter(open_qa_samples[0].task_kind))
    assert prompt == PINNED["rewriter_open_qa"]


def test_multi_choice_rewriter_prompt_lists_options(multi_choice_samples):
    assert build_rewriter_prompt(multi_choice_samples[0]) == PINNED["rewriter_multi_choice"]


def test_prompts_are_byte_stable(open_qa_samples):
    context = docs("a", "b")
    assert build_reader_prompt(open_qa_samples[2], context) == build_reader_prompt(open_qa_samples[2], context)


def test_packaged_demonstrations_cover_every_template():
    demos = Demonstrations.load(Path(prompts_module.__file__).with_name("demos.json"))
    assert demos.reader and all(d.endswith(SENTINEL) for d in demos.reader)
    assert set(demos.by_template) == {"reader", "rewriter_open_qa", "rewriter_multi_choice"}


def test_missing_demo_keys_default_to_empty():
    demos = Demonstrations({"reader": ["Question: x Answer: y**"]})
    assert demos.rewriter(TaskKind.MULTI_CHOICE) == []


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("Paris**", "Paris"),
        ("  Paris  ** trailing text", "Paris"),
        ("no sentinel at all", "no sentinel at all"),
        ("**", ""),
        ("A ** B ** C", "A"),
    ],
)
def test_parse_answer(raw, expected):
    assert parse_answer(raw) == expected


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("capital of France**", ["capital of France"]),
        ("q1; q2 ;; q3**ignored; q4", ["q1", "q2", "q3"]),
        ("  ;  ; **", []),
        ("single query without sentinel", ["single query without sentinel"]),
    ],
)
def test_parse_queries(raw, expected):
    assert parse_queries(raw) == expected


def test_parse_fuzz():
    rng = np.random.default_rng(99)
    alphabet = list("ab ;*\n\tx")
    for _ in range(1000):
        raw = "".join(rng.choice(alphabet, size=int(rng.integers(0, 30))))
        head = raw.split(SENTINEL)[0]

        answer = parse_answer(raw)
        assert answer == head.strip()
        assert SENTINEL not in answer

        queries = parse_queries(raw)
        assert all(q and q == q.strip() and ";" not in q for q in queries)
        assert not any(SENTINEL in q for q in queries)
        assert queries == [part.strip() for part in head.split(";") if part.strip()]
