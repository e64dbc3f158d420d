"""Reader and rewriter prompt templates and their output parsers.

Every template is a single line of the form ``instruction {demonstrations} Question: ... Answer:``
and asks the model to close its output with the ``**`` sentinel.
"""

import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from jinja2 import Environment, StrictUndefined

from ..models import Document, QASample, TaskKind

SENTINEL = "**"

READER_INSTRUCTION = "Answer the question in the following format, end the answer with '**'."
REWRITER_INSTRUCTIONS = {
    TaskKind.OPEN_QA: (
        "Think step by step to answer this question, and provide search engine queries for knowledge "
        "that you need. Split the queries with ';' and end the queries with '**'."
    ),
    TaskKind.MULTI_CHOICE: (
        "Provide a better search query for web search engine to answer the given question, "
        "end the queries with '**'."
    ),
}

_env = Environment(autoescape=False, undefined=StrictUndefined, keep_trailing_newline=False)
_TEMPLATE = _env.from_string(
    "{{ instruction }}{% for demo in demos %} {{ demo }}{% endfor %}"
    " Question:{% if doc %} {{ doc }}{% endif %} {{ question }} Answer:"
)

DEMO_KEYS = ("reader", "rewriter_open_qa", "rewriter_multi_choice")


def build_reader_prompt(sample: QASample, docs: Sequence[Document], demos: Sequence[str] = ()) -> str:
    doc = "\n".join(d.text for d in docs)
    return _TEMPLATE.render(instruction=READER_INSTRUCTION, demos=list(demos), doc=doc, question=sample.pipeline_text)


def build_rewriter_prompt(sample: QASample, task_kind: Optional[TaskKind] = None, demos: Sequence[str] = ()) -> str:
    kind = task_kind or sample.task_kind
    return _TEMPLATE.render(
        instruction=REWRITER_INSTRUCTIONS[kind], demos=list(demos), doc="", question=sample.pipeline_text
    )


def parse_answer(raw: str) -> str:
    return raw.split(SENTINEL, 1)[0].strip()


def parse_queries(raw: str) -> List[str]:
    head = raw.split(SENTINEL, 1)[0]
    return [query.strip() for query in head.split(";") if query.strip()]


class Demonstrations:
    """Pinned few-shot demonstrations, one list per template"""

    def __init__(self, by_template: Optional[Dict[str, List[str]]] = None):
        self.by_template = {key: list((by_template or {}).get(key, [])) for key in DEMO_KEYS}

    @classmethod
    def load(cls, path):
        with open(Path(path), "r", encoding="utf-8") as handle:
            return cls(json.load(handle))

    @property
    def reader(self) -> List[str]:
        return self.by_template["reader"]

    def rewriter(self, task_kind: TaskKind) -> List[str]:
        return self.by_template[f"rewriter_{task_kind.value}"]
