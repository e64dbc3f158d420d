import json
import logging
import re
from collections import deque
from pathlib import Path
from typing import Deque, Dict, List, Optional, Tuple

from pydantic import ValidationError

from ..errors import ArtifactIOError, MissingArtifactError, ScriptMissError
from ..llm.prompts import SENTINEL
from ..metrics import normalize_answer
from ..models import ChatRequest, MockReaderRule, ReaderBehavior
from ..utils import prompt_hash

logger = logging.getLogger(__name__)

_QUESTION_MARKER = "Question:"
_WORD = re.compile(r"\w+")
PROMPT_HISTORY = 256


def load_reader_rule(path) -> MockReaderRule:
    rule_path = Path(path)
    if not rule_path.is_file():
        raise MissingArtifactError(rule_path, "mock reader rule")
    try:
        return MockReaderRule.model_validate(json.loads(rule_path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ArtifactIOError(rule_path, f"invalid mock reader rule: {e}") from e


def split_prompt(prompt: str, questions) -> Tuple[Optional[str], str]:
    """Find which known question a prompt asks and return (question, document region)"""
    best = None
    for question in questions:
        if prompt.endswith(f" {question} Answer:") and (best is None or len(question) > len(best)):
            best = question
    if best is None:
        return None, ""
    head = prompt[: len(prompt) - len(f" {best} Answer:")]
    marker = head.rfind(_QUESTION_MARKER)
    doc = head[marker + len(_QUESTION_MARKER) :] if marker >= 0 else ""
    return best, doc.strip()


class MockReader:
    """Deterministic stand-in for the chat LLM, used as reader or as frozen rewriter"""

    def __init__(self, rule: MockReaderRule):
        if rule.behavior is ReaderBehavior.KEYWORD_REWARD and not _WORD.fullmatch(rule.keyword):
            raise ValueError("keyword_reward needs a single-word keyword")
        self.rule = rule
        # most recent prompts only
        self.prompts: Deque[str] = deque(maxlen=PROMPT_HISTORY)

    @classmethod
    def from_file(cls, path):
        return cls(load_reader_rule(path))

    def complete(self, request: ChatRequest) -> str:
        return self.read(request.prompt)

    def read(self, prompt: str) -> str:
        self.prompts.append(prompt)
        behavior = self.rule.behavior
        if behavior is ReaderBehavior.SCRIPTED:
            return self._scripted(prompt)
        if behavior is ReaderBehavior.KEYWORD_REWARD:
            return self._keyword(prompt)
        return self._extractive(prompt)

    def _extractive(self, prompt: str) -> str:
        question, doc = split_prompt(prompt, self.rule.golds)
        if question is None:
            return self.rule.default
        haystack = normalize_answer(doc)
        found = [gold for gold in self.rule.golds[question] if normalize_answer(gold) and normalize_answer(gold) in haystack]
        if not found:
            return self.rule.default
        return max(found, key=len) + SENTINEL

    def _scripted(self, prompt: str) -> str:
        key = prompt_hash(prompt)
        if key in self.rule.scripts:
            return self.rule.scripts[key]
        question, _ = split_prompt(prompt, self.rule.by_question)
        if question is not None:
            return self.rule.by_question[question]
        if self.rule.strict:
            raise ScriptMissError(key)
        logger.debug(f"No script for prompt {key}; answering with the default")
        return self.rule.default

    def _keyword(self, prompt: str) -> str:
        """Gold answer iff the documents in the prompt carry the keyword as a whole word.

        The index holds a page made of the keyword alone, so only a query containing the
        keyword retrieves it.
        """
        question, doc = split_prompt(prompt, self.rule.golds)
        if question is None or self.rule.keyword.lower() not in _WORD.findall(doc.lower()):
            return self.rule.default
        return self.rule.golds[question][0] + SENTINEL


def golds_by_question(samples) -> Dict[str, List[str]]:
    """Rule ``golds`` table for a dataset, keyed the way prompts show the question"""
    return {sample.pipeline_text: list(sample.gold_answers) for sample in samples}
