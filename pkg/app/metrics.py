"""Answer normalisation, EM, token F1 and the retrieval hit indicator.

Normalisation follows the SQuAD convention: lowercase, strip punctuation, drop the
articles a/an/the, collapse whitespace. Multi-choice answers are compared as sets of
option letters.
"""

import re
import string
from collections import Counter
from typing import Iterable, List, Optional, Sequence

from .models import Document, ScoreTriple, TaskKind

_ARTICLES = re.compile(r"\b(a|an|the)\b")
_PUNCTUATION = set(string.punctuation)
_LETTER_SPLIT = re.compile(r"[,\s]+")


def normalize_answer(text: str) -> str:
    text = text.lower()
    text = "".join(ch for ch in text if ch not in _PUNCTUATION)
    text = _ARTICLES.sub(" ", text)
    return " ".join(text.split())


def option_letters(text: str) -> List[str]:
    """Sorted unique option letters in an answer such as 'C, A' or 'a,c'"""
    letters = set()
    for token in _LETTER_SPLIT.split(text.strip()):
        token = token.strip(string.punctuation).upper()
        if len(token) == 1 and "A" <= token <= "Z":
            letters.add(token)
    return sorted(letters)


def _answer_tokens(text: str, task_kind: TaskKind) -> List[str]:
    if task_kind is TaskKind.MULTI_CHOICE:
        return option_letters(text)
    return normalize_answer(text).split()


def exact_match(prediction: str, golds: Iterable[str], task_kind: TaskKind = TaskKind.OPEN_QA) -> int:
    golds = list(golds)
    if task_kind is TaskKind.MULTI_CHOICE:
        predicted = option_letters(prediction)
        return int(any(predicted == option_letters(gold) for gold in golds))
    predicted = normalize_answer(prediction)
    return int(any(predicted == normalize_answer(gold) for gold in golds))


def _token_f1(pred_tokens: Sequence[str], gold_tokens: Sequence[str]) -> float:
    if not pred_tokens or not gold_tokens:
        return float(len(pred_tokens) == len(gold_tokens))
    common = Counter(pred_tokens) & Counter(gold_tokens)
    num_same = sum(common.values())
    if num_same == 0:
        return 0.0
    precision = num_same / len(pred_tokens)
    recall = num_same / len(gold_tokens)
    return (2 * precision * recall) / (precision + recall)


def f1_score(prediction: str, golds: Iterable[str], task_kind: TaskKind = TaskKind.OPEN_QA) -> float:
    pred_tokens = _answer_tokens(prediction, task_kind)
    return max(_token_f1(pred_tokens, _answer_tokens(gold, task_kind)) for gold in golds)


def hit_indicator(golds: Iterable[str], docs: Sequence[Document]) -> int:
    """+1 when a normalised gold answer occurs inside the normalised retrieved text"""
    if not docs:
        return -1
    haystack = normalize_answer(" ".join(doc.text for doc in docs))
    for gold in golds:
        needle = normalize_answer(gold)
        if needle and needle in haystack:
            return 1
    return -1


def score_prediction(
    prediction: str,
    golds: Iterable[str],
    task_kind: TaskKind,
    docs: Optional[Sequence[Document]] = None,
) -> ScoreTriple:
    """EM, F1 and, when retrieval happened, the hit indicator"""
    golds = list(golds)
    em = exact_match(prediction, golds, task_kind)
    f1 = 1.0 if em else f1_score(prediction, golds, task_kind)
    hit = hit_indicator(golds, docs) if docs is not None else None
    return ScoreTriple(em=em, f1=f1, hit=hit)
