"""Okapi BM25 over word chunks of fetched pages."""

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

_TOKEN = re.compile(r"[^\W_]+")


def bm25_tokenize(text: str) -> List[str]:
    """Lowercase and split on anything that is not a letter or digit"""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class CorpusStats:
    n_docs: int
    df: Dict[str, int]
    avgdl: float

    @classmethod
    def from_documents(cls, documents: Sequence[Sequence[str]]):
        df = Counter()
        for tokens in documents:
            df.update(set(tokens))
        total = sum(len(tokens) for tokens in documents)
        avgdl = total / len(documents) if documents else 0.0
        return cls(n_docs=len(documents), df=dict(df), avgdl=avgdl)

    def idf(self, term: str) -> float:
        df = self.df.get(term, 0)
        return math.log(1 + (self.n_docs - df + 0.5) / (df + 0.5))


def bm25_score(
    query_tokens: Sequence[str],
    doc_tokens: Sequence[str],
    stats: CorpusStats,
    k1: float = 1.5,
    b: float = 0.75,
) -> float:
    if not doc_tokens:
        raise ValueError("doc_tokens must not be empty")
    tf = Counter(doc_tokens)
    norm = k1 * (1 - b + b * len(doc_tokens) / stats.avgdl)
    score = 0.0
    for term in query_tokens:
        freq = tf.get(term, 0)
        if freq == 0:
            continue
        score += stats.idf(term) * (freq * (k1 + 1)) / (freq + norm)
    return score


def chunk_words(words: Sequence[str], size: int, stride: int) -> List[Tuple[int, List[str]]]:
    """Overlapping (offset, words) windows; the last window always ends at the last word"""
    if stride > size:
        raise ValueError("stride must not exceed size")
    if not words:
        return []
    last_start = max(len(words) - size, 0)
    starts = list(range(0, last_start + 1, stride))
    if starts[-1] != last_start:
        starts.append(last_start)
    return [(start, list(words[start:start + size])) for start in starts]
