import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Protocol, Sequence, Tuple
from urllib.parse import urlsplit

from ..errors import FetchError
from ..models import Bm25Params, Document, RetrievalMode, SearchHit
from .bm25 import CorpusStats, bm25_score, bm25_tokenize, chunk_words

logger = logging.getLogger(__name__)


class SearchBackend(Protocol):
    def search(self, query: str, top_k: int) -> List[SearchHit]: ...


class PageSource(Protocol):
    def fetch_text(self, url: str) -> str: ...


class HostThrottle:
    """Minimum delay between two requests to the same host"""

    def __init__(self, delay: float, clock=time.monotonic, sleep=time.sleep):
        self.delay = delay
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_slot: Dict[str, float] = {}

    def wait(self, url: str) -> None:
        if self.delay <= 0:
            return
        host = urlsplit(url).netloc
        with self._lock:
            now = self._clock()
            slot = max(now, self._next_slot.get(host, now))
            self._next_slot[host] = slot + self.delay
        if slot > now:
            self._sleep(slot - now)


class Retriever:
    """Web-search retriever with snippet and full-page BM25 modes"""

    def __init__(
        self,
        search: SearchBackend,
        pages: Optional[PageSource] = None,
        mode: RetrievalMode = RetrievalMode.SNIPPET,
        top_k: int = 5,
        bm25: Optional[Bm25Params] = None,
        fetch_parallelism: int = 4,
        politeness_delay: float = 0.0,
    ):
        if mode is RetrievalMode.BM25 and pages is None:
            raise ValueError("bm25 retrieval needs a page source")
        self.search = search
        self.pages = pages
        self.mode = mode
        self.top_k = top_k
        self.bm25 = bm25 or Bm25Params()
        self.fetch_parallelism = fetch_parallelism
        self.throttle = HostThrottle(politeness_delay)

    def retrieve(self, queries: Sequence[str]) -> List[Document]:
        if self.mode is RetrievalMode.BM25:
            return self.retrieve_fullpage_bm25(queries)
        return self.retrieve_snippets(queries)

    def _search_all(self, queries: Sequence[str]) -> List[SearchHit]:
        if not queries:
            raise ValueError("at least one query is required")
        hits, seen = [], set()
        for query in queries:
            for hit in self.search.search(query, self.top_k):
                if hit.url not in seen:
                    seen.add(hit.url)
                    hits.append(hit)
        return hits

    def retrieve_snippets(self, queries: Sequence[str]) -> List[Document]:
        documents = []
        for hit in self._search_all(queries):
            snippet = hit.snippet.strip()
            if not snippet:
                continue
            documents.append(Document(id=hit.url, source_url=hit.url, text=snippet, score=0.0))
        return documents

    def fetch_page_text(self, url: str) -> str:
        self.throttle.wait(url)
        return self.pages.fetch_text(url)

    def _fetch_all(self, hits: Sequence[SearchHit]) -> List[Tuple[SearchHit, Optional[str]]]:
        def fetch(hit: SearchHit) -> Optional[str]:
            try:
                return self.fetch_page_text(hit.url)
            except FetchError as e:
                logger.warning(f"Skipping page: {e}")
                return None

        with ThreadPoolExecutor(max_workers=self.fetch_parallelism) as pool:
            texts = list(pool.map(fetch, hits))
        return list(zip(hits, texts))

    def retrieve_fullpage_bm25(self, queries: Sequence[str]) -> List[Document]:
        pages = [(hit, text) for hit, text in self._fetch_all(self._search_all(queries)) if text is not None]
        if not pages:
            logger.warning(f"No page could be fetched for queries {list(queries)}")
            return []

        params = self.bm25
        chunks = []
        for page_index, (hit, text) in enumerate(pages):
            for offset, words in chunk_words(text.split(), params.chunk_size, params.chunk_stride):
                chunk_text = " ".join(words)
                tokens = bm25_tokenize(chunk_text)
                if tokens:
                    chunks.append((page_index, offset, hit.url, chunk_text, tokens))
        if not chunks:
            return []

        stats = CorpusStats.from_documents([tokens for *_, tokens in chunks])
        query_tokens = bm25_tokenize(" ".join(queries))
        scored = [
            (bm25_score(query_tokens, tokens, stats, params.k1, params.b), page_index, offset, url, chunk_text)
            for page_index, offset, url, chunk_text, tokens in chunks
        ]
        scored.sort(key=lambda item: (-item[0], item[1], item[2]))
        return [
            Document(id=f"{url}#{offset}", source_url=url, text=chunk_text, score=score)
            for score, _, offset, url, chunk_text in scored[: params.keep_top]
        ]


def reader_context(documents: Sequence[Document]) -> str:
    return "\n".join(doc.text for doc in documents)
