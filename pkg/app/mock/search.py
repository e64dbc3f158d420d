import json
import logging
import re
import threading
from pathlib import Path
from typing import List

from pydantic import ValidationError

from ..errors import ArtifactIOError, FetchError, MissingArtifactError
from ..models import MockIndex, MockPage, SearchHit
from ..retrieval import html_to_text
from ..utils import validate_query

logger = logging.getLogger(__name__)

_TERM = re.compile(r"\w+")


def _terms(text: str) -> List[str]:
    return _TERM.findall(text.lower())


def load_mock_index(path) -> MockIndex:
    index_path = Path(path)
    if not index_path.is_file():
        raise MissingArtifactError(index_path, "mock index")
    try:
        return MockIndex.model_validate(json.loads(index_path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ArtifactIOError(index_path, f"invalid mock index: {e}") from e


class MockSearchEngine:
    """Offline search over a fixed page set.

    Pages are ranked by how many distinct query terms they contain, ties broken by url.
    Every query is appended to ``query_log``.
    """

    def __init__(self, index: MockIndex, snippet_window: int = 12):
        self.index = index
        self.snippet_window = snippet_window
        self.query_log: List[str] = []
        self._lock = threading.Lock()
        self._page_terms = {page.url: set(_terms(f"{page.title} {page.body}")) for page in index.pages}

    @classmethod
    def from_file(cls, path):
        return cls(load_mock_index(path))

    def snippet(self, page: MockPage, query_terms: set) -> str:
        words = page.body.split()
        for position, word in enumerate(words):
            if query_terms.intersection(_terms(word)):
                start = max(0, position - self.snippet_window // 2)
                return " ".join(words[start : start + self.snippet_window])
        return " ".join(words[: self.snippet_window])

    def search(self, query: str, top_k: int = 5) -> List[SearchHit]:
        query = validate_query(query)
        with self._lock:
            self.query_log.append(query)

        query_terms = set(_terms(query))
        scored = []
        for page in self.index.pages:
            overlap = len(query_terms & self._page_terms[page.url])
            if overlap:
                scored.append((-overlap, page.url, page))
        scored.sort(key=lambda item: (item[0], item[1]))
        hits = [
            SearchHit(url=page.url, title=page.title, snippet=self.snippet(page, query_terms))
            for _, _, page in scored[:top_k]
        ]
        logger.debug(f"Mock search '{query}' matched {len(scored)} pages")
        return hits


class MockPageSource:
    """Serves the indexed pages as HTML and as extracted text"""

    def __init__(self, index: MockIndex):
        self._pages = {page.url: page for page in index.pages}

    def html(self, url: str) -> str:
        page = self._pages.get(url)
        if page is None:
            raise FetchError(url, "not in mock index")
        return page.render_html()

    def fetch_text(self, url: str) -> str:
        return html_to_text(self.html(url))
