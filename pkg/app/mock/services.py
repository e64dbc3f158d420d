import logging
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Optional

from fastapi import Request

from ..config import settings
from .reader import MockReader
from .search import MockPageSource, MockSearchEngine

logger = logging.getLogger(__name__)


@dataclass
class MockServices:
    """Backends behind the standing mock HTTP services"""

    search_engine: Optional[MockSearchEngine] = None
    reader: Optional[MockReader] = None
    page_source: Optional[MockPageSource] = None
    search_api_key: str = ""
    llm_api_key: str = ""
    failures: Deque[int] = field(default_factory=deque)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def inject_failures(self, *status_codes: int) -> None:
        """Queue status codes answered before normal handling resumes"""
        with self._lock:
            self.failures.extend(status_codes)

    def next_failure(self) -> Optional[int]:
        with self._lock:
            return self.failures.popleft() if self.failures else None


def load_services() -> MockServices:
    """Build the mock backends from MOCK_INDEX_PATH / MOCK_READER_PATH"""
    services = MockServices(search_api_key=settings.SEARCH_API_KEY, llm_api_key=settings.LLM_API_KEY)
    if settings.MOCK_INDEX_PATH:
        services.search_engine = MockSearchEngine.from_file(settings.MOCK_INDEX_PATH)
        services.page_source = MockPageSource(services.search_engine.index)
        logger.info(f"Loaded mock index with {len(services.search_engine.index.pages)} pages")
    if settings.MOCK_READER_PATH:
        services.reader = MockReader.from_file(settings.MOCK_READER_PATH)
        logger.info(f"Loaded mock reader rule ({services.reader.rule.behavior.value})")
    return services


def get_services(request: Request) -> MockServices:
    """Dependency to get the backends of the running app"""
    return request.app.state.services
