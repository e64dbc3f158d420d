import logging
import threading
import time
from typing import Optional, Protocol

import requests
from pydantic import ValidationError

from ..errors import LLMAuthError, LLMError, RateLimitError, ResponseFormatError
from ..models import ChatRequest, ChatResponse
from ..utils import RetryPolicy, error_message, request_with_retry

logger = logging.getLogger(__name__)


class ChatBackend(Protocol):
    def complete(self, request: ChatRequest) -> str: ...


class RateLimiter:
    """Spaces calls at least 1/rate seconds apart across threads"""

    def __init__(self, rate_per_second: float, clock=time.monotonic, sleep=time.sleep):
        self.interval = 1.0 / rate_per_second if rate_per_second > 0 else 0.0
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_slot = 0.0

    def acquire(self) -> None:
        if self.interval == 0.0:
            return
        with self._lock:
            now = self._clock()
            slot = max(now, self._next_slot)
            self._next_slot = slot + self.interval
        if slot > now:
            self._sleep(slot - now)


class ChatClient:
    """Chat-completions client for the reader and the frozen rewriter"""

    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        timeout: float = 60.0,
        retry: Optional[RetryPolicy] = None,
        rate_limiter: Optional[RateLimiter] = None,
        session: Optional[requests.Session] = None,
    ):
        if not endpoint:
            raise ValueError("LLM endpoint is not configured")
        self.endpoint = endpoint
        self.timeout = timeout
        self.retry = retry or RetryPolicy()
        self.rate_limiter = rate_limiter or RateLimiter(0.0)
        self.session = session or requests.Session()
        if api_key:
            self.session.headers["Authorization"] = f"Bearer {api_key}"
        logger.info(f"Initialized chat client endpoint={endpoint}")

    def complete(self, request: ChatRequest) -> str:
        self.rate_limiter.acquire()
        try:
            response = request_with_retry(
                self.session,
                "POST",
                self.endpoint,
                self.retry,
                json=request.model_dump(exclude_none=True),
                timeout=self.timeout,
            )
        except requests.RequestException as e:
            raise LLMError(f"chat request failed after retries: {e}") from e

        status = response.status_code
        if status in (401, 403):
            raise LLMAuthError(f"authentication failed ({status}): {error_message(response)}")
        if status == 429:
            raise RateLimitError(f"rate limit exhausted after {self.retry.max_retries} retries: {error_message(response)}")
        if not 200 <= status < 300:
            raise LLMError(f"chat endpoint returned HTTP {status}: {error_message(response)}")

        try:
            completion = ChatResponse.model_validate(response.json())
        except (ValueError, ValidationError) as e:
            raise ResponseFormatError(f"malformed chat response: {e}") from e
        return completion.choices[0].message.content
