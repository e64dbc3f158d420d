import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import requests

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


@dataclass
class RetryPolicy:
    max_retries: int = 3
    backoff_base: float = 0.5
    sleep: Callable[[float], None] = field(default=time.sleep, repr=False)

    def delay(self, attempt: int) -> float:
        return self.backoff_base * (2 ** attempt)


def request_with_retry(
    session: requests.Session,
    method: str,
    url: str,
    retry: RetryPolicy,
    **kwargs,
) -> requests.Response:
    """Send a request, retrying transport errors, 429 and 5xx with exponential backoff.

    The final response is returned as-is once retries are spent or the status is not
    retryable; callers decide what a non-2xx status means for them.
    """
    for attempt in range(retry.max_retries + 1):
        last_attempt = attempt == retry.max_retries
        try:
            response = session.request(method, url, **kwargs)
        except (requests.ConnectionError, requests.Timeout) as e:
            if last_attempt:
                raise
            logger.warning(f"{method} {url} failed ({e}); retrying in {retry.delay(attempt):.2f}s")
            retry.sleep(retry.delay(attempt))
            continue

        if response.status_code in RETRYABLE_STATUS and not last_attempt:
            logger.warning(
                f"{method} {url} returned {response.status_code}; retrying in {retry.delay(attempt):.2f}s"
            )
            retry.sleep(retry.delay(attempt))
            continue
        return response

    raise AssertionError("unreachable")


def error_message(response: requests.Response) -> str:
    """Pull the provider's error message out of a JSON error body"""
    try:
        body = response.json()
    except ValueError:
        return response.text.strip() or response.reason or ""
    if isinstance(body, dict):
        error = body.get("error") or body.get("detail")
        if isinstance(error, dict):
            return str(error.get("message", error))
        if error:
            return str(error)
    return response.text.strip()
