import logging
from typing import List, Optional

import requests
from pydantic import ValidationError

from ..errors import SearchError
from ..models import SearchHit
from ..utils import RetryPolicy, error_message, request_with_retry, validate_query

logger = logging.getLogger(__name__)


class SearchClient:
    """Provider-agnostic web search client.

    Speaks ``GET {endpoint}?q=...&count=...`` returning ``{"results": [{url, title, snippet}]}``.
    A thin adapter in front of a real engine maps its payload to this shape.
    """

    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        api_key_header: str = "X-Api-Key",
        timeout: float = 20.0,
        retry: Optional[RetryPolicy] = None,
        session: Optional[requests.Session] = None,
    ):
        if not endpoint:
            raise ValueError("search endpoint is not configured")
        self.endpoint = endpoint
        self.timeout = timeout
        self.retry = retry or RetryPolicy()
        self.session = session or requests.Session()
        if api_key:
            self.session.headers[api_key_header] = api_key

    def search(self, query: str, top_k: int) -> List[SearchHit]:
        query = validate_query(query)
        if top_k < 1:
            raise ValueError("top_k must be at least 1")

        try:
            response = request_with_retry(
                self.session,
                "GET",
                self.endpoint,
                self.retry,
                params={"q": query, "count": top_k},
                timeout=self.timeout,
            )
        except requests.RequestException as e:
            raise SearchError(f"search request failed after retries: {e}") from e

        if not 200 <= response.status_code < 300:
            raise SearchError(f"search returned HTTP {response.status_code}: {error_message(response)}")

        try:
            payload = response.json()
            hits = [SearchHit.model_validate(item) for item in payload["results"]]
        except (ValueError, KeyError, TypeError, ValidationError) as e:
            raise SearchError(f"malformed search response: {e}") from e

        logger.debug(f"Search '{query}' returned {len(hits)} hits")
        return hits[:top_k]
