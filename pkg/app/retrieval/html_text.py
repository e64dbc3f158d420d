import codecs
import logging
from typing import Optional

import requests
from bs4 import BeautifulSoup
from bs4.dammit import EncodingDetector

from ..errors import FetchError
from ..utils import RetryPolicy, request_with_retry

logger = logging.getLogger(__name__)

USER_AGENT = "rewrite-retrieve-read/1.0 (+page text fetcher)"
_INVISIBLE_TAGS = ["script", "style", "noscript", "template", "iframe", "head"]


def html_to_text(html: str) -> str:
    """Visible text of an HTML document with whitespace collapsed"""
    soup = BeautifulSoup(html, "html.parser")
    for tag in soup(_INVISIBLE_TAGS):
        tag.decompose()
    return " ".join(soup.get_text(" ").split())


class PageFetcher:
    """Fetches result pages over HTTP and reduces them to text"""

    def __init__(
        self,
        max_bytes: int = 500_000,
        timeout: float = 20.0,
        retry: Optional[RetryPolicy] = None,
        session: Optional[requests.Session] = None,
    ):
        self.max_bytes = max_bytes
        self.timeout = timeout
        self.retry = retry or RetryPolicy(max_retries=1)
        self.session = session or requests.Session()
        self.session.headers["User-Agent"] = USER_AGENT

    def fetch_text(self, url: str) -> str:
        try:
            response = request_with_retry(
                self.session, "GET", url, self.retry, timeout=self.timeout, stream=True
            )
        except requests.RequestException as e:
            raise FetchError(url, f"request failed: {e}") from e

        with response:
            if not 200 <= response.status_code < 300:
                raise FetchError(url, f"HTTP {response.status_code}")
            content_type = response.headers.get("Content-Type", "")
            if "html" not in content_type.lower():
                logger.info(f"Skipping non-HTML content at {url} ({content_type or 'no content type'})")
                return ""
            body = self._read_capped(response)

        # requests assumes ISO-8859-1 for text/html without a charset; only trust a declared one
        declared = response.encoding if "charset=" in content_type.lower() else None
        return html_to_text(decode_html(body, declared))

    def _read_capped(self, response: requests.Response) -> bytes:
        chunks = []
        remaining = self.max_bytes
        for chunk in response.iter_content(chunk_size=16_384):
            chunks.append(chunk[:remaining])
            remaining -= len(chunks[-1])
            if remaining <= 0:
                logger.debug(f"Page {response.url} truncated at {self.max_bytes} bytes")
                break
        return b"".join(chunks)


def decode_html(body: bytes, declared: Optional[str] = None) -> str:
    """Decode page bytes: header charset, then <meta charset>, then UTF-8"""
    for encoding in (declared, EncodingDetector.find_declared_encoding(body, is_html=True)):
        if not encoding:
            continue
        try:
            codecs.lookup(encoding)
        except LookupError:
            logger.debug(f"Ignoring unknown page encoding {encoding}")
            continue
        return body.decode(encoding, errors="replace")
    return body.decode("utf-8", errors="replace")
