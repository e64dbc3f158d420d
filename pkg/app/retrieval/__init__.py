from .bm25 import CorpusStats, bm25_score, bm25_tokenize, chunk_words
from .html_text import PageFetcher, decode_html, html_to_text
from .retriever import HostThrottle, PageSource, Retriever, SearchBackend, reader_context
from .search_client import SearchClient

__all__ = [
    "CorpusStats", "bm25_score", "bm25_tokenize", "chunk_words",
    "PageFetcher", "decode_html", "html_to_text",
    "HostThrottle", "PageSource", "Retriever", "SearchBackend", "reader_context",
    "SearchClient",
]
