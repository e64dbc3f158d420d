from .client import ChatBackend, ChatClient, RateLimiter
from .prompts import (
    SENTINEL,
    Demonstrations,
    build_reader_prompt,
    build_rewriter_prompt,
    parse_answer,
    parse_queries,
)

__all__ = [
    "ChatBackend", "ChatClient", "RateLimiter",
    "SENTINEL", "Demonstrations", "build_reader_prompt", "build_rewriter_prompt", "parse_answer", "parse_queries",
]
