from .helpers import config_hash, iter_jsonl, prompt_hash, utc_now, validate_query, write_jsonl
from .http import RetryPolicy, error_message, request_with_retry

__all__ = [
    "config_hash", "iter_jsonl", "prompt_hash", "utc_now", "validate_query", "write_jsonl",
    "RetryPolicy", "error_message", "request_with_retry",
]
