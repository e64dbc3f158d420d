import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, Tuple

from pydantic import BaseModel


def prompt_hash(prompt: str) -> str:
    """Stable key for a rendered prompt"""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def config_hash(*configs: BaseModel) -> str:
    """Hash of the configuration values behind a run"""
    payload = [config.model_dump(mode="json") for config in configs]
    encoded = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(encoded).hexdigest()[:16]


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def validate_query(query: str) -> str:
    """Reject blank search queries before any network call"""
    if not query or not query.strip():
        raise ValueError("search query must not be empty")
    return query.strip()


def iter_jsonl(path: Path) -> Iterator[Tuple[int, str]]:
    """Yield (line number, raw line) for every non-blank line"""
    with open(path, "r", encoding="utf-8") as handle:
        for line_num, line in enumerate(handle, 1):
            if line.strip():
                yield line_num, line


def write_jsonl(path: Path, lines: Iterable[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line + "\n")
