from pathlib import Path
from typing import Optional


class RRRError(Exception):
    """Base class for every error raised by the toolkit"""


class DatasetError(RRRError):
    def __init__(self, path, line: Optional[int], message: str):
        self.path = Path(path)
        self.line = line
        location = f"{self.path}:{line}" if line is not None else str(self.path)
        super().__init__(f"{location}: {message}")


class ArtifactIOError(RRRError):
    def __init__(self, path, message: str):
        self.path = Path(path)
        super().__init__(f"{self.path}: {message}")


class MissingArtifactError(RRRError):
    def __init__(self, path, what: str = "artifact"):
        self.path = Path(path)
        super().__init__(f"missing {what}: {self.path}")


class SearchError(RRRError):
    pass


class FetchError(RRRError):
    def __init__(self, url: str, message: str):
        self.url = url
        super().__init__(f"{url}: {message}")


class LLMError(RRRError):
    pass


class LLMAuthError(LLMError):
    pass


class RateLimitError(LLMError):
    pass


class ResponseFormatError(RRRError):
    pass


class ScriptMissError(RRRError):
    def __init__(self, prompt_hash: str):
        self.prompt_hash = prompt_hash
        super().__init__(f"no scripted completion for prompt {prompt_hash}")


class RewardError(RRRError):
    pass


class PolicyDivergenceError(RRRError):
    pass


class RunAborted(RRRError):
    def __init__(self, message: str, partial_report=None):
        self.partial_report = partial_report
        super().__init__(message)
