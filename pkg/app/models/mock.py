from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class MockPage(BaseModel):
    url: str = Field(..., min_length=1)
    title: str = ""
    body: str = ""
    html: Optional[str] = Field(None, description="Raw page HTML; rendered from title/body when absent")

    def render_html(self) -> str:
        if self.html is not None:
            return self.html
        return (
            f"<html><head><title>{self.title}</title>"
            "<style>body { font-family: serif; }</style></head>"
            f"<body><h1>{self.title}</h1><p>{self.body}</p>"
            "<script>window.mock = true;</script></body></html>"
        )


class MockIndex(BaseModel):
    pages: List[MockPage] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique_urls(self):
        urls = [page.url for page in self.pages]
        if len(urls) != len(set(urls)):
            raise ValueError("mock index urls must be unique")
        return self


class ReaderBehavior(str, Enum):
    EXTRACTIVE = "extractive"
    SCRIPTED = "scripted"
    KEYWORD_REWARD = "keyword_reward"


class MockReaderRule(BaseModel):
    behavior: ReaderBehavior = ReaderBehavior.EXTRACTIVE
    golds: Dict[str, List[str]] = Field(default_factory=dict, description="Question text to gold answers")
    scripts: Dict[str, str] = Field(default_factory=dict, description="Prompt sha256 to completion")
    by_question: Dict[str, str] = Field(default_factory=dict, description="Question text to completion")
    keyword: str = ""
    strict: bool = False
    default: str = "unknown**"
