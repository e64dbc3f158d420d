from typing import List, Literal, Optional

from pydantic import BaseModel, Field


class ChatMessage(BaseModel):
    role: Literal["system", "user", "assistant"] = "user"
    content: str


class ChatRequest(BaseModel):
    model: str = Field(..., min_length=1)
    messages: List[ChatMessage] = Field(..., min_length=1)
    temperature: float = Field(default=0.0, ge=0)
    max_tokens: int = Field(default=256, gt=0)
    seed: Optional[int] = Field(default=None, description="Sampling seed for providers that honour one")

    @classmethod
    def single_turn(
        cls, prompt: str, model: str, temperature: float = 0.0, max_tokens: int = 256, seed: Optional[int] = None
    ):
        return cls(
            model=model,
            messages=[ChatMessage(role="user", content=prompt)],
            temperature=temperature,
            max_tokens=max_tokens,
            seed=seed,
        )

    @property
    def prompt(self) -> str:
        return self.messages[0].content


class ChatChoice(BaseModel):
    index: int = 0
    message: ChatMessage


class ChatResponse(BaseModel):
    choices: List[ChatChoice] = Field(..., min_length=1)

    @classmethod
    def from_text(cls, text: str):
        return cls(choices=[ChatChoice(message=ChatMessage(role="assistant", content=text))])
