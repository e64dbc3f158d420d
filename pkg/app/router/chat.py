from typing import Optional

from fastapi import APIRouter, Depends, Header, HTTPException

from ..errors import ScriptMissError
from ..mock.services import MockServices, get_services
from ..models import ChatRequest, ChatResponse
from .search import check_failure_and_key

router = APIRouter(prefix="/v1", tags=["chat"])


@router.post("/chat/completions", response_model=ChatResponse)
async def chat_completions(
    request: ChatRequest,
    authorization: Optional[str] = Header(None),
    services: MockServices = Depends(get_services),
):
    """Answer a single-turn chat request with the mock reader"""
    expected = f"Bearer {services.llm_api_key}" if services.llm_api_key else ""
    check_failure_and_key(services, authorization, expected)
    if services.reader is None:
        raise HTTPException(status_code=503, detail={"message": "no mock reader loaded"})
    try:
        completion = services.reader.complete(request)
    except ScriptMissError as e:
        raise HTTPException(status_code=404, detail={"message": str(e)})
    return ChatResponse.from_text(completion)
