from typing import Optional

from fastapi import APIRouter, Depends, Header, HTTPException, Query

from ..config import settings
from ..mock.services import MockServices, get_services

router = APIRouter(tags=["search"])


def check_failure_and_key(services: MockServices, supplied: Optional[str], expected: str) -> None:
    status = services.next_failure()
    if status is not None:
        raise HTTPException(status_code=status, detail={"message": f"injected failure {status}"})
    if expected and supplied != expected:
        raise HTTPException(status_code=401, detail={"message": "invalid API key"})


@router.get("/search")
async def search(
    q: str = Query(..., description="Search query"),
    count: int = Query(5, ge=1, le=50, description="Maximum number of results"),
    api_key: Optional[str] = Header(None, alias=settings.SEARCH_API_KEY_HEADER),
    services: MockServices = Depends(get_services),
):
    """Search the mock index"""
    check_failure_and_key(services, api_key, services.search_api_key)
    if services.search_engine is None:
        raise HTTPException(status_code=503, detail={"message": "no mock index loaded"})
    if not q.strip():
        raise HTTPException(status_code=400, detail={"message": "query must not be empty"})
    hits = services.search_engine.search(q, count)
    return {"results": [hit.model_dump() for hit in hits]}
