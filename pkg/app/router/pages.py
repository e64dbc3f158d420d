from fastapi import APIRouter, Depends, HTTPException, Query
from fastapi.responses import HTMLResponse

from ..errors import FetchError
from ..mock.services import MockServices, get_services

router = APIRouter(tags=["pages"])


@router.get("/pages", response_class=HTMLResponse)
async def get_page(
    url: str = Query(..., description="Url of an indexed page"),
    services: MockServices = Depends(get_services),
):
    """Raw HTML of an indexed page"""
    status = services.next_failure()
    if status is not None:
        raise HTTPException(status_code=status, detail={"message": f"injected failure {status}"})
    if services.page_source is None:
        raise HTTPException(status_code=503, detail={"message": "no mock index loaded"})
    try:
        return HTMLResponse(services.page_source.html(url))
    except FetchError:
        raise HTTPException(status_code=404, detail={"message": f"page not found: {url}"})
