import logging
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI

from .config import settings
from .mock.reader import MockReader
from .mock.search import MockPageSource, MockSearchEngine
from .mock.services import MockServices, load_services
from .router import chat_router, pages_router, search_router

logger = logging.getLogger(__name__)


def create_app(
    search_engine: Optional[MockSearchEngine] = None,
    reader: Optional[MockReader] = None,
    page_source: Optional[MockPageSource] = None,
    services: Optional[MockServices] = None,
) -> FastAPI:
    """Mock search and chat services; with no backends given they load from settings at startup"""
    preset = services or (
        MockServices(search_engine=search_engine, reader=reader, page_source=page_source)
        if search_engine or reader or page_source
        else None
    )
    if preset is not None and preset.page_source is None and preset.search_engine is not None:
        preset.page_source = MockPageSource(preset.search_engine.index)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        # Startup
        if preset is None:
            app.state.services = load_services()
        yield
        # Shutdown
        logger.info("Mock services stopped")

    app = FastAPI(
        title=settings.API_TITLE,
        description=settings.API_DESCRIPTION,
        version=settings.API_VERSION,
        lifespan=lifespan,
    )
    app.state.services = preset or MockServices()

    # Include routers
    app.include_router(search_router)
    app.include_router(chat_router)
    app.include_router(pages_router)

    @app.get("/")
    async def root():
        """Root endpoint with API information"""
        return {
            "message": settings.API_TITLE,
            "version": settings.API_VERSION,
            "endpoints": {
                "GET /search": "Search the mock index",
                "POST /v1/chat/completions": "Chat completion from the mock reader",
                "GET /pages": "HTML of an indexed page",
            },
        }

    @app.get("/health")
    async def health_check():
        """Health check endpoint"""
        state = app.state.services
        return {
            "status": "healthy",
            "search": state.search_engine is not None,
            "reader": state.reader is not None,
        }

    return app


app = create_app()

if __name__ == "__main__":
    import uvicorn

    logging.basicConfig(level=settings.LOG_LEVEL)
    uvicorn.run(
        "app.main:app",
        host=settings.API_HOST,
        port=settings.API_PORT,
        reload=settings.DEBUG,
    )
