from .chat import router as chat_router
from .pages import router as pages_router
from .search import router as search_router

__all__ = ["chat_router", "pages_router", "search_router"]
