from .reader import MockReader, golds_by_question, load_reader_rule, split_prompt
from .search import MockPageSource, MockSearchEngine, load_mock_index
from .services import MockServices, get_services, load_services

__all__ = [
    "MockPageSource",
    "MockReader",
    "MockSearchEngine",
    "MockServices",
    "get_services",
    "golds_by_question",
    "load_mock_index",
    "load_reader_rule",
    "load_services",
    "split_prompt",
]
