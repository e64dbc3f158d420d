import json

import pytest

from app.errors import ArtifactIOError, FetchError, MissingArtifactError, ScriptMissError
from app.llm import build_reader_prompt, build_rewriter_prompt
from app.mock import MockReader, MockSearchEngine, load_mock_index, load_reader_rule, split_prompt
from app.mock.reader import PROMPT_HISTORY
from app.models import ChatRequest, Document, MockIndex, MockPage, MockReaderRule, ReaderBehavior
from app.utils import prompt_hash


def test_search_ranks_by_term_overlap(search_engine):
    hits = search_engine.search("largest planet Jupiter", 3)
    assert hits[0].url == "https://mock.example/planets"
    assert "Jupiter" in hits[0].snippet


def test_search_breaks_ties_by_url():
    index = MockIndex(
        pages=[
            MockPage(url="https://b.example", body="shared word"),
            MockPage(url="https://a.example", body="shared term"),
        ]
    )
    assert [h.url for h in MockSearchEngine(index).search("shared", 5)] == ["https://a.example", "https://b.example"]


def test_search_without_overlap_returns_nothing(search_engine):
    assert search_engine.search("zzz qqq", 5) == []


def test_search_respects_top_k(search_engine):
    assert len(search_engine.search("is the", 2)) == 2


def test_search_logs_queries(search_engine):
    search_engine.search("  paris ", 1)
    search_engine.search("hamlet", 1)
    assert search_engine.query_log == ["paris", "hamlet"]
    with pytest.raises(ValueError):
        search_engine.search(" ", 1)
    assert len(search_engine.query_log) == 2


def test_snippet_window_centres_on_first_match():
    words = " ".join(f"w{i}" for i in range(40))
    engine = MockSearchEngine(MockIndex(pages=[MockPage(url="u", body=words)]), snippet_window=6)
    assert engine.search("w20", 1)[0].snippet == "w17 w18 w19 w20 w21 w22"


def test_page_source_serves_html(page_source):
    html = page_source.html("https://mock.example/hamlet")
    assert html.startswith("<html>")
    assert "Shakespeare" in page_source.fetch_text("https://mock.example/hamlet")
    with pytest.raises(FetchError):
        page_source.html("https://mock.example/absent")


def test_index_loading_errors(tmp_path):
    with pytest.raises(MissingArtifactError):
        load_mock_index(tmp_path / "absent.json")
    duplicate = tmp_path / "dup.json"
    duplicate.write_text(json.dumps({"pages": [{"url": "u"}, {"url": "u"}]}), encoding="utf-8")
    with pytest.raises(ArtifactIOError):
        load_mock_index(duplicate)


def test_reader_rule_loading(fixtures_dir, tmp_path):
    assert load_reader_rule(fixtures_dir / "reader_extractive.json").behavior is ReaderBehavior.EXTRACTIVE
    broken = tmp_path / "rule.json"
    broken.write_text('{"behavior": "telepathic"}', encoding="utf-8")
    with pytest.raises(ArtifactIOError):
        load_reader_rule(broken)


def test_split_prompt_finds_question_and_documents(open_qa_samples):
    prompt = build_reader_prompt(open_qa_samples[0], [Document(id="d", source_url="u", text="Paris is nice.")])
    question, doc = split_prompt(prompt, [s.question for s in open_qa_samples])
    assert question == "What is the capital of France?"
    assert doc == "Paris is nice."
    assert split_prompt("unrelated prompt", [question]) == (None, "")


def test_extractive_reader_answers_from_documents(open_qa_samples, extractive_reader):
    sample = open_qa_samples[1]
    with_docs = build_reader_prompt(sample, [Document(id="d", source_url="u", text="Written by William Shakespeare.")])
    assert extractive_reader.read(with_docs) == "William Shakespeare**"
    assert extractive_reader.read(build_reader_prompt(sample, [])) == "unknown**"
    assert list(extractive_reader.prompts) == [with_docs, build_reader_prompt(sample, [])]


def test_extractive_reader_ignores_gold_in_question_or_demos(open_qa_samples, extractive_reader):
    sample = open_qa_samples[0]
    prompt = build_reader_prompt(sample, [], demos=["Question: capital of France? Answer: Paris**"])
    assert extractive_reader.read(prompt) == "unknown**"


def test_scripted_reader_prefers_prompt_hash(open_qa_samples):
    prompt = build_rewriter_prompt(open_qa_samples[0])
    rule = MockReaderRule(
        behavior=ReaderBehavior.SCRIPTED,
        scripts={prompt_hash(prompt): "by hash**"},
        by_question={open_qa_samples[0].question: "by question**"},
    )
    reader = MockReader(rule)
    assert reader.read(prompt) == "by hash**"
    assert reader.read(build_rewriter_prompt(open_qa_samples[0], demos=["Question: x Answer: y**"])) == "by question**"
    assert reader.read(build_rewriter_prompt(open_qa_samples[1])) == "unknown**"


def test_strict_scripted_reader_raises_on_miss(open_qa_samples):
    reader = MockReader(MockReaderRule(behavior=ReaderBehavior.SCRIPTED, strict=True))
    with pytest.raises(ScriptMissError) as excinfo:
        reader.complete(ChatRequest.single_turn(build_rewriter_prompt(open_qa_samples[0]), model="mock"))
    assert excinfo.value.prompt_hash == prompt_hash(build_rewriter_prompt(open_qa_samples[0]))


def keyword_reader():
    rule = MockReaderRule(
        behavior=ReaderBehavior.KEYWORD_REWARD, keyword="magic", golds={"What is the capital of France?": ["Paris"]}
    )
    return MockReader(rule)


def test_keyword_reader_answers_when_documents_carry_keyword(open_qa_samples):
    reader = keyword_reader()
    sample = open_qa_samples[0]

    def prompt(text, demos=()):
        return build_reader_prompt(sample, [Document(id="d", source_url="u", text=text)], demos=demos)

    assert reader.read(prompt("magic")) == "Paris**"
    assert reader.read(prompt("Its capital is Paris.\nMagic!")) == "Paris**"
    assert reader.read(prompt("magical capital")) == "unknown**"
    assert reader.read(build_reader_prompt(sample, [])) == "unknown**"
    assert reader.read(prompt("capital", demos=["Question: magic? Answer: magic**"])) == "unknown**"


def test_keyword_reader_answers_from_its_own_request(open_qa_samples):
    reader = keyword_reader()
    sample = open_qa_samples[0]
    with_keyword = build_reader_prompt(sample, [Document(id="d", source_url="u", text="magic")])
    without = build_reader_prompt(sample, [Document(id="d", source_url="u", text="capital")])
    # interleaving never carries one request's evidence into another
    answers = [reader.read(p) for p in (with_keyword, without, with_keyword, without, without)]
    assert answers == ["Paris**", "unknown**", "Paris**", "unknown**", "unknown**"]


def test_keyword_reader_needs_single_word_keyword():
    with pytest.raises(ValueError):
        MockReader(MockReaderRule(behavior=ReaderBehavior.KEYWORD_REWARD))
    with pytest.raises(ValueError):
        MockReader(MockReaderRule(behavior=ReaderBehavior.KEYWORD_REWARD, keyword="two words"))


def test_reader_keeps_only_recent_prompts():
    reader = MockReader(MockReaderRule(behavior=ReaderBehavior.SCRIPTED))
    for i in range(PROMPT_HISTORY + 10):
        reader.read(f"prompt {i}")
    assert len(reader.prompts) == PROMPT_HISTORY
    assert reader.prompts[-1] == f"prompt {PROMPT_HISTORY + 9}"
    assert reader.prompts[0] == "prompt 10"
