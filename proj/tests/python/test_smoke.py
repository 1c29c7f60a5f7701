import os
import warnings
from pathlib import Path

import pytest

import affmem

FIXTURES = Path(os.environ.get("AFFMEM_FIXTURE_DIR", Path(__file__).resolve().parents[1] / "fixtures"))


@pytest.fixture()
def store(tmp_path):
    s = affmem.Store(tmp_path / "store")
    s.ingest(FIXTURES / "fourway")
    s.ingest(FIXTURES / "demo")
    return s


def test_store_listing_and_latest(store):
    ids = [e["session_id"] for e in store.list_sessions()]
    assert ids == ["demo", "fourway"]
    assert store.load_session().id == "demo"


def test_four_sentence_example():
    session = affmem.load_bundle(FIXTURES / "fourway")
    result = affmem.summarize(session, 2, embedder="external")
    assert result.summary_indices == [1, 2]
    assert result.summary_text == "Alpha two. Beta one."
    for s in result.scored:
        assert s.updated_distance == s.centroid_distance * (1.0 - s.engagement)


def test_summary_matches_cli_golden(store):
    golden = (FIXTURES.parent / "golden" / "summarize_latest_n3.txt").read_text()
    result = affmem.summarize(store.load_session("latest"), 3, seed=42)
    assert result.summary_text + "\n" == golden


def test_clamped_n_warns(store):
    session = store.load_session("fourway")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = affmem.summarize(session, 10)
    assert result.n_effective == 4
    assert any(issubclass(w.category, affmem.AffmemWarning) for w in caught)


def test_highlights_and_salience(store):
    session = store.load_session("demo")
    times, values, used = affmem.salience_series(session)
    assert len(times) == len(values) == 121
    assert set(used) >= {"hr", "rr", "engagement", "excitement"}
    peaks = affmem.highlights(session, 3)
    assert [p.t for p in peaks] == [47.0, 70.0, 57.0]
    assert peaks[0].score == max(values)
    assert "robotics lab" in peaks[0].snippet.text


def test_search(store):
    hits = affmem.search("peak(happiness) top 2 in demo", store)
    assert len(hits) == 2 and hits[0].channel == "happiness"
    assert hits[0].score >= hits[1].score
    assert affmem.format_query("PEAK(Neutrality)  top 3") == "peak(neutral) top 3 in latest"


def test_errors(store):
    with pytest.raises(affmem.UnknownChannelError) as info:
        affmem.search("peak(stress)", store)
    assert info.value.channel == "stress"
    with pytest.raises(affmem.QuerySyntaxError) as info:
        affmem.format_query("peak(happiness")
    assert info.value.offset == 14
    assert info.value.expected
    with pytest.raises(affmem.NotFoundError):
        store.load_session("ghost")
    with pytest.raises(affmem.AffmemError):
        affmem.kmeans([[0.0], [1.0]], 3)
    with pytest.raises(ValueError):
        affmem.summarize(store.load_session("demo"), 2, embedder="bert")


def test_embedding_and_kmeans():
    (row,) = affmem.embed_corpus(["hello"])
    assert [i for i, x in enumerate(row) if x] == [11] and row[11] == -1.0
    c = affmem.kmeans([[0, 0], [0, 1], [10, 0], [10, 1]], 2, seed=42)
    assert abs(c.sse - 1.0) < 1e-12
    assert affmem.tokenize("Café, NAÏVE 42!") == ["café", "naïve", "42"]
