import pytest
from hypothesis import given, settings, strategies as st

from corefdiv.baseline import LEVELS, lemma_baseline, score_baseline, score_clustering
from corefdiv.model import Chain, Corpus, Document, Mention, Token, head_lemma

from conftest import build_corpus


def _topic(d):
    return d.split("-")[0]


def test_same_head_same_cluster():
    c = build_corpus({"t": [("A-1", "Donald Trump", 1, "trump"), ("A-2", "Mr. Trump", 1, "trump")]},
                     topic_of=_topic)
    assert len(lemma_baseline(c, "subtopic").clusters) == 1


def test_units_separate():
    c = build_corpus({"t": [("A-1", "Trump", 0, "trump"), ("B-1", "Trump", 0, "trump")]},
                     topic_of=_topic)
    assert len(lemma_baseline(c, "subtopic").clusters) == 2
    assert len(lemma_baseline(c, "corpus").clusters) == 1


def test_news_chain2_at_corpus_level(news):
    res = lemma_baseline(news, "corpus")
    chain2 = set(news.chains[1].mention_ids)
    groups = [set(cl) for cl in res.clusters if set(cl) & chain2]
    heads = [{head_lemma(news.mention(m), news) for m in g} for g in groups]
    assert sorted(map(sorted, heads)) == [["caravan"], ["immigrant"]]
    assert all(g <= chain2 for g in groups)


def test_unknown_level(news):
    with pytest.raises(ValueError):
        lemma_baseline(news, "paragraph")


def test_perfect_prediction_scores_one():
    c = build_corpus({"a": [("d", "x", 0, "x"), ("d", "x", 0, "x")],
                      "b": [("d", "y", 0, "y"), ("d", "the y", 1, "y")]})
    c = c.replace(chains=c.chains)
    # heads differ across chains and agree within them
    assert score_baseline(c, "document").conll_f1 == pytest.approx(1.0)


def test_split_by_kind():
    toks = (Token(0, 0, "attack", "attack"),)
    doc = Document("d", "t", "t", (toks, toks))
    ms = (Mention("m1", "d", 0, 0, 1, 0, "c1", "event"), Mention("m2", "d", 1, 0, 1, 0, "c2", "entity"))
    c = Corpus("k", (doc,), (Chain("c1", ("m1",)), Chain("c2", ("m2",))), ms)
    assert len(lemma_baseline(c, "corpus").clusters) == 1
    assert len(lemma_baseline(c, "corpus", split_by_kind=True).clusters) == 2


def test_deterministic(news):
    assert lemma_baseline(news) == lemma_baseline(news)


def test_macro_vs_micro(news):
    micro = score_baseline(news, "subtopic", aggregation="micro")
    macro = score_baseline(news, "subtopic", aggregation="macro")
    assert 0 < micro.conll_f1 <= 1 and 0 < macro.conll_f1 <= 1
    with pytest.raises(ValueError):
        score_baseline(news, aggregation="median")


def test_relabeling_does_not_change_score(news):
    res = lemma_baseline(news, "topic")
    relabeled = type(res)(tuple(reversed(res.clusters)), res.level)
    assert score_clustering(news, res).to_dict() == score_clustering(news, relabeled).to_dict()


def _refines(fine, coarse):
    owner = {m: i for i, c in enumerate(coarse.clusters) for m in c}
    return all(len({owner[m] for m in c}) == 1 for c in fine.clusters)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["A-1", "A-2", "B-1", "C-1"]),
                          st.sampled_from(["trump", "caravan", "migrant"]),
                          st.sampled_from(["c1", "c2", "c3"])), min_size=1, max_size=15))
def test_refinement(items):
    layout = {}
    for doc, head, chain in items:
        layout.setdefault(chain, []).append((doc, head, 0, head))
    c = build_corpus(layout, topic_of=_topic)
    results = [lemma_baseline(c, lv) for lv in LEVELS]
    for fine, coarse in zip(results, results[1:]):
        assert _refines(fine, coarse)
    covered = sorted(m for cl in results[0].clusters for m in cl)
    assert covered == sorted(m.mention_id for m in c.mentions)
