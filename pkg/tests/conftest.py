import pytest

from corefdiv.model import Chain, Corpus, Document, Mention, Token
from corefdiv.samples import load_sample

ACCEPTANCE_LINES = []


def build_corpus(layout, name="test", topic_of=None):
    """Corpus from ``{chain_id: [(doc, phrase, head_offset, head_lemma), ...]}``.

    Every mention gets its own sentence holding exactly the phrase, so the
    mention span covers the whole sentence.
    """
    sentences = {}
    chains, mentions = [], []
    for cid, items in layout.items():
        mids = []
        for i, (doc, phrase, head, lemma) in enumerate(items):
            words = phrase.split()
            toks = tuple(Token(0, j, w, lemma if j == head else w.lower()) for j, w in enumerate(words))
            sents = sentences.setdefault(doc, [])
            si = len(sents)
            sents.append(tuple(Token(si, t.index_in_sentence, t.surface, t.lemma) for t in toks))
            mid = f"{cid}_{i}"
            mentions.append(Mention(mid, doc, si, 0, len(words), head, cid, "entity"))
            mids.append(mid)
        chains.append(Chain(cid, tuple(mids)))
    topic_of = topic_of or (lambda d: "t")
    docs = tuple(Document(d, topic_of(d), topic_of(d), tuple(s)) for d, s in sorted(sentences.items()))
    return Corpus(name, docs, tuple(chains), tuple(mentions))


@pytest.fixture
def news():
    return load_sample("news")


@pytest.fixture
def news_min():
    return load_sample("news_minspan")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
