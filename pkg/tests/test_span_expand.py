import pytest
from hypothesis import given, settings, strategies as st

from corefdiv.diversity import head_groups
from corefdiv.model import Chain, Corpus, Document, Mention, Token, mention_surface
from corefdiv.samples import parse_dir
from corefdiv.span_expand import (
    AlignmentError,
    MissingParseError,
    TreeParseError,
    expand_corpus,
    expand_mention,
    find_expansion,
    load_parses,
    parse_bracketed,
)

CARAVAN = "(NP (NP a caravan) (PP of (NP hundreds (PP of (NP migrants)))))"


def test_parse_simple():
    t = parse_bracketed("(S (NP (DT the) (NN president)) (VP (VBD spoke)))")
    np_, vp = t.children
    assert (t.label, np_.label, np_.span, vp.label, vp.span) == ("S", "NP", (0, 2), "VP", (2, 3))
    assert [leaf.word for leaf in t.leaves()] == ["the", "president", "spoke"]


def test_parse_unbalanced():
    text = "((NP (NN a))"
    with pytest.raises(TreeParseError) as exc:
        parse_bracketed(text)
    assert exc.value.offset == len(text)


def test_parse_extra_close():
    with pytest.raises(TreeParseError) as exc:
        parse_bracketed("(NP (NN a)))")
    assert exc.value.offset == 11


def test_leaf_count_mismatch():
    with pytest.raises(AlignmentError):
        parse_bracketed("(S (NP (DT the) (NN dog)) (VP (VBD ran)))", ["the", "dog", "ran", "."])


def test_ptb_wrapper_and_function_tags():
    t = parse_bracketed("( (S (NP-SBJ (NNP Trump)) (VP (VBD left))) )")
    assert t.label == "S"
    assert t.children[0].base_label == "NP"


def _mention(start, end, head, sent=0, mid="m", chain="c"):
    return Mention(mid, "d", sent, start, end, head, chain, "entity")


def test_expand_small_np():
    t = parse_bracketed("(S (NP (DT the) (NN president)) (VP (VBD spoke)))")
    m = expand_mention(_mention(1, 2, 1), t)
    assert m.span == (0, 2)
    assert m.head_index == 1


def test_expand_caravan():
    t = parse_bracketed(CARAVAN)
    words = [leaf.word for leaf in t.leaves()]
    m = expand_mention(_mention(1, 2, 1), t)
    assert " ".join(words[m.start:m.end]) == "a caravan of hundreds of migrants"


def test_projection_mode_stops_at_pp():
    t = parse_bracketed(CARAVAN)
    # "migrants" sits under PP; outermost mode climbs past it, projection does not
    assert find_expansion(t, 5, mode="outermost") == (0, 6)
    assert find_expansion(t, 5, mode="projection") == (5, 6)
    assert find_expansion(t, 1, mode="projection") == (0, 6)


def test_no_target_unchanged():
    t = parse_bracketed("(FRAG (INTJ (UH oh)) (INTJ (UH wow)))")
    m = _mention(1, 2, 1)
    assert expand_mention(m, t) is m


def test_head_outside_tree():
    t = parse_bracketed("(NP (NN a))")
    with pytest.raises(AlignmentError):
        expand_mention(_mention(3, 4, 3), t)


def test_verbal_head_uses_vp():
    t = parse_bracketed("(S (NP (NNP Trump)) (VP (VBD signed) (NP (DT the) (NN bill))))")
    assert find_expansion(t, 1) == (1, 4)


def _corpus(words, trees, mentions):
    sents = tuple(tuple(Token(si, i, w, w.lower()) for i, w in enumerate(ws)) for si, ws in enumerate(words))
    doc = Document("d", "t", "t", sents)
    chains = {}
    for m in mentions:
        chains.setdefault(m.chain_id, []).append(m.mention_id)
    c = Corpus("x", (doc,), tuple(Chain(k, tuple(v)) for k, v in chains.items()), tuple(mentions))
    return c, {"d": [parse_bracketed(t) for t in trees]}


def test_expand_corpus_trump():
    c, parses = _corpus([["President", "Donald", "Trump"]],
                        ["(NP (NNP President) (NNP Donald) (NNP Trump))"], [_mention(2, 3, 2)])
    out, log = expand_corpus(c, parses)
    assert out.mentions[0].span == (0, 3)
    assert mention_surface(out.mentions[0], out) == "President Donald Trump"
    assert [r.status for r in log.records] == ["expanded"]


def test_fixed_point_when_maximal(news):
    out, log = expand_corpus(news, load_parses(parse_dir(), news))
    assert log.changed == []
    assert out == news


def test_nested_mentions_expand_independently():
    tree = ("(S (NP (NP (NNP Trump) (POS 's)) (NN lawyer)) (VP (VBD spoke)))")
    words = ["Trump", "'s", "lawyer", "spoke"]
    ms = [_mention(0, 1, 0, mid="a", chain="c1"), _mention(2, 3, 2, mid="b", chain="c2")]
    c, parses = _corpus([words], [tree], ms)
    out, _ = expand_corpus(c, parses)
    # both heads sit inside the outer NP, so both widen to it; overlap is allowed
    assert [m.span for m in out.mentions] == [(0, 3), (0, 3)]
    assert [m.head_index for m in out.mentions] == [0, 2]


def test_collision_keeps_original_span():
    words = ["President", "Donald", "Trump"]
    ms = [_mention(0, 1, 0, mid="a"), _mention(2, 3, 2, mid="b")]
    c, parses = _corpus([words], ["(NP (NNP President) (NNP Donald) (NNP Trump))"], ms)
    out, log = expand_corpus(c, parses)
    assert [r.status for r in log.records] == ["expanded", "collision"]
    assert len({m.span for m in out.mentions}) == 2


def test_missing_parse():
    c, _ = _corpus([["a"]], ["(NP (DT a))"], [_mention(0, 1, 0)])
    with pytest.raises(MissingParseError, match="d"):
        expand_corpus(c, {})


def test_sentence_count_mismatch():
    c, parses = _corpus([["a"], ["b"]], ["(NP (DT a))"], [_mention(0, 1, 0)])
    with pytest.raises(AlignmentError):
        expand_corpus(c, parses)


def test_minspan_sample_expands_to_news(news, news_min):
    out, log = expand_corpus(news_min, load_parses(parse_dir(), news_min))
    assert out.mentions == news.mentions
    assert len(log.changed) == 12
    # expansion never lowers the number of distinct phrases per head
    for before, after in zip(news_min.chains, out.chains):
        b = {g.head: len(g.unique_phrases) for g in head_groups(before, news_min)}
        a = {g.head: len(g.unique_phrases) for g in head_groups(after, out)}
        assert all(a[h] >= b[h] for h in b)
    again, log2 = expand_corpus(out, load_parses(parse_dir(), out))
    assert again == out and log2.changed == []
    assert [c.mention_ids for c in out.chains] == [c.mention_ids for c in news_min.chains]


# random binary-ish trees over n leaves
@st.composite
def trees(draw, lo=0, hi=None, depth=0):
    if hi is None:
        hi = draw(st.integers(1, 8))
    n = hi - lo
    label = draw(st.sampled_from(["NP", "VP", "PP", "S", "NML"]))
    if n == 1 or depth > 4:
        words = " ".join(f"(NN w{i})" for i in range(lo, hi))
        return f"({label} {words})"
    cut = draw(st.integers(lo + 1, hi - 1))
    return f"({label} {draw(trees(lo, cut, depth + 1))} {draw(trees(cut, hi, depth + 1))})"


@settings(max_examples=200, deadline=None)
@given(trees(), st.data())
def test_expansion_invariants(text, data):
    t = parse_bracketed(text)
    head = data.draw(st.integers(0, t.end - 1))
    m = _mention(head, head + 1, head)
    new = expand_mention(m, t)
    assert new.start <= head < new.end
    assert new.head_index == head
    assert expand_mention(new, t) == new
    assert new.start <= m.start and m.end <= new.end
