"""Widen minimum-span mentions to the NP/VP constituent around their head.

Parses come from an external parser as Penn-style bracketed trees, one per
sentence.  A mention is widened to the outermost constituent with a target
tag that contains its head token.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .model import Corpus, Mention

NOMINAL_TAGS = frozenset({"NP", "NML", "NX"})
VERBAL_TAGS = frozenset({"VP"})
PARSE_SUFFIXES = (".trees", ".mrg", ".txt", ".parse", "")

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


class TreeParseError(ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"offset {offset}: {message}")


class AlignmentError(ValueError):
    """Tree leaves and sentence tokens (or a head index) do not line up."""


class MissingParseError(ValueError):
    def __init__(self, document_ids):
        self.document_ids = sorted(document_ids)
        super().__init__("no parse for documents: " + ", ".join(self.document_ids))


@dataclass(frozen=True)
class ParseTree:
    """A constituent; leaves have ``word`` set and no children."""

    label: str
    start: int
    end: int
    children: tuple["ParseTree", ...] = ()
    word: Optional[str] = None

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    @property
    def is_leaf(self) -> bool:
        return self.word is not None

    @property
    def base_label(self) -> str:
        """Label with function tags and indices stripped (``NP-SBJ-1`` -> ``NP``)."""
        if self.label.startswith("-"):
            return self.label
        return re.split(r"[-=]", self.label, maxsplit=1)[0]

    def leaves(self) -> list["ParseTree"]:
        if self.is_leaf:
            return [self]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out

    def __len__(self):
        return self.end - self.start

    def path_to(self, index: int) -> list["ParseTree"]:
        """Nodes from this one down to the leaf at token ``index``."""
        if not self.start <= index < self.end:
            raise AlignmentError(f"token {index} outside tree leaves [{self.start}, {self.end})")
        path = [self]
        node = self
        while not node.is_leaf:
            node = next(c for c in node.children if c.start <= index < c.end)
            path.append(node)
        return path


def parse_bracketed(text: str, tokens: Optional[Sequence] = None) -> ParseTree:
    """Parse one bracketed tree such as ``(S (NP (DT the) (NN president)) (VP (VBD spoke)))``.

    Bare words may appear directly under a phrase, e.g. ``(NP a caravan)``.
    When ``tokens`` is given the number of leaves must equal its length.
    """
    toks = [(m.group(), m.start()) for m in _TOKEN.finditer(text)]
    if not toks:
        raise TreeParseError("empty tree", 0)
    pos = 0
    counter = [0]

    def node():
        nonlocal pos
        tok, off = toks[pos]
        if tok == ")":
            raise TreeParseError("unexpected ')'", off)
        if tok != "(":
            pos += 1
            i = counter[0]
            counter[0] += 1
            return ParseTree("", i, i + 1, (), tok)
        pos += 1
        label = ""
        if pos < len(toks) and toks[pos][0] not in ("(", ")"):
            # "(DT the)": a single word after the label makes a preterminal
            label = toks[pos][0]
            pos += 1
        children = []
        while True:
            if pos >= len(toks):
                raise TreeParseError("missing ')'", len(text))
            if toks[pos][0] == ")":
                pos += 1
                break
            children.append(node())
        if not children:
            if not label:
                raise TreeParseError("empty constituent", off)
            # "(word)" with no tag
            i = counter[0]
            counter[0] += 1
            return ParseTree("", i, i + 1, (), label)
        return ParseTree(label, children[0].start, children[-1].end, tuple(children))

    tree = node()
    if pos != len(toks):
        raise TreeParseError(f"unexpected {toks[pos][0]!r} after complete tree", toks[pos][1])
    # PTB files wrap trees in an unlabeled root: "( (S ...) )"
    if tree.label == "" and not tree.is_leaf and len(tree.children) == 1:
        tree = tree.children[0]
    if tokens is not None and tree.end != len(tokens):
        raise AlignmentError(f"tree has {tree.end} leaves but sentence has {len(tokens)} tokens")
    return tree


def preterminal_tag(tree: ParseTree, index: int) -> Optional[str]:
    """Tag directly above the leaf at ``index``, if that node covers only the leaf."""
    path = tree.path_to(index)
    if len(path) >= 2 and len(path[-2]) == 1 and path[-2].label:
        return path[-2].base_label
    return None


def _targets_for(pos: Optional[str]):
    if pos:
        p = pos.upper()
        if p.startswith("V"):
            return (VERBAL_TAGS,)
        if p.startswith(("N", "PRP", "PROPN", "PRON", "CD", "DT", "W")):
            return (NOMINAL_TAGS,)
    return (NOMINAL_TAGS, VERBAL_TAGS)


def find_expansion(tree: ParseTree, head_index: int, targets=None,
                   head_pos: Optional[str] = None, mode: str = "outermost"):
    """Span of the constituent a head expands to, or ``None``.

    ``targets`` is a set of tags; by default it is chosen from the head POS
    (nominal tags for nouns, VP for verbs, nominal then verbal if unknown).
    ``mode="outermost"`` takes the highest matching ancestor in the sentence;
    ``mode="projection"`` only climbs through an unbroken run of matching
    ancestors starting at the lowest one.
    """
    if mode not in ("outermost", "projection"):
        raise ValueError(f"unknown mode {mode!r}")
    path = tree.path_to(head_index)[:-1]  # drop the leaf
    if head_pos is None:
        head_pos = preterminal_tag(tree, head_index)
    candidates = (frozenset(targets),) if targets is not None else _targets_for(head_pos)
    for tags in candidates:
        hits = [i for i, n in enumerate(path) if n.base_label in tags]
        if not hits:
            continue
        if mode == "outermost":
            return path[hits[0]].span
        i = hits[-1]
        while i > 0 and path[i - 1].base_label in tags:
            i -= 1
        return path[i].span
    return None


def expand_mention(mention: Mention, tree: ParseTree, targets=None,
                   head_pos: Optional[str] = None, mode: str = "outermost") -> Mention:
    """Mention widened to its head's maximal target constituent.

    Head, chain and kind are kept.  A mention without a target constituent
    above its head is returned unchanged.
    """
    if not tree.start <= mention.head_index < tree.end:
        raise AlignmentError(
            f"mention {mention.mention_id}: head {mention.head_index} outside tree "
            f"leaves [{tree.start}, {tree.end})")
    span = find_expansion(tree, mention.head_index, targets, head_pos, mode)
    if span is None or span == mention.span:
        return mention
    return replace(mention, start=span[0], end=span[1])


@dataclass(frozen=True)
class ExpansionRecord:
    mention_id: str
    document_id: str
    sentence_index: int
    old_span: tuple[int, int]
    new_span: tuple[int, int]
    status: str  # expanded | unchanged | no_target | collision

    @property
    def changed(self) -> bool:
        return self.old_span != self.new_span


@dataclass
class ExpansionLog:
    records: list[ExpansionRecord] = field(default_factory=list)

    @property
    def changed(self) -> list[ExpansionRecord]:
        return [r for r in self.records if r.changed]

    def counts(self) -> dict[str, int]:
        out = {}
        for r in self.records:
            out[r.status] = out.get(r.status, 0) + 1
        return dict(sorted(out.items()))

    def to_rows(self) -> list[dict]:
        return [{"mention_id": r.mention_id, "document_id": r.document_id,
                 "sentence": r.sentence_index, "old_start": r.old_span[0],
                 "old_end": r.old_span[1], "new_start": r.new_span[0],
                 "new_end": r.new_span[1], "status": r.status} for r in self.records]


def expand_corpus(corpus: Corpus, parses: Mapping[str, Sequence[ParseTree]],
                  targets=None, mode: str = "outermost"):
    """Expand every mention; returns ``(expanded_corpus, log)``.

    ``parses`` maps document id to one tree per sentence.  Chains are not
    touched.  A mention whose widened span would coincide with another
    mention of the same chain keeps its original span (status ``collision``).
    """
    with_mentions = {m.document_id for m in corpus.mentions}
    missing = [d for d in with_mentions if d not in parses]
    if missing:
        raise MissingParseError(missing)
    for did in sorted(with_mentions):
        doc = corpus.document(did)
        trees = parses[did]
        if len(trees) != len(doc.sentences):
            raise AlignmentError(
                f"document {did}: {len(trees)} trees for {len(doc.sentences)} sentences")
        for si, (tree, sent) in enumerate(zip(trees, doc.sentences)):
            if tree.end != len(sent):
                raise AlignmentError(
                    f"document {did} sentence {si}: tree has {tree.end} leaves, "
                    f"sentence has {len(sent)} tokens")

    occupied = {(m.document_id, m.sentence_index, m.start, m.end, m.chain_id)
                for m in corpus.mentions}
    log = ExpansionLog()
    new_mentions = {}
    doc_rank = {d.document_id: i for i, d in enumerate(corpus.documents)}
    ordered = sorted(corpus.mentions, key=lambda m: (doc_rank[m.document_id], m.sentence_index,
                                                     m.start, m.end, m.mention_id))
    for m in ordered:
        tree = parses[m.document_id][m.sentence_index]
        tok = corpus.document(m.document_id).sentences[m.sentence_index][m.head_index]
        new = expand_mention(m, tree, targets, tok.pos, mode)
        if new is m:
            found = find_expansion(tree, m.head_index, targets, tok.pos, mode)
            status = "no_target" if found is None else "unchanged"
        else:
            key = (new.document_id, new.sentence_index, new.start, new.end, new.chain_id)
            if key in occupied:
                new, status = m, "collision"
            else:
                occupied.discard((m.document_id, m.sentence_index, m.start, m.end, m.chain_id))
                occupied.add(key)
                status = "expanded"
        new_mentions[m.mention_id] = new
        log.records.append(ExpansionRecord(m.mention_id, m.document_id, m.sentence_index,
                                           m.span, new.span, status))
    mentions = tuple(new_mentions[m.mention_id] for m in corpus.mentions)
    return corpus.replace(mentions=mentions), log


def read_parse_file(path, sentences: Optional[Sequence] = None) -> list[ParseTree]:
    """One bracketed tree per non-blank line."""
    trees = []
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip()]
    if sentences is not None and len(lines) != len(sentences):
        raise AlignmentError(f"{path}: {len(lines)} trees for {len(sentences)} sentences")
    for i, line in enumerate(lines):
        try:
            trees.append(parse_bracketed(line, None if sentences is None else sentences[i]))
        except TreeParseError as exc:
            raise TreeParseError(f"{path} line {i + 1}: {exc}", exc.offset) from None
        except AlignmentError as exc:
            raise AlignmentError(f"{path} line {i + 1}: {exc}") from None
    return trees


def parse_file_for(directory, document_id: str) -> Optional[Path]:
    directory = Path(directory)
    for suffix in PARSE_SUFFIXES:
        p = directory / f"{document_id}{suffix}"
        if p.is_file():
            return p
    return None


def load_parses(directory, corpus: Corpus) -> dict[str, list[ParseTree]]:
    """Read sidecar parse files (``<document_id>.trees`` etc.) for every document that has one."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"parse directory {directory} does not exist")
    parses = {}
    for doc in corpus.documents:
        p = parse_file_for(directory, doc.document_id)
        if p is not None:
            parses[doc.document_id] = read_parse_file(p, doc.sentences)
    return parses
