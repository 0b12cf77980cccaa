"""In-memory corpus model shared by every other module.

All types are frozen dataclasses.  Construction does not validate; a corpus
coming out of :func:`corefdiv.ingest.load_corpus` has already been checked by
:func:`corefdiv.ingest.validate`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

MENTION_KINDS = ("entity", "event", "other")


class StructuralError(ValueError):
    """A mention or chain references something that does not exist."""


@dataclass(frozen=True)
class Token:
    sentence_index: int
    index_in_sentence: int
    surface: str
    lemma: str
    pos: Optional[str] = None


@dataclass(frozen=True)
class Mention:
    mention_id: str
    document_id: str
    sentence_index: int
    start: int
    end: int
    head_index: int
    chain_id: str
    kind: str = "other"

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Chain:
    chain_id: str
    mention_ids: tuple[str, ...]
    label: Optional[str] = None

    @property
    def size(self) -> int:
        return len(self.mention_ids)

    @property
    def is_singleton(self) -> bool:
        return len(self.mention_ids) == 1


@dataclass(frozen=True)
class Document:
    document_id: str
    topic_id: str
    subtopic_id: str
    sentences: tuple[tuple[Token, ...], ...]


@dataclass(frozen=True)
class NormalizationPolicy:
    """How mention text is compared.

    ``group_by`` picks the head key used for head groups and the lemma
    baseline: ``"lemma"`` (default) or ``"surface"`` for sensitivity runs.
    """

    case_insensitive: bool = True
    whitespace_collapse: bool = True
    group_by: str = "lemma"

    def __post_init__(self):
        if self.group_by not in ("lemma", "surface"):
            raise ValueError(f"group_by must be 'lemma' or 'surface', got {self.group_by!r}")

    def text(self, s: str) -> str:
        if self.whitespace_collapse:
            s = " ".join(s.split())
        if self.case_insensitive:
            s = s.lower()
        return s


DEFAULT_POLICY = NormalizationPolicy()


@dataclass(frozen=True)
class Corpus:
    name: str
    documents: tuple[Document, ...] = ()
    chains: tuple[Chain, ...] = ()
    mentions: tuple[Mention, ...] = ()

    # lookups; lossy on duplicate ids, which validate() reports separately
    @cached_property
    def document_index(self) -> dict[str, Document]:
        return {d.document_id: d for d in self.documents}

    @cached_property
    def mention_index(self) -> dict[str, Mention]:
        return {m.mention_id: m for m in self.mentions}

    @cached_property
    def chain_index(self) -> dict[str, Chain]:
        return {c.chain_id: c for c in self.chains}

    def document(self, document_id: str) -> Document:
        try:
            return self.document_index[document_id]
        except KeyError:
            raise StructuralError(f"unknown document {document_id!r}") from None

    def mention(self, mention_id: str) -> Mention:
        try:
            return self.mention_index[mention_id]
        except KeyError:
            raise StructuralError(f"unknown mention {mention_id!r}") from None

    def chain_mentions(self, chain: Chain) -> list[Mention]:
        return [self.mention(mid) for mid in chain.mention_ids]

    def sentence_of(self, mention: Mention) -> tuple[Token, ...]:
        doc = self.document_index.get(mention.document_id)
        if doc is None:
            raise StructuralError(
                f"mention {mention.mention_id}: unknown document {mention.document_id!r}")
        if not 0 <= mention.sentence_index < len(doc.sentences):
            raise StructuralError(
                f"mention {mention.mention_id}: sentence {mention.sentence_index} "
                f"not in document {mention.document_id!r}")
        return doc.sentences[mention.sentence_index]

    def replace(self, **changes) -> "Corpus":
        fields = dict(name=self.name, documents=self.documents,
                      chains=self.chains, mentions=self.mentions)
        fields.update(changes)
        return Corpus(**fields)


def mention_tokens(mention: Mention, corpus: Corpus) -> tuple[Token, ...]:
    sentence = corpus.sentence_of(mention)
    if not (0 <= mention.start < mention.end <= len(sentence)):
        raise StructuralError(
            f"mention {mention.mention_id}: span [{mention.start}, {mention.end}) "
            f"outside sentence of {len(sentence)} tokens")
    return sentence[mention.start:mention.end]


def mention_surface(mention: Mention, corpus: Corpus) -> str:
    """Span tokens joined by single spaces, casing preserved."""
    return " ".join(t.surface for t in mention_tokens(mention, corpus))


def head_token(mention: Mention, corpus: Corpus) -> Token:
    sentence = corpus.sentence_of(mention)
    if not 0 <= mention.head_index < len(sentence):
        raise StructuralError(
            f"mention {mention.mention_id}: head {mention.head_index} outside sentence")
    return sentence[mention.head_index]


def head_lemma(mention: Mention, corpus: Corpus,
               normalization: NormalizationPolicy = DEFAULT_POLICY) -> str:
    """Lemma of the head token (lowercased under a case-insensitive policy)."""
    tok = head_token(mention, corpus)
    return normalization.text(tok.lemma)


def head_key(mention: Mention, corpus: Corpus,
             normalization: NormalizationPolicy = DEFAULT_POLICY) -> str:
    """The grouping key selected by ``normalization.group_by``."""
    tok = head_token(mention, corpus)
    raw = tok.lemma if normalization.group_by == "lemma" else tok.surface
    return normalization.text(raw)


def unit_of(document: Document, level: str) -> str:
    """Identifier of the grouping unit a document belongs to."""
    if level == "document":
        return document.document_id
    if level == "subtopic":
        if document.subtopic_id == document.topic_id:
            return document.topic_id
        return f"{document.topic_id}/{document.subtopic_id}"
    if level == "topic":
        return document.topic_id
    if level == "corpus":
        return "corpus"
    raise ValueError(f"unknown level {level!r}; expected document, subtopic, topic or corpus")
