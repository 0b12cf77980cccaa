"""Phrasing diversity, unique head lemmas and dataset summaries.

For a chain ``c`` with head groups ``h`` (mentions sharing a normalized head
lemma), ``U_h`` the distinct normalized phrases of the group and ``A_h`` all
of its phrases::

    PD_c = (sum_h |U_h| / |A_h|) * (sum_h |U_h|) / |M_c|

and the dataset value is the mention-weighted mean of ``PD_c``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .ingest import filter_singletons
from .model import (
    DEFAULT_POLICY,
    Chain,
    Corpus,
    NormalizationPolicy,
    head_key,
    mention_surface,
)
from .parallel import ordered_map


@dataclass(frozen=True)
class HeadGroup:
    head: str
    unique_phrases: frozenset
    total_count: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(len(self.unique_phrases), self.total_count)


@dataclass(frozen=True)
class ChainDiversity:
    chain_id: str
    size: int
    unique_head_lemmas: int
    pd: float


@dataclass(frozen=True)
class DatasetSummary:
    topics: int
    subtopics: int
    articles: int
    mentions: int
    chains: int
    singletons: int
    avg_chain_size: Optional[float]
    avg_unique_lemmas: Optional[float]
    pd_weighted: Optional[float]
    lemma_baseline_conll_f1: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def head_groups(chain: Chain, corpus: Corpus,
                policy: NormalizationPolicy = DEFAULT_POLICY) -> tuple[HeadGroup, ...]:
    """Partition a chain's mentions by normalized head; sorted by head."""
    phrases = defaultdict(list)
    for m in corpus.chain_mentions(chain):
        phrases[head_key(m, corpus, policy)].append(policy.text(mention_surface(m, corpus)))
    return tuple(HeadGroup(h, frozenset(p), len(p)) for h, p in sorted(phrases.items()))


def pd_from_groups(groups: Sequence[HeadGroup]) -> Fraction:
    """Exact phrasing diversity of a chain given its head groups."""
    size = sum(g.total_count for g in groups)
    if size == 0:
        raise ValueError("phrasing diversity is undefined for an empty chain")
    ratio_sum = sum((g.ratio for g in groups), Fraction(0))
    unique_sum = sum(len(g.unique_phrases) for g in groups)
    return ratio_sum * unique_sum / size


def pd_chain(chain: Chain, corpus: Corpus,
             policy: NormalizationPolicy = DEFAULT_POLICY) -> float:
    return float(pd_from_groups(head_groups(chain, corpus, policy)))


def unique_head_lemmas(chain: Chain, corpus: Corpus,
                       policy: NormalizationPolicy = DEFAULT_POLICY) -> int:
    return len({head_key(m, corpus, policy) for m in corpus.chain_mentions(chain)})


def chain_diversity(chain: Chain, corpus: Corpus,
                    policy: NormalizationPolicy = DEFAULT_POLICY) -> ChainDiversity:
    groups = head_groups(chain, corpus, policy)
    return ChainDiversity(chain.chain_id, chain.size, len(groups), float(pd_from_groups(groups)))


def chain_diversities(corpus: Corpus, chains: Optional[Iterable[Chain]] = None,
                      policy: NormalizationPolicy = DEFAULT_POLICY) -> list[ChainDiversity]:
    """Per-chain metrics in corpus chain order."""
    chains = corpus.chains if chains is None else tuple(chains)
    return ordered_map(lambda c: chain_diversity(c, corpus, policy), chains)


def weighted_pd(rows: Sequence[ChainDiversity]) -> float:
    total = sum(r.size for r in rows)
    if not rows or total == 0:
        raise ValueError("dataset phrasing diversity needs at least one chain")
    # fixed ordering keeps the float sum reproducible
    return sum(r.size * r.pd for r in rows) / total


def pd_dataset(chains: Iterable[Chain], corpus: Corpus,
               policy: NormalizationPolicy = DEFAULT_POLICY) -> float:
    """Mention-weighted mean of per-chain phrasing diversity."""
    chains = tuple(chains)
    if not chains:
        raise ValueError("dataset phrasing diversity needs at least one chain")
    return weighted_pd(chain_diversities(corpus, chains, policy))


def summarize(corpus: Corpus, exclude_singletons: bool = True,
              policy: NormalizationPolicy = DEFAULT_POLICY) -> DatasetSummary:
    """Corpus counts plus chain-level averages.

    Counts always describe the full corpus.  The averages run over the
    singleton-free chain set when ``exclude_singletons`` is true, and are
    ``None`` when no chain is left.
    """
    topics = {d.topic_id for d in corpus.documents}
    subtopics = {(d.topic_id, d.subtopic_id) for d in corpus.documents}
    singletons = sum(1 for c in corpus.chains if c.is_singleton)

    scope = filter_singletons(corpus) if exclude_singletons else corpus
    rows = chain_diversities(scope, policy=policy)
    if rows:
        avg_size = sum(r.size for r in rows) / len(rows)
        avg_lemmas = sum(r.unique_head_lemmas for r in rows) / len(rows)
        pd = weighted_pd(rows)
    else:
        avg_size = avg_lemmas = pd = None

    return DatasetSummary(
        topics=len(topics),
        subtopics=len(subtopics),
        articles=len(corpus.documents),
        mentions=len(corpus.mentions),
        chains=len(corpus.chains),
        singletons=singletons,
        avg_chain_size=avg_size,
        avg_unique_lemmas=avg_lemmas,
        pd_weighted=pd,
    )
