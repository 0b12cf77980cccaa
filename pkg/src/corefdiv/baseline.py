"""Same-head-lemma baseline over gold mentions."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .ingest import filter_singletons
from .model import DEFAULT_POLICY, Corpus, NormalizationPolicy, head_key, unit_of
from .scoring import ScoreReport, macro_score, score

LEVELS = ("document", "subtopic", "topic", "corpus")


@dataclass(frozen=True)
class ClusteringResult:
    clusters: tuple[tuple[str, ...], ...]
    level: str

    def as_sets(self) -> list[frozenset]:
        return [frozenset(c) for c in self.clusters]


def _mention_order(corpus: Corpus):
    doc_rank = {d.document_id: i for i, d in enumerate(corpus.documents)}
    return lambda m: (doc_rank.get(m.document_id, -1), m.sentence_index, m.start, m.end,
                      m.mention_id)


def lemma_baseline(corpus: Corpus, level: str = "subtopic",
                   policy: NormalizationPolicy = DEFAULT_POLICY,
                   split_by_kind: bool = False) -> ClusteringResult:
    """Cluster mentions sharing a normalized head lemma within each unit.

    Units are documents, subtopics, topics or the whole corpus.  With
    ``split_by_kind`` entity and event mentions never share a cluster.
    """
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; expected one of {LEVELS}")
    order = _mention_order(corpus)
    groups = defaultdict(list)
    for m in sorted(corpus.mentions, key=order):
        unit = unit_of(corpus.document(m.document_id), level)
        key = (unit, head_key(m, corpus, policy))
        if split_by_kind:
            key += (m.kind,)
        groups[key].append(m.mention_id)
    # clusters come out in order of their first mention
    clusters = sorted((tuple(ms) for ms in groups.values()),
                      key=lambda c: order(corpus.mention(c[0])))
    return ClusteringResult(tuple(clusters), level)


def gold_partition(corpus: Corpus) -> list[frozenset]:
    return [frozenset(c.mention_ids) for c in corpus.chains]


def score_clustering(corpus: Corpus, result: ClusteringResult,
                     aggregation: str = "micro") -> ScoreReport:
    """Score a clustering of ``corpus``'s mentions against its gold chains.

    ``micro`` pools every unit into one pair of partitions; ``macro`` scores
    each unit of ``result.level`` separately (gold chains are cut at unit
    borders) and averages.
    """
    gold = gold_partition(corpus)
    if aggregation == "micro":
        return score(gold, result.as_sets())
    if aggregation != "macro":
        raise ValueError(f"unknown aggregation {aggregation!r}; expected micro or macro")

    unit = {m.mention_id: unit_of(corpus.document(m.document_id), result.level)
            for m in corpus.mentions}
    per_unit = defaultdict(lambda: ([], []))
    for side, partition in ((0, gold), (1, result.as_sets())):
        for cluster in partition:
            pieces = defaultdict(set)
            for mid in cluster:
                pieces[unit[mid]].add(mid)
            for u, piece in pieces.items():
                per_unit[u][side].append(piece)
    return macro_score(per_unit[u] for u in sorted(per_unit))


def score_baseline(corpus: Corpus, level: str = "subtopic", exclude_singletons: bool = True,
                   policy: NormalizationPolicy = DEFAULT_POLICY, split_by_kind: bool = False,
                   aggregation: str = "micro") -> ScoreReport:
    """Run the lemma baseline and score it against the gold chains."""
    if exclude_singletons:
        corpus = filter_singletons(corpus)
    result = lemma_baseline(corpus, level, policy, split_by_kind)
    return score_clustering(corpus, result, aggregation)
