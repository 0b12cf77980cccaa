"""MUC, B-cubed, CEAF-e and the CoNLL F1 average.

Every metric takes two partitions of the same mention universe.  A partition
is an iterable of clusters (iterables of hashable mention ids) or a mapping
from cluster name to such an iterable.

Degenerate inputs: a precision or recall whose denominator is zero is 0,
except when both partitions are empty, where it is 1.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

Partition = Union[Iterable[Iterable[Hashable]], Mapping[Hashable, Iterable[Hashable]]]


class UniverseMismatch(ValueError):
    """Gold and predicted partitions do not cover the same mentions."""


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0

    def to_dict(self, digits=None) -> dict:
        vals = {"precision": self.precision, "recall": self.recall, "f1": self.f1}
        if digits is not None:
            vals = {k: round(v, digits) for k, v in vals.items()}
        return vals


@dataclass(frozen=True)
class ScoreReport:
    muc: PRF
    b_cubed: PRF
    ceaf_e: PRF

    @property
    def conll_f1(self) -> float:
        return (self.muc.f1 + self.b_cubed.f1 + self.ceaf_e.f1) / 3

    def to_dict(self, digits=None) -> dict:
        f = self.conll_f1
        return {
            "muc": self.muc.to_dict(digits),
            "b_cubed": self.b_cubed.to_dict(digits),
            "ceaf_e": self.ceaf_e.to_dict(digits),
            "conll_f1": round(f, digits) if digits is not None else f,
        }


def as_clusters(partition: Partition) -> list[frozenset]:
    """Normalize to a list of non-empty frozensets; rejects overlapping clusters."""
    if isinstance(partition, Mapping):
        partition = partition.values()
    clusters = []
    seen = set()
    for cluster in partition:
        cluster = frozenset(cluster)
        if not cluster:
            continue
        if seen & cluster:
            raise ValueError(f"clusters overlap on {sorted(map(str, seen & cluster))[:3]}")
        seen |= cluster
        clusters.append(cluster)
    return clusters


def _prepare(gold: Partition, predicted: Partition):
    g, p = as_clusters(gold), as_clusters(predicted)
    gu = set().union(*g) if g else set()
    pu = set().union(*p) if p else set()
    if gu != pu:
        missing = len(gu - pu)
        extra = len(pu - gu)
        raise UniverseMismatch(
            f"partitions cover different mentions ({missing} only in gold, {extra} only in predicted)")
    return g, p


def _ratio(num, den, empty) -> float:
    if den == 0:
        return 1.0 if empty else 0.0
    return num / den


def _muc_recall(key, response) -> tuple[int, int]:
    owner = {m: i for i, c in enumerate(response) for m in c}
    num = den = 0
    for k in key:
        num += len(k) - len({owner[m] for m in k})
        den += len(k) - 1
    return num, den


def muc(gold: Partition, predicted: Partition) -> PRF:
    """Link-based MUC; size-1 chains add nothing to either side."""
    g, p = _prepare(gold, predicted)
    empty = not g
    rn, rd = _muc_recall(g, p)
    pn, pd = _muc_recall(p, g)
    return PRF(_ratio(pn, pd, empty), _ratio(rn, rd, empty))


def _b3_recall(key, response) -> tuple[float, int]:
    owner = {m: c for c in response for m in c}
    total = 0.0
    n = 0
    for k in key:
        for m in k:
            total += len(k & owner[m]) / len(k)
            n += 1
    return total, n


def b_cubed(gold: Partition, predicted: Partition) -> PRF:
    g, p = _prepare(gold, predicted)
    empty = not g
    rn, rd = _b3_recall(g, p)
    pn, pd = _b3_recall(p, g)
    return PRF(_ratio(pn, pd, empty), _ratio(rn, rd, empty))


def phi4(k: frozenset, r: frozenset) -> float:
    return 2 * len(k & r) / (len(k) + len(r))


def _components(pairs, n_gold):
    """Connected components of the bipartite overlap graph (gold i, pred n_gold+j)."""
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for gi, pj in pairs:
        a, b = find(gi), find(n_gold + pj)
        if a != b:
            parent[a] = b
    groups = defaultdict(lambda: ([], []))
    for x in list(parent):
        root = find(x)
        if x < n_gold:
            groups[root][0].append(x)
        else:
            groups[root][1].append(x - n_gold)
    return [(sorted(gs), sorted(ps)) for _, (gs, ps) in sorted(groups.items())]


def ceaf_e_similarity(gold: list, predicted: list) -> float:
    """Total phi4 similarity under the optimal one-to-one alignment."""
    owner = {m: j for j, c in enumerate(predicted) for m in c}
    overlap = Counter()
    for i, k in enumerate(gold):
        for m in k:
            j = owner.get(m)
            if j is not None:
                overlap[i, j] += 1
    total = 0.0
    # chains that share no mention have phi4 = 0, so each component is solved alone
    for gs, ps in _components(overlap, len(gold)):
        if len(gs) == 1 and len(ps) == 1:
            total += phi4(gold[gs[0]], predicted[ps[0]])
            continue
        sim = np.zeros((len(gs), len(ps)))
        for a, i in enumerate(gs):
            for b, j in enumerate(ps):
                c = overlap.get((i, j))
                if c:
                    sim[a, b] = 2 * c / (len(gold[i]) + len(predicted[j]))
        rows, cols = linear_sum_assignment(sim, maximize=True)
        total += float(sim[rows, cols].sum())
    return total


def ceaf_e(gold: Partition, predicted: Partition) -> PRF:
    """Entity-level CEAF with phi4 similarity."""
    g, p = _prepare(gold, predicted)
    empty = not g
    total = ceaf_e_similarity(g, p)
    return PRF(_ratio(total, len(p), empty), _ratio(total, len(g), empty))


def score(gold: Partition, predicted: Partition) -> ScoreReport:
    g, p = _prepare(gold, predicted)
    return ScoreReport(muc(g, p), b_cubed(g, p), ceaf_e(g, p))


def conll_f1(gold: Partition, predicted: Partition) -> float:
    """Mean of the MUC, B-cubed and CEAF-e F1 values."""
    return score(gold, predicted).conll_f1


def macro_score(units: Iterable[tuple[Partition, Partition]]) -> ScoreReport:
    """Unweighted mean over units of each metric's precision and recall.

    The F1 of each metric is then recomputed from the averaged P and R.
    """
    reports = [score(g, p) for g, p in units]
    if not reports:
        return score([], [])

    def avg(attr):
        prfs = [getattr(r, attr) for r in reports]
        return PRF(sum(x.precision for x in prfs) / len(prfs),
                   sum(x.recall for x in prfs) / len(prfs))

    return ScoreReport(avg("muc"), avg("b_cubed"), avg("ceaf_e"))
