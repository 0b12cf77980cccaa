"""Cluster mentions by head lemma and score against gold chains.

The same-head-lemma baseline is a quick probe of how much lexical overlap
gives away.  On diverse chains it splits what belongs together.
"""
from corefdiv import lemma_baseline, load_sample
from corefdiv.baseline import gold_partition, score_clustering

corpus = load_sample("news")
print("gold:")
for c in gold_partition(corpus):
    print("   ", sorted(c))

for level in ("document", "subtopic", "corpus"):
    result = lemma_baseline(corpus, level=level)
    report = score_clustering(corpus, result)
    print(f"\nlevel={level}: {len(result.clusters)} clusters")
    for name in ("muc", "b_cubed", "ceaf_e"):
        prf = getattr(report, name)
        print(f"    {name:8s} P={prf.precision:.3f} R={prf.recall:.3f} F1={prf.f1:.3f}")
    print(f"    CoNLL F1 = {100 * report.conll_f1:.1f}")
