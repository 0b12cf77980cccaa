"""Widen head-only mentions using constituency parses.

Corpora annotated with minimal spans understate phrasing diversity, since
"Trump" and "President Donald Trump" both collapse to their head.  Expanding
every mention to its NP/VP constituent recovers the full phrases.
"""
from corefdiv import expand_corpus, load_sample, pd_chain
from corefdiv.model import mention_surface
from corefdiv.samples import parse_dir
from corefdiv.span_expand import load_parses

minimal = load_sample("news_minspan")
parses = load_parses(parse_dir(), minimal)
expanded, log = expand_corpus(minimal, parses)

for rec in log.records:
    before = mention_surface(minimal.mention(rec.mention_id), minimal)
    after = mention_surface(expanded.mention(rec.mention_id), expanded)
    print(f"{rec.status:10s} {before!r:14s} -> {after!r}")

print()
for chain in minimal.chains:
    print(f"{chain.chain_id}: PD {pd_chain(chain, minimal):.4f} -> {pd_chain(chain, expanded):.4f}")
print(log.counts())
