"""How varied is the wording inside a coreference chain?

Two small chains: one names a person mostly the same way, the other
describes a group of people with many different phrases.  Phrasing
diversity (PD) separates them even though both use two head lemmas.
"""
from corefdiv import head_groups, load_sample, pd_chain, summarize, unique_head_lemmas
from corefdiv.model import mention_surface

corpus = load_sample("news")

for chain in corpus.chains:
    print(f"\n{chain.chain_id}")
    for m in corpus.chain_mentions(chain):
        print("   ", mention_surface(m, corpus))
    for g in head_groups(chain, corpus):
        print(f"    head {g.head!r}: {len(g.unique_phrases)} distinct of {g.total_count}")
    print(f"    unique head lemmas = {unique_head_lemmas(chain, corpus)}")
    print(f"    PD = {pd_chain(chain, corpus):.4f}")

# Repetition pulls PD down; a chain of all-distinct phrases scores its lemma count.
s = summarize(corpus, exclude_singletons=True)
print(f"\nmention-weighted PD over the corpus: {s.pd_weighted:.4f}")
