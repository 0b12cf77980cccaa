"""Lexical diversity and lemma-baseline analysis for cross-document coreference corpora."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    Chain,
    Corpus,
    Document,
    Mention,
    NormalizationPolicy,
    StructuralError,
    Token,
    head_lemma,
    mention_surface,
)
from .ingest import (  # noqa: E402
    CorpusValidationError,
    ParseError,
    ValidationReport,
    filter_singletons,
    load_corpus,
    validate,
    write_conll_key,
    write_corpus,
)
from .diversity import (  # noqa: E402
    ChainDiversity,
    DatasetSummary,
    HeadGroup,
    head_groups,
    pd_chain,
    pd_dataset,
    summarize,
    unique_head_lemmas,
)
from .baseline import ClusteringResult, lemma_baseline, score_baseline  # noqa: E402
from .scoring import PRF, ScoreReport, b_cubed, ceaf_e, conll_f1, muc  # noqa: E402
from .span_expand import (  # noqa: E402
    ParseTree,
    expand_corpus,
    expand_mention,
    parse_bracketed,
)
from .samples import load_sample, sample_path  # noqa: E402
