"""Bundled sample corpora built around two hand-made coreference chains.

``news`` holds the chains with maximum spans ("President Donald Trump",
"a caravan of hundreds of migrants", ...).  ``news_minspan`` has the same
mentions cut down to their head token; the parse files in
:func:`parse_dir` expand it back to the maximum-span version.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .ingest import load_corpus
from .model import Corpus

SAMPLES = ("news", "news_minspan")


def sample_path(name: str = "news") -> Path:
    if name not in SAMPLES:
        raise KeyError(f"unknown sample {name!r}; choose from {SAMPLES}")
    return Path(resources.files("corefdiv") / "data" / f"{name}.json")


def load_sample(name: str = "news") -> Corpus:
    return load_corpus(sample_path(name))


def parse_dir() -> Path:
    """Directory of ``<document_id>.trees`` files for the sample documents."""
    return Path(resources.files("corefdiv") / "data" / "parses")
