"""Report tables, CSV exports and the end-to-end pipeline bundle.

Each ``cmd_*`` function takes a :class:`RunConfig`, writes its files and
returns a dict of what it produced.  Everything is rendered in memory first
and then written file by file through temp-file renames.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .baseline import LEVELS, lemma_baseline, score_clustering
from .diversity import ChainDiversity, DatasetSummary, chain_diversities, summarize
from .ingest import (
    atomic_write,
    dumps_conll,
    dumps_corpus,
    filter_singletons,
    load_corpus,
    read_conll_clusters,
)
from .model import Corpus, NormalizationPolicy
from .scoring import score
from .span_expand import ExpansionLog, expand_corpus, load_parses, parse_file_for

OUTPUT_FORMATS = ("human_table", "csv", "json")


class ConfigError(ValueError):
    """Inconsistent or unusable run configuration."""


@dataclass
class RunConfig:
    inputs: list = field(default_factory=list)
    format: Optional[str] = None
    labels: list = field(default_factory=list)
    level: str = "subtopic"
    exclude_singletons: bool = True
    case_insensitive: bool = True
    whitespace_collapse: bool = True
    group_by: str = "lemma"
    expand: bool = False
    parses: Optional[str] = None
    expand_mode: str = "outermost"
    split_by_kind: bool = False
    aggregation: str = "micro"
    baseline: bool = True
    out: Optional[str] = None
    output_formats: list = field(default_factory=lambda: list(OUTPUT_FORMATS))

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.check()
        return cfg

    def check(self) -> None:
        if isinstance(self.inputs, (str, Path)):
            self.inputs = [self.inputs]
        self.inputs = [str(p) for p in self.inputs]
        if self.level not in LEVELS:
            raise ConfigError(f"level must be one of {LEVELS}, got {self.level!r}")
        if self.group_by not in ("lemma", "surface"):
            raise ConfigError(f"group_by must be lemma or surface, got {self.group_by!r}")
        if self.aggregation not in ("micro", "macro"):
            raise ConfigError(f"aggregation must be micro or macro, got {self.aggregation!r}")
        if self.expand_mode not in ("outermost", "projection"):
            raise ConfigError("expand_mode must be outermost or projection")
        if self.expand and not self.parses:
            raise ConfigError("expansion requested but no parses directory given")
        if self.parses and not Path(self.parses).is_dir():
            raise ConfigError(f"parses directory {self.parses} does not exist")
        if self.labels and len(self.labels) != len(self.inputs):
            raise ConfigError("number of labels must match number of inputs")
        bad = sorted(set(self.output_formats) - set(OUTPUT_FORMATS))
        if bad:
            raise ConfigError(f"unknown output formats: {bad}")

    @property
    def policy(self) -> NormalizationPolicy:
        return NormalizationPolicy(self.case_insensitive, self.whitespace_collapse, self.group_by)

    def to_dict(self) -> dict:
        return asdict(self)

    def identity(self) -> dict:
        """Fields that determine results; the output location is not one of them."""
        d = self.to_dict()
        d.pop("out")
        return d

    def digest(self) -> str:
        return sha256_bytes(canonical_json(self.identity()).encode())


# ---------------------------------------------------------------- formatting

def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _fmt(x, digits=None) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x) if digits is None else f"{x:.{digits}f}"
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def chains_csv(rows: Sequence[ChainDiversity]) -> str:
    return _csv(["chain_id", "size", "unique_lemmas", "pd"],
                [(r.chain_id, r.size, r.unique_head_lemmas, _fmt(r.pd)) for r in rows])


TABLE_ROWS = [
    ("# topics", "topics", None),
    ("# subtopics", "subtopics", None),
    ("# articles", "articles", None),
    ("# mentions", "mentions", None),
    ("# chains", "chains", None),
    ("# singletons", "singletons", None),
    ("average chain size*", "avg_chain_size", 1),
    ("average # unique lemmas*", "avg_unique_lemmas", 1),
    ("Phrasing diversity (PD)*", "pd_weighted", 1),
    ("F1_CoNLL*", "lemma_baseline_conll_f1", 1),
]


def summary_table(summaries: dict[str, DatasetSummary], exclude_singletons=True) -> str:
    """Plain-text table, one column per dataset, averages at one decimal."""
    names = list(summaries)
    rows = []
    for title, attr, digits in TABLE_ROWS:
        if not exclude_singletons:
            title = title.rstrip("*")
        vals = []
        for n in names:
            v = getattr(summaries[n], attr)
            if v is None:
                vals.append("-")
            elif attr == "lemma_baseline_conll_f1":
                vals.append(f"{100 * v:.{digits}f}")
            elif digits is not None:
                vals.append(f"{v:.{digits}f}")
            else:
                vals.append(str(v))
        rows.append([title] + vals)
    header = ["Criteria"] + names
    widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
    lines = ["  ".join(str(c).ljust(w) if i == 0 else str(c).rjust(w)
                       for i, (c, w) in enumerate(zip(r, widths))) for r in [header] + rows]
    lines.insert(1, "-" * len(lines[0]))
    if exclude_singletons:
        lines.append("* computed without singleton chains")
    return "\n".join(lines) + "\n"


def summary_json(summary: DatasetSummary) -> str:
    return canonical_json(summary.to_dict())


# ---------------------------------------------------------------- loading

def _labels(cfg: RunConfig, corpora) -> list[str]:
    if cfg.labels:
        return list(cfg.labels)
    out = []
    for path, corpus in zip(cfg.inputs, corpora):
        label = corpus.name or Path(path).stem
        if label in out:
            label = f"{label}_{len(out)}"
        out.append(label)
    return out


def _load_all(cfg: RunConfig) -> list[Corpus]:
    if not cfg.inputs:
        raise ConfigError("no input corpus given")
    return [load_corpus(p, cfg.format) for p in cfg.inputs]


def _maybe_expand(cfg: RunConfig, corpus: Corpus):
    if not cfg.expand:
        return corpus, None
    parses = load_parses(cfg.parses, corpus)
    return expand_corpus(corpus, parses, mode=cfg.expand_mode)


def _write_outputs(out_dir, files: dict[str, str | bytes]) -> dict[str, str]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in sorted(files):
        atomic_write(out_dir / name, files[name])
    return {name: str(out_dir / name) for name in sorted(files)}


def with_baseline(summary: DatasetSummary, corpus: Corpus, cfg: RunConfig) -> DatasetSummary:
    scope = filter_singletons(corpus) if cfg.exclude_singletons else corpus
    if not scope.mentions:
        return summary
    result = lemma_baseline(scope, cfg.level, cfg.policy, cfg.split_by_kind)
    f1 = score_clustering(scope, result, cfg.aggregation).conll_f1
    return DatasetSummary(**{**summary.to_dict(), "lemma_baseline_conll_f1": f1})


# ---------------------------------------------------------------- commands

def cmd_stats(cfg: RunConfig) -> dict:
    """Dataset summaries as JSON plus a human-readable table."""
    corpora = _load_all(cfg)
    labels = _labels(cfg, corpora)
    summaries = {}
    for label, corpus in zip(labels, corpora):
        corpus, _ = _maybe_expand(cfg, corpus)
        s = summarize(corpus, cfg.exclude_singletons, cfg.policy)
        if cfg.baseline:
            s = with_baseline(s, corpus, cfg)
        summaries[label] = s
    table = summary_table(summaries, cfg.exclude_singletons)
    files = {}
    if "json" in cfg.output_formats:
        if len(summaries) == 1:
            files["summary.json"] = summary_json(next(iter(summaries.values())))
        else:
            for label, s in summaries.items():
                files[f"{label}.summary.json"] = summary_json(s)
    if "human_table" in cfg.output_formats:
        files["stats.txt"] = table
    written = _write_outputs(cfg.out, files) if cfg.out else {}
    return {"summaries": summaries, "table": table, "files": written}


def cmd_diversity(cfg: RunConfig) -> dict:
    """Per-chain CSV and summary JSON; with parses, both span variants side by side."""
    corpora = _load_all(cfg)
    labels = _labels(cfg, corpora)
    files = {}
    result = {}
    for label, corpus in zip(labels, corpora):
        prefix = "" if len(corpora) == 1 else f"{label}."
        variants = {"original": corpus}
        if cfg.parses:
            variants["expanded"], _ = expand_corpus(corpus, load_parses(cfg.parses, corpus),
                                                    mode=cfg.expand_mode)
        summaries = {}
        for variant, c in variants.items():
            scope = filter_singletons(c) if cfg.exclude_singletons else c
            rows = chain_diversities(scope, policy=cfg.policy)
            summaries[variant] = summarize(c, cfg.exclude_singletons, cfg.policy)
            suffix = "" if variant == "original" else f"_{variant}"
            files[f"{prefix}chains{suffix}.csv"] = chains_csv(rows)
            result[(label, variant)] = rows
        if len(summaries) == 1:
            files[f"{prefix}summary.json"] = summary_json(summaries["original"])
        else:
            files[f"{prefix}summary.json"] = canonical_json(
                {k: v.to_dict() for k, v in summaries.items()})
    written = _write_outputs(cfg.out, files) if cfg.out else {}
    return {"rows": result, "files": written, "contents": files}


def plot_rows(label: str, corpus: Corpus, cfg: RunConfig) -> list[tuple]:
    scope = filter_singletons(corpus) if cfg.exclude_singletons else corpus
    return [(label, r.chain_id, r.size, r.unique_head_lemmas, r.pd)
            for r in chain_diversities(scope, policy=cfg.policy)]


def plotdata_csv(rows, y: str = "both") -> str:
    cols = {"pd": ["pd"], "unique_lemmas": ["unique_lemmas"], "both": ["unique_lemmas", "pd"]}
    if y not in cols:
        raise ConfigError(f"y must be pd, unique_lemmas or both, got {y!r}")
    header = ["dataset", "chain_id", "size"] + cols[y]
    out = []
    for label, cid, size, ul, pd in rows:
        vals = {"pd": f"{pd:.4f}", "unique_lemmas": str(ul)}
        out.append([label, cid, size] + [vals[c] for c in cols[y]])
    return _csv(header, out)


def cmd_plotdata(cfg: RunConfig, y: str = "both", out_name: str = "plotdata.csv") -> dict:
    """Chain size against PD and/or unique lemmas, one row per chain per dataset."""
    corpora = _load_all(cfg)
    rows = []
    for label, corpus in zip(_labels(cfg, corpora), corpora):
        corpus, _ = _maybe_expand(cfg, corpus)
        rows.extend(plot_rows(label, corpus, cfg))
    text = plotdata_csv(rows, y)
    written = _write_outputs(cfg.out, {out_name: text}) if cfg.out else {}
    return {"rows": rows, "csv": text, "files": written}


def expansion_log_csv(log: ExpansionLog) -> str:
    rows = log.to_rows()
    header = ["mention_id", "document_id", "sentence", "old_start", "old_end",
              "new_start", "new_end", "status"]
    return _csv(header, [[r[h] for h in header] for r in rows])


def build_bundle(cfg: RunConfig) -> dict[str, str]:
    """All pipeline outputs as ``{file name: text}``; nothing is written."""
    if len(cfg.inputs) != 1:
        raise ConfigError("pipeline takes exactly one input corpus")
    path = cfg.inputs[0]
    corpus = load_corpus(path, cfg.format)
    label = _labels(cfg, [corpus])[0]

    files = {}
    analysed, log = _maybe_expand(cfg, corpus)
    if log is not None:
        files["expansion_log.csv"] = expansion_log_csv(log)
        files["summary_original.json"] = summary_json(
            summarize(corpus, cfg.exclude_singletons, cfg.policy))

    scope = filter_singletons(analysed) if cfg.exclude_singletons else analysed
    rows = chain_diversities(scope, policy=cfg.policy)
    files["chains.csv"] = chains_csv(rows)
    files["plotdata.csv"] = plotdata_csv(
        [(label, r.chain_id, r.size, r.unique_head_lemmas, r.pd) for r in rows])

    summary = summarize(analysed, cfg.exclude_singletons, cfg.policy)
    if cfg.baseline and scope.mentions:
        result = lemma_baseline(scope, cfg.level, cfg.policy, cfg.split_by_kind)
        report = score_clustering(scope, result, cfg.aggregation)
        summary = DatasetSummary(**{**summary.to_dict(), "lemma_baseline_conll_f1": report.conll_f1})
        grouping = cfg.level
        files["key.conll"] = dumps_conll(scope, grouping)
        files["response.conll"] = dumps_conll(scope, grouping, result.clusters)
        files["score.json"] = canonical_json(report.to_dict(4))
    files["summary.json"] = summary_json(summary)
    files["stats.txt"] = summary_table({label: summary}, cfg.exclude_singletons)

    inputs = {path: sha256_file(path)}
    if cfg.expand:
        for doc in corpus.documents:
            p = parse_file_for(cfg.parses, doc.document_id)
            if p is not None:
                inputs[str(p)] = sha256_file(p)
    manifest = {
        "tool": "corefdiv",
        "version": __version__,
        "config": cfg.identity(),
        "config_sha256": cfg.digest(),
        "inputs": dict(sorted(inputs.items())),
        "outputs": {name: sha256_bytes(text.encode()) for name, text in sorted(files.items())},
    }
    manifest["run_sha256"] = sha256_bytes(canonical_json(
        {"config": manifest["config_sha256"], "inputs": manifest["inputs"]}).encode())
    files["manifest.json"] = canonical_json(manifest)
    return files


def cmd_pipeline(cfg: RunConfig) -> dict:
    """validate, optional expansion, optional singleton filter, diversity, baseline, scoring."""
    if not cfg.out:
        raise ConfigError("pipeline needs an output directory")
    files = build_bundle(cfg)
    return {"files": _write_outputs(cfg.out, files), "contents": files}


def cmd_baseline(cfg: RunConfig) -> dict:
    """Lemma baseline: CoNLL key and response files plus a score report."""
    if len(cfg.inputs) != 1:
        raise ConfigError("baseline takes exactly one input corpus")
    corpus = load_corpus(cfg.inputs[0], cfg.format)
    corpus, _ = _maybe_expand(cfg, corpus)
    scope = filter_singletons(corpus) if cfg.exclude_singletons else corpus
    result = lemma_baseline(scope, cfg.level, cfg.policy, cfg.split_by_kind)
    report = score_clustering(scope, result, cfg.aggregation)
    files = {
        "key.conll": dumps_conll(scope, cfg.level),
        "response.conll": dumps_conll(scope, cfg.level, result.clusters),
        "score.json": canonical_json(report.to_dict(4)),
    }
    written = _write_outputs(cfg.out, files) if cfg.out else {}
    return {"report": report, "result": result, "files": written}


def cmd_score(key_path, response_path, out=None) -> dict:
    """Score a CoNLL response file against a key file."""
    report = score(read_conll_clusters(key_path), read_conll_clusters(response_path))
    text = canonical_json(report.to_dict(4))
    if out:
        atomic_write(out, text)
    return {"report": report, "json": text}


def cmd_expand(cfg: RunConfig, out_corpus, log_path=None) -> dict:
    """Write the expanded corpus as canonical JSON, and the per-mention log as CSV."""
    if not cfg.parses:
        raise ConfigError("expand needs a parses directory")
    if len(cfg.inputs) != 1:
        raise ConfigError("expand takes exactly one input corpus")
    corpus = load_corpus(cfg.inputs[0], cfg.format)
    expanded, log = expand_corpus(corpus, load_parses(cfg.parses, corpus), mode=cfg.expand_mode)
    text = dumps_corpus(expanded)
    log_text = expansion_log_csv(log)
    atomic_write(out_corpus, text)
    if log_path:
        atomic_write(log_path, log_text)
    return {"corpus": expanded, "log": log}
