"""Loading, validating, filtering and writing corpora.

Two on-disk formats are supported:

* canonical JSON (the source of truth)::

    {"name": ..., "documents": [{"id", "topic", "subtopic",
                                 "sentences": [[{"surface", "lemma"?, "pos"?}]]}],
     "chains": [{"id", "label"?, "mentions": [{"id", "doc", "sentence",
                                               "start", "end", "head", "kind"}]}]}

* CoNLL-2012 style columns: column 1 unit id, column 3 token index, column 4
  surface, last column coreference brackets.  Files written here use eight
  columns ``unit part index surface pos lemma document coref``.
"""
from __future__ import annotations

import io
import json
import logging
import os
import re
import tempfile
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .model import (
    MENTION_KINDS,
    Chain,
    Corpus,
    Document,
    Mention,
    NormalizationPolicy,
    Token,
    unit_of,
)

__all__ = [
    "NormalizationPolicy",
    "ParseError",
    "CorpusValidationError",
    "Violation",
    "ValidationReport",
    "validate",
    "load_corpus",
    "load_corpus_with_report",
    "corpus_from_json",
    "corpus_to_json",
    "write_corpus",
    "dumps_corpus",
    "filter_singletons",
    "write_conll",
    "write_conll_key",
    "dumps_conll",
    "read_conll_clusters",
    "fallback_head",
    "atomic_write",
]

log = logging.getLogger(__name__)

FORMATS = ("canonical_json", "conll_columns")
GROUPINGS = ("document", "subtopic", "topic", "corpus")
_NOUNISH = ("N", "V", "PROPN")
_SAFE_LABEL = re.compile(r"^[^\s()|]+$")


class ParseError(ValueError):
    """Malformed input syntax; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" | "warning"
    code: str
    message: str
    location: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def add(self, severity, code, message, location):
        self.violations.append(Violation(severity, code, message, str(location)))

    @property
    def errors(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "error"]

    @property
    def warnings(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def extend(self, other: "ValidationReport"):
        self.violations.extend(other.violations)

    def __len__(self):
        return len(self.violations)

    def format(self) -> str:
        return "\n".join(f"{v.severity.upper():7s} {v.code:22s} {v.location}: {v.message}"
                         for v in self.violations)


class CorpusValidationError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        first = report.errors[0]
        more = len(report.errors) - 1
        msg = f"{first.code} at {first.location}: {first.message}"
        if more:
            msg += f" (+{more} more errors)"
        super().__init__(msg)


# ---------------------------------------------------------------- validation

def validate(corpus: Corpus) -> ValidationReport:
    """Report structural problems; never raises."""
    report = ValidationReport()

    doc_ids = Counter(d.document_id for d in corpus.documents)
    for did, n in sorted(doc_ids.items()):
        if n > 1:
            report.add("error", "duplicate_document_id", f"document id used {n} times", did)
    for d in corpus.documents:
        if not d.topic_id:
            report.add("error", "missing_topic", "document has no topic id", d.document_id)
        if not d.subtopic_id:
            report.add("error", "missing_subtopic", "document has no subtopic id", d.document_id)
        for si, sent in enumerate(d.sentences):
            for ti, tok in enumerate(sent):
                loc = f"{d.document_id}[{si}][{ti}]"
                if not tok.surface:
                    report.add("error", "empty_surface", "token surface is empty", loc)
                if not tok.lemma:
                    report.add("error", "empty_lemma", "token lemma is empty", loc)

    chain_ids = Counter(c.chain_id for c in corpus.chains)
    for cid, n in sorted(chain_ids.items()):
        if n > 1:
            report.add("error", "duplicate_chain_id", f"chain id used {n} times", cid)

    # which chains list each mention id
    listed_in = defaultdict(list)
    for c in corpus.chains:
        if not c.mention_ids:
            report.add("error", "empty_chain", "chain has no mentions", c.chain_id)
        for mid in c.mention_ids:
            listed_in[mid].append(c.chain_id)
    for mid, owners in listed_in.items():
        if len(set(owners)) > 1:
            report.add("error", "partition_violation",
                       f"mention listed in chains {sorted(set(owners))}", mid)
        elif len(owners) > 1:
            report.add("error", "duplicate_mention_id",
                       f"mention listed {len(owners)} times in chain {owners[0]}", mid)

    mention_ids = Counter(m.mention_id for m in corpus.mentions)
    for mid, n in sorted(mention_ids.items()):
        if n > 1 and len(set(listed_in.get(mid, ()))) <= 1:
            report.add("error", "duplicate_mention_id", f"mention id used {n} times", mid)

    docs = {d.document_id: d for d in corpus.documents}
    seen_triples = {}
    for m in corpus.mentions:
        loc = m.mention_id
        owners = listed_in.get(m.mention_id)
        if not owners:
            report.add("error", "unchained_mention", "mention belongs to no chain", loc)
        elif m.chain_id not in owners:
            report.add("error", "chain_mismatch",
                       f"mention says chain {m.chain_id!r} but is listed in {owners}", loc)
        if m.chain_id not in chain_ids:
            report.add("error", "dangling_chain", f"unknown chain {m.chain_id!r}", loc)
        if m.kind not in MENTION_KINDS:
            report.add("error", "invalid_kind", f"kind {m.kind!r} not in {MENTION_KINDS}", loc)
        doc = docs.get(m.document_id)
        if doc is None:
            report.add("error", "dangling_document", f"unknown document {m.document_id!r}", loc)
            continue
        if not 0 <= m.sentence_index < len(doc.sentences):
            report.add("error", "dangling_sentence",
                       f"sentence {m.sentence_index} not in document {m.document_id!r}", loc)
            continue
        n_tok = len(doc.sentences[m.sentence_index])
        if not m.start < m.end:
            report.add("error", "invalid_span", f"empty span [{m.start}, {m.end})", loc)
            continue
        if m.start < 0 or m.end > n_tok:
            report.add("error", "span_out_of_range",
                       f"span [{m.start}, {m.end}) exceeds sentence length {n_tok}", loc)
            continue
        if not m.start <= m.head_index < m.end:
            report.add("error", "head_outside_span",
                       f"head {m.head_index} not in span [{m.start}, {m.end})", loc)
        triple = (m.document_id, m.sentence_index, m.start, m.end, m.chain_id)
        if triple in seen_triples:
            report.add("error", "duplicate_mention_span",
                       f"same document, span and chain as mention {seen_triples[triple]}", loc)
        else:
            seen_triples[triple] = m.mention_id

    return report


def _raise_on_errors(report: ValidationReport):
    if not report.ok:
        raise CorpusValidationError(report)


# ---------------------------------------------------------------- heads

def fallback_head(tokens: Sequence[Token], start: int, end: int) -> int:
    """Last noun or verb tagged token of the span, else its last token."""
    for i in range(end - 1, start - 1, -1):
        pos = tokens[i].pos if 0 <= i < len(tokens) else None
        if pos and pos.upper().startswith(_NOUNISH):
            return i
    return end - 1


# ---------------------------------------------------------------- canonical JSON

def _req(obj, key, where, kind=None):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    value = obj[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise ParseError(f"{where}.{key}: expected an integer, got {value!r}")
    if kind is str:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = str(value)
        if not isinstance(value, str):
            raise ParseError(f"{where}.{key}: expected a string, got {value!r}")
    if kind is list and not isinstance(value, list):
        raise ParseError(f"{where}.{key}: expected a list")
    return value


def corpus_from_json(data: dict, report: Optional[ValidationReport] = None) -> Corpus:
    """Build a corpus from parsed canonical JSON (no validation)."""
    if report is None:
        report = ValidationReport()
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    name = str(data.get("name", ""))

    documents = []
    for di, d in enumerate(_req(data, "documents", "$", list)):
        where = f"documents[{di}]"
        did = _req(d, "id", where, str)
        sentences = []
        for si, sent in enumerate(_req(d, "sentences", where, list)):
            if not isinstance(sent, list):
                raise ParseError(f"{where}.sentences[{si}]: expected a list of tokens")
            toks = []
            for ti, t in enumerate(sent):
                twhere = f"{where}.sentences[{si}][{ti}]"
                surface = _req(t, "surface", twhere, str)
                lemma = t.get("lemma")
                if lemma is None or lemma == "":
                    lemma = surface.lower()
                pos = t.get("pos")
                toks.append(Token(si, ti, surface, str(lemma), None if pos is None else str(pos)))
            sentences.append(tuple(toks))
        topic = d.get("topic")
        subtopic = d.get("subtopic")
        topic = "" if topic is None else str(topic)
        subtopic = topic if subtopic is None else str(subtopic)
        documents.append(Document(did, topic, subtopic, tuple(sentences)))

    docs = {d.document_id: d for d in documents}
    chains, mentions = [], []
    for ci, c in enumerate(_req(data, "chains", "$", list)):
        where = f"chains[{ci}]"
        cid = _req(c, "id", where, str)
        label = c.get("label")
        mids = []
        for mi, m in enumerate(_req(c, "mentions", where, list)):
            mwhere = f"{where}.mentions[{mi}]"
            mid = _req(m, "id", mwhere, str)
            doc_id = _req(m, "doc", mwhere, str)
            sentence = _req(m, "sentence", mwhere, int)
            start = _req(m, "start", mwhere, int)
            end = _req(m, "end", mwhere, int)
            head = m.get("head")
            if head is None:
                doc = docs.get(doc_id)
                toks = ()
                if doc is not None and 0 <= sentence < len(doc.sentences):
                    toks = doc.sentences[sentence]
                head = fallback_head(toks, start, end)
                report.add("warning", "fallback_head",
                           f"no head given; using token {head}", mid)
            elif not isinstance(head, int) or isinstance(head, bool):
                raise ParseError(f"{mwhere}.head: expected an integer, got {head!r}")
            kind = str(m.get("kind", "other"))
            mentions.append(Mention(mid, doc_id, sentence, start, end, head, cid, kind))
            mids.append(mid)
        chains.append(Chain(cid, tuple(mids), None if label is None else str(label)))

    return Corpus(name, tuple(documents), tuple(chains), tuple(mentions))


def corpus_to_json(corpus: Corpus) -> dict:
    docs = []
    for d in corpus.documents:
        sents = []
        for sent in d.sentences:
            toks = []
            for t in sent:
                tj = {"surface": t.surface, "lemma": t.lemma}
                if t.pos is not None:
                    tj["pos"] = t.pos
                toks.append(tj)
            sents.append(toks)
        docs.append({"id": d.document_id, "topic": d.topic_id,
                     "subtopic": d.subtopic_id, "sentences": sents})
    chains = []
    for c in corpus.chains:
        cj = {"id": c.chain_id}
        if c.label is not None:
            cj["label"] = c.label
        cj["mentions"] = [
            {"id": m.mention_id, "doc": m.document_id, "sentence": m.sentence_index,
             "start": m.start, "end": m.end, "head": m.head_index, "kind": m.kind}
            for m in corpus.chain_mentions(c)
        ]
        chains.append(cj)
    return {"name": corpus.name, "documents": docs, "chains": chains}


def dumps_corpus(corpus: Corpus) -> str:
    return json.dumps(corpus_to_json(corpus), ensure_ascii=False, indent=1) + "\n"


def write_corpus(corpus: Corpus, out) -> None:
    atomic_write(out, dumps_corpus(corpus))


# ---------------------------------------------------------------- CoNLL columns

_BEGIN = re.compile(r"^#begin document \((.*)\);?\s*(?:part\s+(\S+))?")


@dataclass
class _ConllMention:
    document_id: str
    sentence: int
    start: int
    end: int
    label: str
    line: int


def _parse_coref_cell(cell: str, lineno: int):
    """Split a coref cell into (opens, singles, closes) label lists."""
    opens, singles, closes = [], [], []
    if cell in ("-", "_", ""):
        return opens, singles, closes
    for part in cell.split("|"):
        if part.startswith("(") and part.endswith(")") and len(part) > 2:
            singles.append(part[1:-1])
        elif part.startswith("(") and len(part) > 1:
            opens.append(part[1:])
        elif part.endswith(")") and len(part) > 1:
            closes.append(part[:-1])
        else:
            raise ParseError(f"bad coreference bracket {part!r}", lineno)
    return opens, singles, closes


def _read_conll(lines: Iterable[str], source=None):
    """Return (documents, mentions) as plain records, in file order."""
    documents = {}  # doc_id -> dict(topic, sentences=[list of Token])
    order = []
    mentions: list[_ConllMention] = []

    unit = None
    part = "0"
    cur_doc = None
    cur_sent: list[Token] = []
    stacks: dict[str, list[tuple[int, int]]] = defaultdict(list)

    def doc_entry(doc_id, unit_id):
        if doc_id not in documents:
            documents[doc_id] = {"unit": unit_id, "sentences": []}
            order.append(doc_id)
        return documents[doc_id]

    def flush(lineno):
        nonlocal cur_sent
        if cur_sent:
            documents[cur_doc]["sentences"].append(tuple(cur_sent))
            cur_sent = []
        for label, stack in stacks.items():
            if stack:
                raise ParseError(f"unclosed mention for chain {label!r} at sentence end", lineno)
        stacks.clear()

    lineno = 0
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n").rstrip("\r")
        if line.startswith("#begin document"):
            if unit is not None:
                raise ParseError("nested #begin document", lineno, source)
            mt = _BEGIN.match(line)
            if not mt:
                raise ParseError("malformed #begin document line", lineno, source)
            unit = mt.group(1)
            part = mt.group(2) or "000"
            cur_doc = None
            continue
        if line.startswith("#end document"):
            if unit is None:
                raise ParseError("#end document without #begin", lineno, source)
            if cur_doc is not None:
                flush(lineno)
            unit, cur_doc = None, None
            continue
        if line.startswith("#"):
            continue
        if not line.strip():
            if cur_doc is not None:
                flush(lineno)
            continue
        if unit is None:
            raise ParseError("token line outside #begin/#end document", lineno, source)
        cols = line.split()
        if len(cols) < 5:
            raise ParseError(f"expected at least 5 columns, got {len(cols)}", lineno, source)
        if len(cols) == 8:
            doc_id = cols[6]
            pos, lemma = cols[4], cols[5]
        else:
            doc_id = unit if part in ("0", "000") else f"{unit}_{part}"
            pos = cols[4] if len(cols) >= 6 else "-"
            lemma = cols[6] if len(cols) >= 12 else "-"
        if doc_id != cur_doc:
            if cur_doc is not None:
                flush(lineno)
            cur_doc = doc_id
            doc_entry(doc_id, unit)
        try:
            index = int(cols[2])
        except ValueError:
            raise ParseError(f"token index {cols[2]!r} is not an integer", lineno, source) from None
        if index != len(cur_sent):
            raise ParseError(f"token index {index} out of sequence (expected {len(cur_sent)})",
                             lineno, source)
        surface = cols[3]
        sent_idx = len(documents[doc_id]["sentences"])
        cur_sent.append(Token(sent_idx, index, surface,
                              surface.lower() if lemma in ("-", "_") else lemma,
                              None if pos in ("-", "_") else pos))
        try:
            opens, singles, closes = _parse_coref_cell(cols[-1], lineno)
        except ParseError as exc:
            raise ParseError(str(exc).split(": ", 1)[-1], lineno, source) from None
        # closings only pair with openings from earlier tokens
        for label in closes:
            if not stacks[label]:
                raise ParseError(f"closing bracket for chain {label!r} without opening",
                                 lineno, source)
            start, _ = stacks[label].pop()
            mentions.append(_ConllMention(doc_id, sent_idx, start, index + 1, label, lineno))
        for label in singles:
            mentions.append(_ConllMention(doc_id, sent_idx, index, index + 1, label, lineno))
        for label in opens:
            stacks[label].append((index, lineno))
    if unit is not None:
        raise ParseError("missing #end document", lineno, source)
    return documents, order, mentions


def _corpus_from_conll(lines, name, report, source=None) -> Corpus:
    documents, order, cmentions = _read_conll(lines, source)
    docs = []
    for did in order:
        entry = documents[did]
        docs.append(Document(did, entry["unit"], entry["unit"], tuple(entry["sentences"])))
    by_doc = {d.document_id: d for d in docs}

    chain_members = defaultdict(list)
    chain_order = []
    mentions = []
    for cm in cmentions:
        toks = by_doc[cm.document_id].sentences[cm.sentence]
        head = fallback_head(toks, cm.start, cm.end)
        mid = f"{cm.document_id}:{cm.sentence}:{cm.start}-{cm.end}:{cm.label}"
        if cm.end - cm.start > 1:
            report.add("warning", "fallback_head", f"head inferred as token {head}", mid)
        if cm.label not in chain_members:
            chain_order.append(cm.label)
        chain_members[cm.label].append(mid)
        mentions.append(Mention(mid, cm.document_id, cm.sentence, cm.start, cm.end,
                                head, cm.label, "other"))
    chains = tuple(Chain(label, tuple(chain_members[label])) for label in chain_order)
    # mentions grouped by chain, matching the JSON layout
    pos = {mid: i for i, mid in enumerate(m for c in chains for m in c.mention_ids)}
    mentions.sort(key=lambda m: pos.get(m.mention_id, 0))
    return Corpus(name, tuple(docs), chains, tuple(mentions))


def read_conll_clusters(path) -> dict[str, set[tuple]]:
    """Chain label -> set of mention keys ``(document, sentence, start, end, n)``.

    ``n`` numbers repeated identical spans so that they stay distinct items.
    """
    with open(path, encoding="utf-8") as fh:
        _, _, cmentions = _read_conll(fh, path)
    seen = Counter()
    clusters = defaultdict(set)
    for cm in sorted(cmentions, key=lambda c: (c.document_id, c.sentence, c.start, c.end, c.line)):
        key = (cm.document_id, cm.sentence, cm.start, cm.end)
        clusters[cm.label].add(key + (seen[key],))
        seen[key] += 1
    return dict(clusters)


def _mention_labels(corpus: Corpus, clusters=None) -> dict[str, str]:
    if clusters is None:
        labels = {}
        fallback = {c.chain_id: str(i) for i, c in enumerate(corpus.chains)}
        for c in corpus.chains:
            lab = c.chain_id if _SAFE_LABEL.match(c.chain_id) else fallback[c.chain_id]
            for mid in c.mention_ids:
                labels[mid] = lab
        return labels
    return {mid: str(i) for i, cluster in enumerate(clusters) for mid in cluster}


def dumps_conll(corpus: Corpus, grouping: str = "document", clusters=None) -> str:
    """Render the corpus in column format.

    Without ``clusters`` the gold chains are written (a key file); otherwise
    ``clusters`` is a sequence of mention-id groups (a response file).
    """
    if grouping not in GROUPINGS:
        raise ValueError(f"unknown grouping {grouping!r}; expected one of {GROUPINGS}")
    labels = _mention_labels(corpus, clusters)

    # (doc, sentence, token) -> open / single / close entries
    opens = defaultdict(list)
    singles = defaultdict(list)
    closes = defaultdict(list)
    for m in corpus.mentions:
        if m.mention_id not in labels:
            continue
        lab = labels[m.mention_id]
        if m.end - m.start == 1:
            singles[(m.document_id, m.sentence_index, m.start)].append(lab)
        else:
            opens[(m.document_id, m.sentence_index, m.start)].append((-m.end, lab))
            closes[(m.document_id, m.sentence_index, m.end - 1)].append((-m.start, lab))

    units = defaultdict(list)
    for d in corpus.documents:
        units[unit_of(d, grouping)].append(d)

    out = io.StringIO()
    for unit in sorted(units):
        out.write(f"#begin document ({unit}); part 000\n")
        for d in sorted(units[unit], key=lambda d: d.document_id):
            for si, sent in enumerate(d.sentences):
                for ti, tok in enumerate(sent):
                    key = (d.document_id, si, ti)
                    parts = [f"{lab})" for _, lab in sorted(closes.get(key, ()))]
                    parts += [f"({lab})" for lab in sorted(singles.get(key, ()))]
                    parts += [f"({lab}" for _, lab in sorted(opens.get(key, ()))]
                    coref = "|".join(parts) or "-"
                    surface = "_".join(tok.surface.split()) or "_"
                    lemma = "_".join(tok.lemma.split()) or "-"
                    out.write(f"{unit}\t0\t{ti}\t{surface}\t{tok.pos or '-'}\t{lemma}\t"
                              f"{d.document_id}\t{coref}\n")
                out.write("\n")
        out.write("#end document\n")
    return out.getvalue()


def write_conll(corpus: Corpus, out, grouping: str = "document", clusters=None) -> None:
    atomic_write(out, dumps_conll(corpus, grouping, clusters))


def write_conll_key(corpus: Corpus, grouping: str, out) -> None:
    """Write the gold chains as a CoNLL key file."""
    write_conll(corpus, out, grouping)


# ---------------------------------------------------------------- loading

def _guess_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix in (".conll", ".conll2012", ".gold_conll", ".auto_conll", ".txt", ".response", ".key"):
        return "conll_columns"
    return "canonical_json"


def load_corpus_with_report(path, format: Optional[str] = None):
    """Load and validate; returns ``(corpus, report)`` or raises.

    Raises :class:`ParseError` on malformed syntax and
    :class:`CorpusValidationError` when validation finds errors.  Warnings
    (e.g. heads filled in by the fallback rule) are returned in the report.
    """
    path = Path(path)
    fmt = format or _guess_format(path)
    aliases = {"json": "canonical_json", "conll": "conll_columns"}
    fmt = aliases.get(fmt, fmt)
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    report = ValidationReport()
    with open(path, encoding="utf-8") as fh:
        if fmt == "canonical_json":
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(exc.msg, exc.lineno, path) from None
            try:
                corpus = corpus_from_json(data, report)
            except ParseError as exc:
                raise ParseError(str(exc), None, path) from None
        else:
            corpus = _corpus_from_conll(fh, path.stem, report, path)
    report.extend(validate(corpus))
    _raise_on_errors(report)
    for w in report.warnings:
        log.debug("%s %s: %s", w.code, w.location, w.message)
    return corpus, report


def load_corpus(path, format: Optional[str] = None) -> Corpus:
    """Load a fully validated corpus from ``path``.

    ``format`` is ``"canonical_json"`` or ``"conll_columns"`` (``"json"`` and
    ``"conll"`` are accepted too); by default it is inferred from the suffix.
    """
    return load_corpus_with_report(path, format)[0]


# ---------------------------------------------------------------- filtering

def filter_singletons(corpus: Corpus) -> Corpus:
    """Drop every chain of size one together with its mention."""
    keep = tuple(c for c in corpus.chains if len(c.mention_ids) != 1)
    if len(keep) == len(corpus.chains):
        return corpus
    dropped = {c.mention_ids[0] for c in corpus.chains if len(c.mention_ids) == 1}
    mentions = tuple(m for m in corpus.mentions if m.mention_id not in dropped)
    return corpus.replace(chains=keep, mentions=mentions)


# ---------------------------------------------------------------- output

def atomic_write(path, text, encoding="utf-8") -> None:
    """Write text or bytes via a temp file and rename, so readers never see partial output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode(encoding) if isinstance(text, str) else text
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
