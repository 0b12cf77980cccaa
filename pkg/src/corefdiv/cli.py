"""``corefdiv`` command line.

Exit codes: 0 success, 1 I/O failure, 2 validation or usage failure.
Options may also come from ``--config FILE`` (a JSON object keyed by
:class:`~corefdiv.report.RunConfig` field names); flags win over the file.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .ingest import (
    CorpusValidationError,
    ParseError,
    dumps_conll,
    dumps_corpus,
    atomic_write,
    load_corpus,
    load_corpus_with_report,
    GROUPINGS,
)
from .report import (
    ConfigError,
    RunConfig,
    cmd_baseline,
    cmd_diversity,
    cmd_expand,
    cmd_pipeline,
    cmd_plotdata,
    cmd_score,
    cmd_stats,
)
from .scoring import UniverseMismatch
from .span_expand import AlignmentError, MissingParseError, TreeParseError

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2

log = logging.getLogger("corefdiv")

_S = argparse.SUPPRESS


def _run_options(p: argparse.ArgumentParser, inputs="*"):
    if inputs:
        p.add_argument("inputs", nargs=inputs, default=_S, metavar="CORPUS")
    p.add_argument("--config", help="JSON file with run options")
    p.add_argument("--format", default=_S, choices=["json", "conll", "canonical_json", "conll_columns"],
                   help="input format (default: from file suffix)")
    p.add_argument("--labels", nargs="+", default=_S, help="dataset labels, one per input")
    p.add_argument("--level", default=_S, choices=["document", "subtopic", "topic", "corpus"])
    p.add_argument("--exclude-singletons", dest="exclude_singletons", default=_S,
                   action=argparse.BooleanOptionalAction,
                   help="drop size-1 chains before averaging and scoring (default on)")
    p.add_argument("--case-sensitive", dest="case_insensitive", action="store_false", default=_S)
    p.add_argument("--no-whitespace-collapse", dest="whitespace_collapse", action="store_false",
                   default=_S)
    p.add_argument("--group-by", default=_S, choices=["lemma", "surface"],
                   help="head key for grouping (default lemma)")
    p.add_argument("--split-by-kind", action="store_true", default=_S,
                   help="never cluster entity with event mentions in the baseline")
    p.add_argument("--aggregation", default=_S, choices=["micro", "macro"])
    p.add_argument("--parses", default=_S, help="directory of <document_id>.trees parse files")
    p.add_argument("--expand", action="store_true", default=_S,
                   help="widen mentions to maximal NP/VP constituents first")
    p.add_argument("--expand-mode", default=_S, choices=["outermost", "projection"])
    p.add_argument("--no-baseline", dest="baseline", action="store_false", default=_S)
    p.add_argument("--out", default=_S, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corefdiv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a corpus and list problems")
    p.add_argument("input")
    p.add_argument("--format", choices=["json", "conll", "canonical_json", "conll_columns"])
    p.add_argument("--warnings", action="store_true", help="also list warnings")

    p = sub.add_parser("convert", help="convert between canonical JSON and CoNLL columns")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--format", choices=["json", "conll", "canonical_json", "conll_columns"])
    p.add_argument("--to", choices=["json", "conll"], help="output format (default: from suffix)")
    p.add_argument("--grouping", choices=GROUPINGS, default="document",
                   help="unit of '#begin document' blocks for CoNLL output")

    p = sub.add_parser("stats", help="dataset statistics table")
    _run_options(p)

    p = sub.add_parser("diversity", help="per-chain PD and unique head lemmas")
    _run_options(p)

    p = sub.add_parser("baseline", help="run and score the same-head-lemma baseline")
    _run_options(p, inputs="?")

    p = sub.add_parser("score", help="score a CoNLL response against a key")
    p.add_argument("--key", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--out", help="write the score report JSON here")

    p = sub.add_parser("expand", help="widen mention spans using constituency parses")
    _run_options(p, inputs="?")
    p.add_argument("--log", help="CSV file for the per-mention expansion log")

    p = sub.add_parser("plotdata", help="chain size vs PD / unique lemmas, as CSV")
    _run_options(p)
    p.add_argument("--y", choices=["pd", "unique_lemmas", "both"], default="both")

    p = sub.add_parser("pipeline", help="full report bundle with a reproducibility manifest")
    _run_options(p)
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}:{exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
    skip = {"command", "verbose", "config", "log", "y"}
    for key, value in vars(args).items():
        if key not in skip:
            data[key] = value
    if args.command == "expand":
        # for expand, --out names the output corpus file, not a directory
        data.pop("out", None)
        data["expand"] = False
    return RunConfig.from_mapping(data)


def _print_score(report, stream):
    for name in ("muc", "b_cubed", "ceaf_e"):
        prf = getattr(report, name)
        print(f"{name:8s} P={prf.precision:.4f} R={prf.recall:.4f} F1={prf.f1:.4f}", file=stream)
    print(f"conll_f1 {report.conll_f1:.4f}", file=stream)


def _dispatch(args, out) -> int:
    cmd = args.command
    if cmd == "validate":
        try:
            _, report = load_corpus_with_report(args.input, args.format)
        except CorpusValidationError as exc:
            print(exc.report.format(), file=out)
            return EXIT_INVALID
        shown = report.violations if args.warnings else report.errors
        for v in shown:
            print(f"{v.severity.upper():7s} {v.code:22s} {v.location}: {v.message}", file=out)
        print(f"ok ({len(report.warnings)} warnings)", file=out)
        return EXIT_OK

    if cmd == "convert":
        corpus = load_corpus(args.input, args.format)
        to = args.to or ("conll" if Path(args.output).suffix.lower() in (".conll", ".txt") else "json")
        text = dumps_conll(corpus, args.grouping) if to == "conll" else dumps_corpus(corpus)
        atomic_write(args.output, text)
        return EXIT_OK

    if cmd == "score":
        res = cmd_score(args.key, args.response, args.out)
        out.write(res["json"])
        return EXIT_OK

    cfg = make_config(args)
    if cmd == "stats":
        res = cmd_stats(cfg)
        out.write(res["table"])
    elif cmd == "diversity":
        res = cmd_diversity(cfg)
        if not cfg.out:
            for name, text in res["contents"].items():
                print(f"== {name}", file=out)
                out.write(text)
    elif cmd == "baseline":
        res = cmd_baseline(cfg)
        _print_score(res["report"], out)
    elif cmd == "expand":
        if not getattr(args, "out", None):
            raise ConfigError("expand needs --out FILE for the expanded corpus")
        res = cmd_expand(cfg, args.out, args.log)
        print(" ".join(f"{k}={v}" for k, v in res["log"].counts().items()), file=out)
    elif cmd == "plotdata":
        res = cmd_plotdata(cfg, args.y)
        if not cfg.out:
            out.write(res["csv"])
    elif cmd == "pipeline":
        res = cmd_pipeline(cfg)
        for path in res["files"].values():
            print(path, file=out)
    return EXIT_OK


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args, out)
    except (ParseError, CorpusValidationError, ConfigError, TreeParseError, AlignmentError,
            MissingParseError, UniverseMismatch) as exc:
        print(f"corefdiv: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"corefdiv: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
