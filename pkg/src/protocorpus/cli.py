"""Command-line entry point: ``protocorpus {preprocess,correct,split,stats}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .metadata import MetadataError
from . import pipeline

log = logging.getLogger("protocorpus")

EXIT_OK, EXIT_DOC_ERRORS, EXIT_USAGE = 0, 1, 2


def _write_report(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def _finish(report, args) -> int:
    if args.report:
        _write_report(report.rows, args.report)
    for r in report.failures:
        where = r.get("document") or r.get("page")
        print(f"{r['status']}: {where}: {r.get('message', '')}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_DOC_ERRORS


def _config(args):
    cfg = load_config(args.config)
    if getattr(args, "workers", None) is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        cfg.workers = args.workers
    return cfg


def run_preprocess(args) -> int:
    out = args.out
    if out is None:
        if args.config is None:
            raise ConfigError("preprocess needs --out or --config")
        out = load_config(args.config, validate=False).output_root / "pages"
    report = pipeline.cmd_preprocess(args.pages, out)
    log.info("preprocessed %d pages into %s", len(report.rows), out)
    return _finish(report, args)


def run_correct(args) -> int:
    report = pipeline.cmd_correct(_config(args))
    log.info("corrected %d documents", len(report.rows))
    return _finish(report, args)


def run_split(args) -> int:
    cfg = _config(args)
    spell = False if args.no_spellcheck else None
    report = pipeline.cmd_split(cfg, spellcheck=spell)
    ok = sum(r["status"] == "ok" for r in report.rows)
    log.info("%d sessions, %d records written to %s", ok, report.records,
             cfg.corpus_file)
    return _finish(report, args)


def run_stats(args) -> int:
    cfg = _config(args)
    merge = True if args.merge_successors else None
    paths = pipeline.cmd_stats(cfg, merge_successors=merge,
                               per_speaker=args.per_speaker,
                               figures=not args.no_figures)
    for p in paths:
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="protocorpus",
        description="Build a speech-level corpus from parliamentary protocols.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, type=Path,
                       help="pipeline configuration (YAML)")
        p.add_argument("--report", type=Path,
                       help="write a JSONL run report to this path")

    p = sub.add_parser("preprocess", help="binarize and deskew page images")
    common(p, config_required=False)
    p.add_argument("pages", nargs="+", type=Path,
                   help="PGM page images or directories of them")
    p.add_argument("--out", type=Path, help="output directory")
    p.set_defaults(func=run_preprocess)

    p = sub.add_parser("correct", help="spell-correct OCR text")
    common(p)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=run_correct)

    p = sub.add_parser("split", help="segment protocols into a corpus")
    common(p)
    p.add_argument("--workers", type=int)
    p.add_argument("--no-spellcheck", action="store_true",
                   help="skip OCR post-correction")
    p.add_argument("--merge-successors", action="store_true",
                   help="no effect on the corpus itself; honoured by stats")
    p.set_defaults(func=run_split)

    p = sub.add_parser("stats", help="corpus statistics and figures")
    common(p)
    p.add_argument("--merge-successors", action="store_true",
                   help="count predecessor parties under their successor")
    p.add_argument("--per-speaker", action="store_true",
                   help="weight the age series by unique speaker per year")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=run_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ConfigError, MetadataError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
