"""End-to-end commands behind the CLI.

Input layout under each parliament root::

    {period}/{session}.txt          native text (form feeds separate pages)
    {period}/{s1}_{s2}.txt          one file holding several sittings
    {period}/{session}/*.txt        OCR output, one text file per page

Documents are processed independently (optionally in worker processes);
all files are written by the parent in a fixed order so results do not
depend on the worker count.
"""

from __future__ import annotations

import json
import logging
import re
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from . import corpus_io, preprocess
from .config import PipelineConfig
from .metadata import (PartyRegistry, Roster, SessionCalendar, SpeakerKind,
                       load_parties, load_roster, load_sessions)
from .segmenter import (PatternSet, RawDocument, SegmentKind, SourceKind,
                        segment_document)
from .spellcheck import (CorrectionDictionary, build_dictionary, correct_lines,
                         load_lexicon, load_names)
from .stats import compute_stats, write_stats

log = logging.getLogger(__name__)

_STEM = re.compile(r"^\d+(?:[_-]\d+)*$")


@dataclass(frozen=True)
class DocumentSource:
    parliament: str
    rel: str
    path: Path
    kind: SourceKind
    period: int | None = None
    sessions: tuple[int, ...] = ()
    error: str | None = None


def _natural_key(p: Path):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", p.name)]


def discover(cfg: PipelineConfig) -> list[DocumentSource]:
    found = []
    for parliament in sorted(cfg.inputs):
        root = cfg.inputs[parliament]
        for period_dir in sorted(root.iterdir(), key=_natural_key):
            if not period_dir.is_dir():
                continue
            for item in sorted(period_dir.iterdir(), key=_natural_key):
                if item.is_dir():
                    kind, stem = SourceKind.OCR, item.name
                elif item.suffix == ".txt":
                    kind, stem = SourceKind.NATIVE, item.stem
                else:
                    continue
                rel = f"{parliament}/{period_dir.name}/{item.name}"
                err = None
                period = int(period_dir.name) if period_dir.name.isdigit() else None
                if period is None:
                    err = f"period directory {period_dir.name!r} is not a number"
                if not _STEM.match(stem):
                    err = err or f"cannot read session numbers from {item.name!r}"
                sessions = tuple(int(s) for s in re.split(r"[_-]", stem)) \
                    if _STEM.match(stem) else ()
                found.append(DocumentSource(parliament, rel, item, kind, period,
                                            sessions, err))
    return found


def read_lines(src: DocumentSource) -> list[str]:
    if src.kind is SourceKind.OCR:
        pages = sorted(src.path.glob("*.txt"), key=_natural_key)
        lines = []
        for page in pages:
            lines.extend(page.read_text(encoding="utf-8").splitlines())
        return lines
    text = src.path.read_text(encoding="utf-8")
    return [ln.replace("\f", "") for ln in text.splitlines()]


# -- shared per-process state -------------------------------------------

@dataclass
class Context:
    cfg: PipelineConfig
    roster: Roster
    parties: PartyRegistry | None
    calendar: SessionCalendar
    patterns: PatternSet
    dictionary: CorrectionDictionary | None
    _periods: dict = field(default_factory=dict)

    def roster_for(self, parliament: str, period: int) -> Roster | None:
        key = (parliament, period)
        if key not in self._periods:
            sub = self.roster.for_period(parliament, period)
            self._periods[key] = sub if len(sub) else None
        return self._periods[key]


def build_dictionary_for(cfg: PipelineConfig, roster: Roster,
                         parties: PartyRegistry | None,
                         patterns: PatternSet) -> CorrectionDictionary | None:
    if cfg.lexicon is None:
        return None
    names = set()
    for e in roster:
        names.update(e.surname_keys())
    if cfg.protected_names is not None:
        names.update(load_names(cfg.protected_names))
    names.update(patterns.protected_vocabulary())
    if parties is not None:
        for p in parties.parties.values():
            names.update(a for a in (p.canonical_name, *p.aliases) if " " not in a)
    return build_dictionary(load_lexicon(cfg.lexicon), sorted(names))


def load_context(cfg: PipelineConfig, spellcheck: bool | None = None) -> Context:
    parties = load_parties(cfg.parties) if cfg.parties else None
    roster = Roster(load_roster(cfg.roster), parties)
    calendar = SessionCalendar(load_sessions(cfg.sessions) if cfg.sessions else ())
    patterns = PatternSet.load(cfg.patterns)
    use_spell = cfg.spellcheck if spellcheck is None else spellcheck
    dictionary = build_dictionary_for(cfg, roster, parties, patterns) \
        if use_spell else None
    return Context(cfg, roster, parties, calendar, patterns, dictionary)


_CTX: Context | None = None


def _init_worker(cfg: PipelineConfig, spellcheck: bool) -> None:
    global _CTX
    logging.getLogger().setLevel(logging.WARNING)
    _CTX = load_context(cfg, spellcheck)


# -- split ---------------------------------------------------------------

@dataclass
class SessionOutput:
    key: tuple[str, int, int]
    records: str
    original: str | None
    count: int


@dataclass
class DocResult:
    rows: list[dict]
    outputs: list[SessionOutput]


def _row(src: DocumentSource, status: str, **extra) -> dict:
    row = {"document": src.rel, "parliament": src.parliament,
           "period": src.period, "status": status}
    row.update(extra)
    return row


def process_document(src: DocumentSource, ctx: Context | None = None) -> DocResult:
    ctx = ctx or _CTX
    if src.error:
        return DocResult([_row(src, "error", message=src.error)], [])
    roster = ctx.roster_for(src.parliament, src.period)
    if roster is None:
        return DocResult([_row(src, "skipped", message=(
            f"no roster for {src.parliament} period {src.period}"))], [])
    try:
        lines = read_lines(src)
        if not lines:
            return DocResult([_row(src, "error", message="document is empty")], [])
        original = None
        corrections = 0
        if src.kind is SourceKind.OCR and ctx.dictionary is not None:
            original = lines
            lines, changes = correct_lines(lines, ctx.dictionary)
            corrections = len(changes)
        doc = RawDocument(src.parliament, src.period, list(src.sessions), lines,
                          src.kind, original, name=src.rel)
        parts = segment_document(doc, roster, ctx.parties, ctx.calendar,
                                 ctx.patterns)
    except Exception as exc:  # one bad scan must not stop the run
        log.debug("failed on %s", src.rel, exc_info=True)
        return DocResult([_row(src, "error",
                               message=f"{type(exc).__name__}: {exc}")], [])

    rows, outputs = [], []
    for part, body, segments in parts:
        session = part.session_numbers[0]
        speeches = [s for s in segments if s.kind is SegmentKind.SPEECH]
        unresolved = sum(s.speaker.kind in (SpeakerKind.UNKNOWN, SpeakerKind.AMBIGUOUS)
                         for s in speeches)
        rows.append(_row(
            src, "ok", session=session,
            start_method=body.start_method.value, end_method=body.end_method.value,
            body_lines=[body.start_line, body.end_line],
            segments=len(segments),
            speeches=len(speeches),
            chair_speeches=sum(s.kind is SegmentKind.CHAIR for s in segments),
            comments=sum(s.kind is SegmentKind.COMMENT for s in segments),
            unresolved_speakers=unresolved,
            unresolved_rate=round(unresolved / len(speeches), 6) if speeches else 0.0,
            corrections=corrections))
        recs = [corpus_io.to_record(s, roster, ctx.calendar, ctx.parties)
                for s in segments]
        orig_text = None
        if original is not None:
            orig_recs = [corpus_io.to_record(s, roster, ctx.calendar, ctx.parties)
                         for s in segments]
            orig_recs = [_as_original(r, s) for r, s in zip(orig_recs, segments)]
            orig_text = corpus_io.dump_records(orig_recs)
        outputs.append(SessionOutput((src.parliament, src.period, session),
                                     corpus_io.dump_records(recs), orig_text,
                                     len(recs)))
    return DocResult(rows, outputs)


def _as_original(rec: corpus_io.CorpusRecord, seg) -> corpus_io.CorpusRecord:
    text = seg.text_original if seg.text_original is not None else seg.text
    return replace(rec, text=text, text_original=None)


@dataclass
class RunReport:
    rows: list[dict]
    records: int = 0

    @property
    def failures(self) -> list[dict]:
        return [r for r in self.rows if r["status"] != "ok"]

    @property
    def ok(self) -> bool:
        return not self.failures


def _map(fn, items, cfg: PipelineConfig, workers: int, spellcheck: bool):
    if workers <= 1 or len(items) <= 1:
        global _CTX
        _CTX = load_context(cfg, spellcheck)
        try:
            yield from (fn(x) for x in items)
        finally:
            _CTX = None
        return
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(cfg, spellcheck)) as pool:
        yield from pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers)))


def cmd_split(cfg: PipelineConfig, workers: int | None = None,
              spellcheck: bool | None = None) -> RunReport:
    """Segment every input document and write the corpus tree."""
    workers = workers or cfg.workers
    spell = cfg.spellcheck if spellcheck is None else spellcheck
    sources = discover(cfg)
    for d in (cfg.corpus_dir, cfg.original_dir):
        if d.exists():
            shutil.rmtree(d)
    cfg.corpus_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    written: dict[tuple, Path] = {}
    for res in _map(process_document, sources, cfg, workers, spell):
        if not res.outputs:  # failed documents carry rows only
            rows.extend(res.rows)
            continue
        for row, out in zip(res.rows, res.outputs):
            if out.key in written:
                rows.append(dict(row, status="error", message=(
                    f"session {out.key} already produced by another file")))
                continue
            rows.append(row)
            path = corpus_io.session_path(cfg.corpus_dir, *out.key)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(out.records, encoding="utf-8", newline="\n")
            written[out.key] = path
            if out.original is not None:
                opath = corpus_io.session_path(cfg.original_dir, *out.key)
                opath.parent.mkdir(parents=True, exist_ok=True)
                opath.write_text(out.original, encoding="utf-8", newline="\n")
    total = corpus_io.merge_files([written[k] for k in sorted(written)],
                                  cfg.corpus_file)
    return RunReport(rows, total)


# -- correct -------------------------------------------------------------

def correct_document(src: DocumentSource, ctx: Context | None = None) -> tuple[dict, list[str] | None, list]:
    ctx = ctx or _CTX
    if src.error:
        return _row(src, "error", message=src.error), None, []
    try:
        lines, changes = correct_lines(read_lines(src), ctx.dictionary)
    except Exception as exc:
        return _row(src, "error", message=f"{type(exc).__name__}: {exc}"), None, []
    return _row(src, "ok", corrections=len(changes)), lines, changes


def cmd_correct(cfg: PipelineConfig, workers: int | None = None) -> RunReport:
    """Spell-correct OCR documents into ``corrected/`` with change logs."""
    if cfg.lexicon is None:
        raise ValueError("the correct command needs a lexicon in the config")
    sources = [s for s in discover(cfg) if s.kind is SourceKind.OCR]
    out_root = cfg.output_root / "corrected"
    rows = []
    for src, (row, lines, changes) in zip(
            sources, _map(correct_document, sources, cfg, workers or cfg.workers, True)):
        rows.append(row)
        if lines is None:
            continue
        stem = src.path.name
        dest = out_root / src.parliament / str(src.period)
        dest.mkdir(parents=True, exist_ok=True)
        (dest / f"{stem}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        with open(dest / f"{stem}.changes.jsonl", "w", encoding="utf-8") as fh:
            for ch in changes:
                fh.write(json.dumps(ch.as_dict(), ensure_ascii=False) + "\n")
    return RunReport(rows)


# -- preprocess ----------------------------------------------------------

def _collect_pages(inputs: Iterable) -> list[Path]:
    pages = []
    for item in inputs:
        item = Path(item)
        if item.is_dir():
            pages.extend(sorted(item.glob("*.pgm"), key=_natural_key))
        else:
            pages.append(item)
    return pages


def cmd_preprocess(inputs: Iterable, out_dir,
                   ocr: preprocess.TextFileOcr | None = None) -> RunReport:
    """Binarize and deskew page images; write a manifest for the OCR step."""
    ocr = ocr or preprocess.TextFileOcr()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for page in _collect_pages(inputs):
        dest = out / f"{page.stem}.pgm"
        try:
            bitmap = preprocess.read_pgm(page)
            cleaned, t, est = preprocess.prepare_page(bitmap)
            preprocess.write_pgm(dest, cleaned)
        except (OSError, ValueError) as exc:
            rows.append({"page": str(page), "status": "error",
                         "message": f"{type(exc).__name__}: {exc}"})
            continue
        rows.append({"page": str(page), "status": "ok", "output": str(dest),
                     "text": str(ocr.expected_text_path(dest)),
                     "threshold": t, "skew_angle": est.angle,
                     "skew_confidence": round(est.confidence, 6)})
    with open(out / "manifest.jsonl", "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")
    return RunReport(rows)


# -- stats ---------------------------------------------------------------

def cmd_stats(cfg: PipelineConfig, merge_successors: bool | None = None,
              per_speaker: bool = False, figures: bool = True) -> list[Path]:
    merge = cfg.merge_successors if merge_successors is None else merge_successors
    if not cfg.corpus_file.exists():
        raise FileNotFoundError(
            f"corpus not found at {cfg.corpus_file}; run `split` first")
    parties = load_parties(cfg.parties) if cfg.parties else None
    if merge and parties is None:
        raise ValueError("merging successors needs a parties file in the config")
    stats = compute_stats(corpus_io.iter_corpus(cfg.corpus_file), merge,
                          parties, per_speaker)
    return write_stats(stats, cfg.stats_dir, figures=figures)
