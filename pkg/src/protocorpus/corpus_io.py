"""JSONL corpus serialization.

Every file ends with a sentinel line recording the record count; a file
without it was cut short and is rejected on read.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

from .metadata import Roster, SessionCalendar
from .segmenter import Segment

SENTINEL_KEY = "__end__"


class CorpusFormatError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusRecord:
    segment_id: str
    parliament: str
    period: int
    session: int
    date: str | None
    estimated_date: bool
    kind: str
    speaker_kind: str
    mp_id: str | None
    first_name: str | None
    last_name: str | None
    party: str | None
    alignment: str | None
    birth_year: int | None
    constituency: str | None
    text: str
    text_original: str | None
    position: int
    attributed_mps: tuple[str, ...]
    attributed_parties: tuple[str, ...]

    def to_json(self) -> str:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["attributed_mps"] = list(self.attributed_mps)
        d["attributed_parties"] = list(self.attributed_parties)
        return json.dumps(d, ensure_ascii=False, separators=(",", ":"))

    @property
    def year(self) -> int | None:
        return int(self.date[:4]) if self.date else None


FIELD_NAMES = tuple(f.name for f in fields(CorpusRecord))


def to_record(seg: Segment, roster: Roster | None,
              dates: SessionCalendar | None = None,
              parties=None) -> CorpusRecord:
    """Join a segment with its speaker's roster entry."""
    entry = roster.by_id.get(seg.speaker.mp_id) if roster and seg.speaker.mp_id else None
    date, estimated = seg.date, seg.estimated_date
    if dates is not None:
        hit = dates.lookup(seg.parliament, seg.period, seg.session)
        if hit:
            date, estimated = hit
    party = seg.party
    alignment = None
    if parties is not None and party:
        alignment = parties.alignment(party) or None
    if entry is not None and alignment is None and party == entry.party:
        alignment = entry.alignment or None
    return CorpusRecord(
        segment_id=seg.segment_id,
        parliament=seg.parliament,
        period=seg.period,
        session=seg.session,
        date=date.isoformat() if date else None,
        estimated_date=bool(estimated) if date else False,
        kind=seg.kind.value,
        speaker_kind=seg.speaker.kind.value,
        mp_id=entry.mp_id if entry else None,
        first_name=entry.first_name if entry else None,
        last_name=entry.last_name if entry else None,
        party=party,
        alignment=alignment,
        birth_year=entry.birth_year if entry else None,
        constituency=(entry.constituency or None) if entry else None,
        text=seg.text,
        text_original=seg.text_original,
        position=seg.position,
        attributed_mps=tuple(seg.attributed_mps),
        attributed_parties=tuple(seg.attributed_parties),
    )


def _sentinel(count: int) -> str:
    return json.dumps({SENTINEL_KEY: True, "records": count},
                      separators=(",", ":"))


def write_records(records: Iterable[CorpusRecord], sink: IO[str]) -> int:
    n = 0
    for rec in records:
        sink.write(rec.to_json())
        sink.write("\n")
        n += 1
    sink.write(_sentinel(n))
    sink.write("\n")
    return n


def write_corpus(segments: Iterable[Segment], roster: Roster | None,
                 dates: SessionCalendar | None, sink, parties=None) -> int:
    """Write one JSONL record per segment to ``sink`` (stream or path)."""
    records = (to_record(s, roster, dates, parties) for s in segments)
    if isinstance(sink, (str, Path)):
        path = Path(sink)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            return write_records(records, fh)
    return write_records(records, sink)


def dump_records(records: Iterable[CorpusRecord]) -> str:
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue()


def _from_dict(d: dict, where: str) -> CorpusRecord:
    if tuple(d) != FIELD_NAMES:
        missing = set(FIELD_NAMES) - set(d)
        extra = set(d) - set(FIELD_NAMES)
        raise CorpusFormatError(
            f"{where}: unexpected fields (missing {sorted(missing)}, "
            f"extra {sorted(extra)}, or wrong order)")
    d = dict(d)
    d["attributed_mps"] = tuple(d["attributed_mps"])
    d["attributed_parties"] = tuple(d["attributed_parties"])
    return CorpusRecord(**d)


def iter_corpus(source) -> Iterator[CorpusRecord]:
    """Stream records from a path or text stream, verifying integrity."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            yield from iter_corpus(fh)
        return
    name = getattr(source, "name", "<stream>")
    seen = set()
    count = 0
    ended = False
    any_line = False
    for n, line in enumerate(source, 1):
        if not line.strip():
            continue
        any_line = True
        if ended:
            raise CorpusFormatError(f"{name}: line {n}: data after end marker")
        try:
            d = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{name}: line {n}: {exc.msg}") from None
        if not isinstance(d, dict):
            raise CorpusFormatError(f"{name}: line {n}: not a JSON object")
        if SENTINEL_KEY in d:
            if d.get("records") != count:
                raise CorpusFormatError(
                    f"{name}: line {n}: end marker says {d.get('records')} "
                    f"records, read {count}")
            ended = True
            continue
        rec = _from_dict(d, f"{name}: line {n}")
        if rec.segment_id in seen:
            raise CorpusFormatError(
                f"{name}: line {n}: duplicate segment_id {rec.segment_id!r}")
        seen.add(rec.segment_id)
        count += 1
        yield rec
    if any_line and not ended:
        raise CorpusFormatError(f"{name}: truncated, end marker missing")


def read_corpus(source) -> list[CorpusRecord]:
    return list(iter_corpus(source))


def session_path(root, parliament: str, period: int, session: int) -> Path:
    return Path(root) / parliament / str(period) / f"{session}.jsonl"


def merge_files(paths: Sequence[Path], dest) -> int:
    """Concatenate per-session files into one corpus file, in given order."""
    def records():
        for p in paths:
            yield from iter_corpus(p)
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        return write_records(records(), fh)
