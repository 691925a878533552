"""Session boundaries and speech/comment segmentation.

A protocol is first trimmed to the session body (dropping the table of
contents and appendix), then scanned line by line. Speaker headers open
speeches, bracketed blocks become comments, and a speech interrupted by a
comment resumes as a new segment with the same speaker.
"""

from __future__ import annotations

import datetime as dt
import enum
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

import yaml

from .metadata import (CHAIR_KEYWORDS, PartyRegistry, Roster, SessionCalendar,
                       SpeakerKind, SpeakerRef, is_chair_prefix,
                       resolve_speaker)

HEURISTIC_LINES = 1000
COMMENT_MAX_LINES = 40
_SPEAKER_SCAN = 160  # header colon must appear within this many characters

_OPEN_TO_CLOSE = {"(": ")", "[": "]"}


class SourceKind(str, enum.Enum):
    NATIVE = "native"
    OCR = "ocr"


class BoundaryMethod(str, enum.Enum):
    START_MARKER = "start_marker"
    GREETING = "greeting"
    END_MARKER = "end_marker"
    CLOSING_PHRASE = "closing_phrase"
    HEURISTIC_CUT = "heuristic_cut"


class SegmentKind(str, enum.Enum):
    SPEECH = "speech"
    CHAIR = "chair_speech"
    COMMENT = "comment"


@dataclass
class RawDocument:
    parliament: str
    period: int
    session_numbers: list[int]
    lines: list[str]
    source_kind: SourceKind = SourceKind.NATIVE
    original_lines: list[str] | None = None  # pre-correction text, OCR only
    name: str = ""

    def __post_init__(self):
        if not self.lines:
            raise ValueError("a document needs at least one line")
        if not self.session_numbers:
            raise ValueError("a document needs at least one session number")
        if self.original_lines is not None and \
                len(self.original_lines) != len(self.lines):
            raise ValueError("original_lines must align with lines")


@dataclass(frozen=True)
class SessionBody:
    start_line: int
    end_line: int
    start_method: BoundaryMethod
    end_method: BoundaryMethod


@dataclass
class Segment:
    segment_id: str
    kind: SegmentKind
    speaker: SpeakerRef
    party: str | None
    text: str
    position: int
    parliament: str = ""
    period: int = 0
    session: int = 0
    date: dt.date | None = None
    estimated_date: bool = False
    attributed_mps: tuple[str, ...] = ()
    attributed_parties: tuple[str, ...] = ()
    start_line: int = 0
    source: tuple[str, ...] = ()
    text_original: str | None = None


# -- patterns ------------------------------------------------------------

def _fuzzy(phrase: str, confusions: dict[str, str]) -> str:
    out = []
    for ch in phrase:
        if ch.isspace():
            if not out or out[-1] != r"\s+":
                out.append(r"\s+")
        elif ch in confusions:
            out.append("[" + re.escape(ch + confusions[ch]) + "]")
        else:
            out.append(re.escape(ch))
    return "".join(out)


@dataclass
class PatternSet:
    start_keywords: list[str]
    end_keywords: list[str]
    greetings: list[str]
    closing_phrases: list[str]
    chair_keywords: list[str] = field(default_factory=lambda: list(CHAIR_KEYWORDS))
    role_words: list[str] = field(default_factory=list)
    titles: list[str] = field(default_factory=list)
    ocr_confusions: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        conf = {str(k): str(v) for k, v in self.ocr_confusions.items()}

        def alt(words):
            return "|".join(_fuzzy(w, conf) for w in
                            sorted(words, key=lambda s: (-len(s), s)))

        uhr = _fuzzy("Uhr", conf)
        self.start_re = re.compile(
            r"^\s*[(\[]\s*(?:%s)\b[^()\[\]]{0,40}?%s" % (alt(self.start_keywords), uhr),
            re.IGNORECASE)
        self.end_re = re.compile(
            r"^\s*[(\[]\s*(?:%s)\b[^()\[\]]{0,40}?%s" % (alt(self.end_keywords), uhr),
            re.IGNORECASE)
        self.greeting_re = re.compile(alt(self.greetings), re.IGNORECASE)
        self.closing_re = re.compile(alt(self.closing_phrases), re.IGNORECASE)

        prefix_words = [re.escape(w) for w in
                        sorted([*self.role_words, *self.titles],
                               key=lambda s: (-len(s), s))]
        chair = r"[\w-]*(?:%s)[\w-]*" % "|".join(
            re.escape(k) for k in sorted(self.chair_keywords, key=len, reverse=True))
        prefix_alt = "|".join([chair, *prefix_words]) if prefix_words else chair
        name_word = r"[^\W\d_][\w'’.-]*"
        self.speaker_re = re.compile(
            r"^\s*(?P<prefix>(?:(?:%s)(?:\s+|(?<=\.)))*)"
            r"(?P<name>%s(?:\s+%s){0,3})?"
            r"\s*(?:\((?P<party>[^()]{1,40})\))?\s*:\s*" % (prefix_alt, name_word, name_word),
            re.IGNORECASE)

    @classmethod
    def from_mapping(cls, data: dict) -> PatternSet:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown pattern keys: {sorted(unknown)}")
        missing = {"start_keywords", "end_keywords", "greetings",
                   "closing_phrases"} - set(data)
        if missing:
            raise ValueError(f"missing pattern keys: {sorted(missing)}")
        return cls(**data)

    @classmethod
    def load(cls, path=None) -> PatternSet:
        if path is None:
            text = resources.files("protocorpus").joinpath(
                "data/patterns.yaml").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        return cls.from_mapping(yaml.safe_load(text) or {})

    def protected_vocabulary(self) -> list[str]:
        """Header words that spell correction must leave alone."""
        words = []
        for w in [*self.role_words, *self.titles, *self.chair_keywords,
                  *self.start_keywords, *self.end_keywords]:
            words.extend(t for t in re.split(r"[\s.]+", w) if len(t) > 1)
        words.extend(w.capitalize() for w in self.chair_keywords)
        return sorted(set(words))


_DEFAULT_PATTERNS: PatternSet | None = None


def default_patterns() -> PatternSet:
    global _DEFAULT_PATTERNS
    if _DEFAULT_PATTERNS is None:
        _DEFAULT_PATTERNS = PatternSet.load()
    return _DEFAULT_PATTERNS


# -- session boundaries --------------------------------------------------

def find_session_start(lines: Sequence[str], patterns: PatternSet | None = None
                       ) -> tuple[int, BoundaryMethod]:
    p = patterns or default_patterns()
    for i, line in enumerate(lines):
        if p.start_re.search(line):
            return i, BoundaryMethod.START_MARKER
    for i, line in enumerate(lines):
        if p.greeting_re.search(line):
            return i, BoundaryMethod.GREETING
    return min(HEURISTIC_LINES, len(lines) // 4), BoundaryMethod.HEURISTIC_CUT


def find_session_end(lines: Sequence[str], start: int,
                     patterns: PatternSet | None = None
                     ) -> tuple[int, BoundaryMethod]:
    p = patterns or default_patterns()
    for i in range(len(lines) - 1, start, -1):
        if p.end_re.search(lines[i]):
            return i, BoundaryMethod.END_MARKER
    for i in range(len(lines) - 1, start, -1):
        if p.closing_re.search(lines[i]):
            return i, BoundaryMethod.CLOSING_PHRASE
    return max(len(lines) - HEURISTIC_LINES, start + 1), BoundaryMethod.HEURISTIC_CUT


def find_session_body(lines: Sequence[str], patterns: PatternSet | None = None
                      ) -> SessionBody:
    """Half-open line range holding the debate.

    Start/end marker lines are excluded from the body; a greeting or a
    closing phrase is spoken text and stays in it.
    """
    n = len(lines)
    start, smethod = find_session_start(lines, patterns)
    end, emethod = find_session_end(lines, start, patterns)
    body_start = start + 1 if smethod is BoundaryMethod.START_MARKER else start
    body_end = end + 1 if emethod is BoundaryMethod.CLOSING_PHRASE else end
    body_start = min(body_start, n - 1)
    body_end = min(max(body_end, body_start + 1), n)
    return SessionBody(body_start, body_end, smethod, emethod)


def split_multi_session(doc: RawDocument, patterns: PatternSet | None = None
                        ) -> list[RawDocument]:
    """Cut a protocol holding several sittings at each later start marker.

    Parts take the document's session numbers in order; if the file name
    listed fewer sessions than markers, numbering continues upward from
    the last listed one.
    """
    p = patterns or default_patterns()
    marks = [i for i, line in enumerate(doc.lines) if p.start_re.search(line)]
    if len(marks) <= 1:
        return [doc]
    cuts = [0, *marks[1:], len(doc.lines)]
    parts = []
    for k in range(len(cuts) - 1):
        a, b = cuts[k], cuts[k + 1]
        if k < len(doc.session_numbers):
            session = doc.session_numbers[k]
        else:
            session = doc.session_numbers[-1] + k - len(doc.session_numbers) + 1
        orig = doc.original_lines[a:b] if doc.original_lines is not None else None
        parts.append(replace(doc, session_numbers=[session],
                             lines=doc.lines[a:b], original_lines=orig))
    return parts


# -- line classifiers ----------------------------------------------------

@dataclass(frozen=True)
class SpeakerLine:
    speaker: SpeakerRef
    party_hint: str
    offset: int  # index in the line where speech text begins
    prefix: str = ""
    name: str = ""


def detect_speaker_line(line: str, roster: Roster,
                        patterns: PatternSet | None = None) -> SpeakerLine | None:
    """Recognize a speaker header such as ``Abgeordneter Dr. Muster (SPD):``.

    Only line starts are considered. The surname must be known to the
    roster unless the prefix names the chair.
    """
    p = patterns or default_patterns()
    colon = line.find(":", 0, _SPEAKER_SCAN)
    if colon < 0:
        return None
    head = line.lstrip()[:1]
    if head in _OPEN_TO_CLOSE or not head:
        return None
    m = p.speaker_re.match(line)
    if m is None:
        return None
    prefix = m.group("prefix").strip()
    name = (m.group("name") or "").strip()
    party = (m.group("party") or "").strip()
    chair = is_chair_prefix(prefix, p.chair_keywords)
    if not chair and name and is_chair_prefix(name, p.chair_keywords) \
            and not roster.has_surname(name):
        # bare "Präsident:" lands in the name group
        prefix, name, chair = f"{prefix} {name}".strip(), "", True
    if not name and not chair:
        return None

    surname = ""
    if name:
        if roster.has_surname(name):
            surname = name
        else:
            # "First Last:" only when it names a roster entry exactly
            first, _, last = name.rpartition(" ")
            if first and any(e.first_name == first for e in roster.matches(last)):
                surname = last
            elif not chair:
                return None
    ref = resolve_speaker(surname, party, prefix, roster, p.chair_keywords)
    return SpeakerLine(ref, party, m.end(), prefix, name)


@dataclass(frozen=True)
class CommentSpan:
    start_line: int
    end_line: int  # inclusive
    attributed_mps: tuple[str, ...]
    attributed_parties: tuple[str, ...]
    text: str


def _bracket_end(lines: Sequence[str], cursor: int, stop: int
                 ) -> int | None:
    """Last line of the bracket block opening at ``cursor``, or None."""
    limit = min(stop, cursor + COMMENT_MAX_LINES)
    i = cursor
    line = lines[i]
    pos = len(line) - len(line.lstrip())
    opener = line[pos]
    closer = _OPEN_TO_CLOSE[opener]
    depth = 0
    while i < limit:
        line = lines[i]
        while pos < len(line):
            ch = line[pos]
            if ch == opener:
                depth += 1
            elif ch == closer:
                depth -= 1
                if depth == 0:
                    rest = line[pos + 1:].lstrip()
                    if not rest:
                        return i
                    if rest[0] != opener:
                        return None  # text follows the bracket on its line
                    pos = len(line) - len(rest) - 1
            pos += 1
        i += 1
        pos = 0
    return None


def _comment_text(source: Sequence[str]) -> str:
    text = normalize_lines(source)
    return text[1:-1].strip() if len(text) >= 2 else ""


def attribute_comment(text: str, roster: Roster,
                      parties: PartyRegistry | None
                      ) -> tuple[tuple[str, ...], tuple[str, ...]]:
    party_hits = tuple(parties.mentions(text)) if parties else ()
    mps = []
    for word in re.findall(r"[^\W\d_][\w'’-]*", text):
        found = roster.matches(word)
        if len(found) > 1 and party_hits:
            found = [e for e in found
                     if (parties.canonical(e.party) or e.party) in party_hits]
        if len(found) == 1 and found[0].mp_id not in mps:
            mps.append(found[0].mp_id)
    return tuple(mps), party_hits


def detect_comment(lines: Sequence[str], cursor: int, roster: Roster,
                   parties: PartyRegistry | None = None,
                   stop: int | None = None) -> CommentSpan | None:
    """Bracketed stenographer note starting at ``cursor``.

    The block must close (same bracket family) within 40 lines and the
    closing bracket must end its line; otherwise the text is ordinary
    speech.
    """
    stop = len(lines) if stop is None else stop
    head = lines[cursor].lstrip()[:1]
    if head not in _OPEN_TO_CLOSE:
        return None
    end = _bracket_end(lines, cursor, stop)
    if end is None:
        return None
    text = _comment_text(lines[cursor:end + 1])
    mps, pts = attribute_comment(text, roster, parties)
    return CommentSpan(cursor, end, mps, pts, text)


_HYPHEN_END = re.compile(r"[^\W\d_]-$")


def normalize_lines(lines: Sequence[str]) -> str:
    """Join lines with single spaces, rejoining words hyphenated at a break."""
    out = ""
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        if not out:
            out = line
        elif _HYPHEN_END.search(out):
            if line[0].islower():
                out = out[:-1] + line
            else:
                out = out + line  # compound part, keep the hyphen
        else:
            out = out + " " + line
    return out


# -- splitting -----------------------------------------------------------

@dataclass
class _Draft:
    kind: SegmentKind
    speaker: SpeakerRef
    party: str | None
    source: list[str]
    start_line: int
    header_at: int = -1  # index into source of the header line
    header_offset: int = 0
    mps: tuple[str, ...] = ()
    parties: tuple[str, ...] = ()

    def content(self, source=None) -> str:
        src = list(self.source if source is None else source)
        if self.kind is SegmentKind.COMMENT:
            return _comment_text(src)
        if self.header_at >= 0:
            src[self.header_at] = src[self.header_at][self.header_offset:]
        return normalize_lines(src)


def _speech_party(ref: SpeakerRef, hint: str, roster: Roster,
                  parties: PartyRegistry | None) -> str | None:
    if ref.mp_id and ref.mp_id in roster.by_id:
        return roster.by_id[ref.mp_id].party or None
    if hint:
        return (parties.canonical(hint) if parties else None) or hint
    return None


def _comment_party(span: CommentSpan, roster: Roster) -> str | None:
    if len(span.attributed_mps) == 1:
        return roster.by_id[span.attributed_mps[0]].party or None
    if len(span.attributed_parties) == 1:
        return span.attributed_parties[0]
    return None


def split_speeches(doc: RawDocument, body: SessionBody, roster: Roster,
                   parties: PartyRegistry | None = None,
                   dates: SessionCalendar | None = None,
                   patterns: PatternSet | None = None) -> list[Segment]:
    """Partition the session body into speeches, chair statements and comments.

    Every body line lands in exactly one segment. Blank lines attach to
    the segment before them, except at the very start of the body or in
    front of text resuming after a comment.
    """
    p = patterns or default_patterns()
    lines = doc.lines
    drafts: list[_Draft] = []
    cur: _Draft | None = None
    resume: tuple[SegmentKind, SpeakerRef, str | None] | None = None
    blank: list[str] = []
    blank_at = -1

    def park_blanks():
        nonlocal blank
        if blank and drafts:
            drafts[-1].source.extend(blank)
            blank = []

    i = body.start_line
    while i < body.end_line:
        line = lines[i]
        if not line.strip():
            if not blank:
                blank_at = i
            blank.append(line)
            i += 1
            continue

        if line.lstrip()[0] in _OPEN_TO_CLOSE:
            span = detect_comment(lines, i, roster, parties, stop=body.end_line)
            if span is not None:
                park_blanks()
                if cur is not None:
                    resume = (cur.kind, cur.speaker, cur.party)
                    cur = None
                if not span.attributed_mps and not span.attributed_parties:
                    who = SpeakerRef.unknown()
                elif len(span.attributed_mps) == 1:
                    who = SpeakerRef(SpeakerKind.MP, span.attributed_mps[0])
                else:
                    who = SpeakerRef.unknown()
                d = _Draft(SegmentKind.COMMENT, who, _comment_party(span, roster),
                           blank + list(lines[i:span.end_line + 1]),
                           blank_at if blank else i,
                           mps=span.attributed_mps, parties=span.attributed_parties)
                blank = []
                drafts.append(d)
                i = span.end_line + 1
                continue

        sp = detect_speaker_line(line, roster, p)
        if sp is not None:
            park_blanks()
            kind = (SegmentKind.CHAIR if sp.speaker.kind is SpeakerKind.CHAIR
                    else SegmentKind.SPEECH)
            cur = _Draft(kind, sp.speaker,
                         _speech_party(sp.speaker, sp.party_hint, roster, parties),
                         blank + [line], blank_at if blank else i,
                         header_at=len(blank), header_offset=sp.offset)
            blank = []
            drafts.append(cur)
            resume = None
            i += 1
            continue

        if cur is None:
            if resume is not None:
                kind, who, party = resume
            else:
                kind, who, party = (SegmentKind.CHAIR,
                                    SpeakerRef(SpeakerKind.CHAIR), None)
            cur = _Draft(kind, who, party, [], blank_at if blank else i)
            drafts.append(cur)
        cur.source.extend(blank)
        cur.source.append(line)
        blank = []
        i += 1

    park_blanks()
    if not drafts:
        return []

    session = doc.session_numbers[0]
    when = dates.lookup(doc.parliament, doc.period, session) if dates else None
    out = []
    for pos, d in enumerate(drafts):
        text = d.content()
        original = None
        if doc.original_lines is not None:
            o = d.content(doc.original_lines[d.start_line:d.start_line + len(d.source)])
            if o != text:
                original = o
        out.append(Segment(
            segment_id=f"{doc.parliament}-{doc.period}-{session}-{pos}",
            kind=d.kind, speaker=d.speaker, party=d.party, text=text,
            position=pos, parliament=doc.parliament, period=doc.period,
            session=session,
            date=when[0] if when else None,
            estimated_date=when[1] if when else False,
            attributed_mps=d.mps, attributed_parties=d.parties,
            start_line=d.start_line, source=tuple(d.source),
            text_original=original))
    return out


def segment_document(doc: RawDocument, roster: Roster,
                     parties: PartyRegistry | None = None,
                     dates: SessionCalendar | None = None,
                     patterns: PatternSet | None = None
                     ) -> list[tuple[RawDocument, SessionBody, list[Segment]]]:
    """Split a protocol into sittings and segment each one."""
    results = []
    for part in split_multi_session(doc, patterns):
        body = find_session_body(part.lines, patterns)
        results.append((part, body, split_speeches(part, body, roster, parties,
                                                   dates, patterns)))
    return results


def reconstruct_body(segments: Sequence[Segment]) -> list[str]:
    """Body lines recovered from segment sources, in position order."""
    out = []
    for seg in sorted(segments, key=lambda s: s.position):
        out.extend(seg.source)
    return out
