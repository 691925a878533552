"""MP rosters, parties and session dates, plus speaker-name resolution."""

from __future__ import annotations

import csv
import datetime as dt
import enum
import re
from collections import defaultdict
from dataclasses import dataclass, field, fields
from typing import Iterable, Sequence

CHAIR_KEYWORDS = ("präsident", "präsidentin", "vizepräsident",
                  "vizepräsidentin", "alterspräsident")


class MetadataError(ValueError):
    """Malformed or inconsistent metadata file."""


@dataclass(frozen=True)
class RosterEntry:
    mp_id: str
    first_name: str
    last_name: str
    birth_year: int | None
    party: str
    constituency: str
    alignment: str
    wiki_url: str
    parliament: str
    period: int

    def surname_keys(self) -> tuple[str, ...]:
        """Surface forms under which this MP is addressed in protocols."""
        keys = [self.last_name]
        if "-" in self.last_name:
            keys.extend(p for p in self.last_name.split("-") if p)
        return tuple(dict.fromkeys(keys))


@dataclass(frozen=True)
class Party:
    canonical_name: str
    aliases: frozenset[str] = frozenset()
    alignment: str = ""
    successor: str = ""


@dataclass(frozen=True)
class SessionDateRecord:
    parliament: str
    period: int
    session: int
    date: dt.date
    estimated: bool = False


class SpeakerKind(str, enum.Enum):
    MP = "mp"
    CHAIR = "chair"
    UNKNOWN = "unknown"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class SpeakerRef:
    kind: SpeakerKind
    mp_id: str | None = None
    candidates: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind is SpeakerKind.MP and not self.mp_id:
            raise ValueError("an MP speaker needs an mp_id")
        if self.kind is SpeakerKind.AMBIGUOUS and len(self.candidates) < 2:
            raise ValueError("an ambiguous speaker needs >= 2 candidates")
        if self.kind is not SpeakerKind.AMBIGUOUS and self.candidates:
            raise ValueError("candidates are only kept for ambiguous speakers")

    @classmethod
    def unknown(cls) -> SpeakerRef:
        return cls(SpeakerKind.UNKNOWN)


# -- csv plumbing --------------------------------------------------------

def _read_rows(path, columns: Sequence[str]) -> list[tuple[int, dict]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns if c not in header]
        if missing:
            raise MetadataError(f"{path}: missing columns {missing}")
        # row numbers are 1-based file lines; the header is line 1
        return [(reader.line_num, row) for row in reader]


def _parse_bool(value: str, where: str) -> bool:
    v = (value or "").strip().lower()
    if v in ("1", "true", "yes", "y"):
        return True
    if v in ("", "0", "false", "no", "n"):
        return False
    raise MetadataError(f"{where}: not a boolean: {value!r}")


_ROSTER_COLUMNS = [f.name for f in fields(RosterEntry)]


def validate_entry(entry: RosterEntry) -> None:
    if not entry.last_name.strip():
        raise ValueError("last_name must be non-empty")
    if entry.birth_year is not None and not 1850 <= entry.birth_year <= 2010:
        raise ValueError(f"birth_year {entry.birth_year} outside [1850, 2010]")


def load_roster(path) -> list[RosterEntry]:
    """Load and validate ``roster.csv``."""
    entries = []
    seen = {}
    ids = set()
    for line, row in _read_rows(path, _ROSTER_COLUMNS):
        where = f"{path}: row {line}"
        try:
            by = (row["birth_year"] or "").strip()
            entry = RosterEntry(
                mp_id=row["mp_id"].strip(),
                first_name=row["first_name"].strip(),
                last_name=row["last_name"].strip(),
                birth_year=int(by) if by else None,
                party=row["party"].strip(),
                constituency=(row["constituency"] or "").strip(),
                alignment=(row["alignment"] or "").strip(),
                wiki_url=(row["wiki_url"] or "").strip(),
                parliament=row["parliament"].strip(),
                period=int(row["period"]),
            )
            validate_entry(entry)
        except (ValueError, TypeError, AttributeError) as exc:
            raise MetadataError(f"{where}: {exc}") from None
        if not entry.mp_id:
            raise MetadataError(f"{where}: mp_id must be non-empty")
        key = (entry.parliament, entry.period, entry.first_name,
               entry.last_name)
        if key in seen:
            raise MetadataError(
                f"{where}: duplicate MP {key} (first seen row {seen[key]})")
        seen[key] = line
        if entry.mp_id in ids:
            raise MetadataError(f"{where}: duplicate mp_id {entry.mp_id!r}")
        ids.add(entry.mp_id)
        entries.append(entry)
    return entries


def load_parties(path) -> PartyRegistry:
    """Load ``parties.csv``; aliases are ``;``-separated."""
    parties = []
    for line, row in _read_rows(path, ["canonical_name", "aliases",
                                       "alignment"]):
        name = row["canonical_name"].strip()
        if not name:
            raise MetadataError(f"{path}: row {line}: empty canonical_name")
        aliases = frozenset(a.strip() for a in (row["aliases"] or "").split(";")
                            if a.strip())
        parties.append(Party(name, aliases, (row["alignment"] or "").strip(),
                             (row.get("successor") or "").strip()))
    try:
        return PartyRegistry(parties)
    except ValueError as exc:
        raise MetadataError(f"{path}: {exc}") from None


def load_sessions(path) -> list[SessionDateRecord]:
    records = []
    seen = set()
    for line, row in _read_rows(path, ["parliament", "period", "session",
                                       "date"]):
        where = f"{path}: row {line}"
        try:
            rec = SessionDateRecord(
                parliament=row["parliament"].strip(),
                period=int(row["period"]),
                session=int(row["session"]),
                date=dt.date.fromisoformat(row["date"].strip()),
                estimated=_parse_bool(row.get("estimated", ""), where),
            )
        except (ValueError, TypeError, AttributeError) as exc:
            raise MetadataError(f"{where}: {exc}") from None
        key = (rec.parliament, rec.period, rec.session)
        if key in seen:
            raise MetadataError(f"{where}: duplicate session {key}")
        seen.add(key)
        records.append(rec)
    return records


# -- parties -------------------------------------------------------------

class PartyRegistry:
    """Canonical parties, their aliases and successor links."""

    def __init__(self, parties: Iterable[Party] = ()):
        self.parties: dict[str, Party] = {}
        self._alias: dict[str, str] = {}
        for p in parties:
            if p.canonical_name in self.parties:
                raise ValueError(f"duplicate party {p.canonical_name!r}")
            self.parties[p.canonical_name] = p
        for p in self.parties.values():
            for a in {p.canonical_name, *p.aliases}:
                self._alias.setdefault(a.casefold(), p.canonical_name)
        for p in self.parties.values():
            if p.successor and p.successor not in self.parties:
                raise ValueError(
                    f"{p.canonical_name}: unknown successor {p.successor!r}")
        for name in self.parties:
            self.final_successor(name)  # rejects cycles early
        forms = sorted({a for p in self.parties.values()
                        for a in (p.canonical_name, *p.aliases)},
                       key=lambda s: (-len(s), s))
        self._mention_re = (
            re.compile(r"(?<!\w)(" + "|".join(map(re.escape, forms)) + r")(?!\w)")
            if forms else None)

    def __contains__(self, name: str) -> bool:
        return name in self.parties

    def canonical(self, name: str) -> str | None:
        if not name:
            return None
        return self._alias.get(name.strip().casefold())

    def alignment(self, name: str | None) -> str | None:
        p = self.parties.get(name) if name else None
        return p.alignment if p else None

    def final_successor(self, name: str) -> str:
        seen = {name}
        while True:
            p = self.parties.get(name)
            if p is None or not p.successor:
                return name
            name = p.successor
            if name in seen:
                raise ValueError(f"successor cycle through {name!r}")
            seen.add(name)

    def lineage(self, name: str) -> set[str]:
        """``name`` together with every party that eventually succeeds into it."""
        return {p for p in self.parties
                if p == name or name in self._successors_of(p)}

    def _successors_of(self, name: str) -> list[str]:
        chain = []
        p = self.parties.get(name)
        while p is not None and p.successor:
            chain.append(p.successor)
            p = self.parties.get(p.successor)
        return chain

    def mentions(self, text: str) -> list[str]:
        """Canonical parties named in ``text``, in order of first mention."""
        if self._mention_re is None:
            return []
        found = []
        for m in self._mention_re.finditer(text):
            canon = self._alias.get(m.group(1).casefold())
            if canon and canon not in found:
                found.append(canon)
        return found


# -- roster --------------------------------------------------------------

class Roster:
    """Roster entries indexed by every surname form they answer to."""

    def __init__(self, entries: Iterable[RosterEntry],
                 parties: PartyRegistry | None = None):
        self.entries = list(entries)
        self.parties = parties
        self.by_id = {e.mp_id: e for e in self.entries}
        self._by_name: dict[str, list[RosterEntry]] = defaultdict(list)
        for e in self.entries:
            for key in e.surname_keys():
                self._by_name[key].append(e)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def for_period(self, parliament: str, period: int) -> Roster:
        return Roster((e for e in self.entries
                       if e.parliament == parliament and e.period == period),
                      self.parties)

    def periods(self) -> set[tuple[str, int]]:
        return {(e.parliament, e.period) for e in self.entries}

    def matches(self, last_name: str) -> list[RosterEntry]:
        return list(self._by_name.get(last_name.strip(), ()))

    def has_surname(self, name: str) -> bool:
        return name in self._by_name

    def _same_party(self, entry: RosterEntry, hint: str) -> bool:
        if self.parties is not None:
            a = self.parties.canonical(hint) or hint
            b = self.parties.canonical(entry.party) or entry.party
            return a.casefold() == b.casefold()
        return entry.party.casefold() == hint.strip().casefold()


def is_chair_prefix(prefix: str, keywords: Sequence[str] = CHAIR_KEYWORDS) -> bool:
    low = (prefix or "").casefold()
    return any(k.casefold() in low for k in keywords)


def resolve_speaker(last_name: str, party_hint: str = "",
                    title_prefix: str = "",
                    roster: Roster | Sequence[RosterEntry] = (),
                    chair_keywords: Sequence[str] = CHAIR_KEYWORDS
                    ) -> SpeakerRef:
    """Map a surname (plus optional party and prefix) to a roster entry.

    Several same-surname MPs are narrowed by ``party_hint``; if that does
    not leave exactly one, the result is ``AMBIGUOUS`` with all remaining
    candidates. A chair keyword in ``title_prefix`` makes the result a
    ``CHAIR`` reference, carrying the MP id when the name is unique.
    """
    if not isinstance(roster, Roster):
        roster = Roster(roster)
    found = roster.matches(last_name) if last_name else []
    if len(found) > 1 and party_hint:
        narrowed = [e for e in found if roster._same_party(e, party_hint)]
        if narrowed:
            found = narrowed
    ids = sorted(e.mp_id for e in found)

    if is_chair_prefix(title_prefix, chair_keywords):
        return SpeakerRef(SpeakerKind.CHAIR, ids[0] if len(ids) == 1 else None)
    if not ids:
        return SpeakerRef.unknown()
    if len(ids) == 1:
        return SpeakerRef(SpeakerKind.MP, ids[0])
    return SpeakerRef(SpeakerKind.AMBIGUOUS, None, tuple(ids))


# -- session dates -------------------------------------------------------

class SessionCalendar:
    def __init__(self, records: Iterable[SessionDateRecord] = ()):
        self._dates: dict[tuple[str, int, int], SessionDateRecord] = {}
        for r in records:
            key = (r.parliament, r.period, r.session)
            if key in self._dates:
                raise ValueError(f"duplicate session {key}")
            self._dates[key] = r

    def lookup(self, parliament: str, period: int, session: int
               ) -> tuple[dt.date, bool] | None:
        r = self._dates.get((parliament, period, session))
        return (r.date, r.estimated) if r else None

    def __len__(self):
        return len(self._dates)


def session_date(parliament: str, period: int, session: int,
                 records: Iterable[SessionDateRecord] | SessionCalendar
                 ) -> tuple[dt.date, bool] | None:
    cal = records if isinstance(records, SessionCalendar) else SessionCalendar(records)
    return cal.lookup(parliament, period, session)
