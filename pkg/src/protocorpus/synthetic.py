"""Synthetic rosters and protocols with ground-truth segmentation.

Used by the test suite and for throughput runs. Generated protocols
carry the typical clutter around the debate (table of contents,
appendix), speaker headers in several styles, interjections inside and
between speeches, multi-line and bracket-family variations, hyphenated
line breaks and blank lines.
"""

from __future__ import annotations

import datetime as dt
import random
from dataclasses import dataclass, field

from .metadata import (Party, PartyRegistry, Roster, RosterEntry,
                       SessionDateRecord)
from .segmenter import RawDocument, SegmentKind, SourceKind

PARTIES = [
    Party("SPD", frozenset({"SPD", "Sozialdemokraten"}), "social democratic"),
    Party("CDU", frozenset({"CDU", "Union"}), "conservative"),
    Party("CSU", frozenset({"CSU"}), "conservative"),
    Party("FDP", frozenset({"FDP", "F.D.P."}), "liberal"),
    Party("Grüne", frozenset({"GRÜNE", "Grünen", "BÜNDNIS 90/DIE GRÜNEN"}), "green"),
    Party("SED", frozenset({"SED"}), "left", successor="PDS"),
    Party("PDS", frozenset({"PDS"}), "left", successor="Die Linke"),
    Party("Die Linke", frozenset({"DIE LINKE", "Linke"}), "left-populist"),
    Party("AfD", frozenset({"AfD"}), "right-populist"),
]

SURNAMES = [
    "Mustermann", "Kleinschmidt", "Oberländer", "Brandhuber", "Wettstein",
    "Sauerbrey", "Zimmerlein", "Hollenbach", "Fischbach-Lorenz", "Gerstacker",
    "Pfannkuch", "Lindqvist", "Rübsamen", "Trautwein", "Eichhorst", "Wendeborn",
    "Kahlenberg", "Morgenroth", "Quandtner", "Stegemüller", "Vollrath",
    "Ohlendorf-Spieß", "Haberkorn", "Jungbluth", "Niederstraßer", "Ulbrechtsen",
    "Dreyling", "Esterhaus", "Falkenrath", "Görtemaker", "Immendorf", "Kettwig",
    "Lauterbrunn", "Mehlhorn", "Nußbaumer", "Pietzsch", "Rautenberg", "Schimmel",
]
SHARED_SURNAME = "Müller"
FIRST_NAMES = ["Anna", "Bernd", "Claudia", "Dieter", "Eva", "Frank", "Gisela",
               "Hans", "Ingrid", "Jürgen", "Karin", "Lothar", "Monika", "Norbert",
               "Petra", "Rolf", "Sabine", "Thomas", "Ursula", "Werner"]

WORDS = ("der die das und wir haben nicht eine ist für mit auf dem den des "
         "sich auch werden wird von zu im es sie ein Land Gesetz Haushalt "
         "Regierung Antrag Ausschuss Bürgerinnen Bürger Kommunen Schulen "
         "Verkehr Wirtschaft Zukunft Verantwortung Entwurf Frage Mittel Jahr "
         "deshalb jedoch wichtig richtig notwendig heute morgen dringend "
         "Haushaltsplan Förderung Landesregierung Beratung Vorlage Änderung "
         "wollen müssen können sollten brauchen fordern unterstützen").split()
HYPHEN_SPLITS = [("Bundes", "regierung"), ("Landes", "haushalt"),
                 ("Verwal", "tung"), ("Gesetz", "entwurf"), ("CDU", "Fraktion"),
                 ("Wirt", "schaft")]
REACTIONS = ["Beifall bei der {p}", "Heiterkeit und Beifall bei der {p}",
             "Lebhafter Beifall bei der {p}", "Widerspruch bei der {p}"]
ANONYMOUS = ["Heiterkeit", "Unruhe", "Glocke des Präsidenten",
             "Zurufe", "Lachen", "Die Sitzung wird um 12.30 Uhr unterbrochen"]


@dataclass
class TruthSegment:
    anchor: int  # first non-blank line of the segment, absolute
    kind: SegmentKind
    speaker: str | None  # mp_id, or None when unattributed
    attributed_mps: tuple[str, ...] = ()
    attributed_parties: tuple[str, ...] = ()


@dataclass
class SyntheticProtocol:
    doc: RawDocument
    truth: list[TruthSegment]
    body_start: int
    body_end: int
    session_date: dt.date


@dataclass
class SyntheticParliament:
    name: str
    period: int
    roster: Roster
    parties: PartyRegistry
    entries: list[RosterEntry] = field(default_factory=list)


def party_registry() -> PartyRegistry:
    return PartyRegistry(PARTIES)


def make_roster(rng: random.Random, parliament="Testland", period=1,
                n_mps=24) -> list[RosterEntry]:
    """Roster with unique surnames plus two same-surname MPs of different parties."""
    parties = ["SPD", "CDU", "FDP", "Grüne", "SED", "PDS", "Die Linke", "AfD"]
    names = rng.sample(SURNAMES, min(n_mps, len(SURNAMES)))
    entries = []
    for k, last in enumerate(names):
        party = parties[k % len(parties)]
        entries.append(RosterEntry(
            mp_id=f"{parliament}-{period}-{k:03d}",
            first_name=rng.choice(FIRST_NAMES), last_name=last,
            birth_year=rng.randint(1930, 1990), party=party,
            constituency=f"Wahlkreis {k + 1}",
            alignment=party_registry().alignment(party) or "",
            wiki_url=f"https://de.wikipedia.org/wiki/{last}",
            parliament=parliament, period=period))
    for k, party in enumerate(("SPD", "CDU")):
        entries.append(RosterEntry(
            mp_id=f"{parliament}-{period}-m{k}", first_name=FIRST_NAMES[k],
            last_name=SHARED_SURNAME, birth_year=1950 + 10 * k, party=party,
            constituency="", alignment=party_registry().alignment(party) or "",
            wiki_url="", parliament=parliament, period=period))
    return entries


def make_parliament(seed=0, name="Testland", period=1, n_mps=24
                    ) -> SyntheticParliament:
    rng = random.Random(seed)
    entries = make_roster(rng, name, period, n_mps)
    parties = party_registry()
    return SyntheticParliament(name, period, Roster(entries, parties), parties,
                               entries)


class _Writer:
    def __init__(self, rng):
        self.rng = rng
        self.lines: list[str] = []
        self.truth: list[TruthSegment] = []

    def add(self, line):
        self.lines.append(line)

    def blank(self, p=0.1):
        if self.rng.random() < p:
            self.lines.append("" if self.rng.random() < 0.5 else "   ")

    def open(self, kind, speaker, mps=(), parties=()):
        self.truth.append(TruthSegment(len(self.lines), kind, speaker,
                                       tuple(mps), tuple(parties)))


def _sentence(rng, n=None) -> str:
    n = n or rng.randint(5, 11)
    return " ".join(rng.choice(WORDS) for _ in range(n))


def _speech_lines(w: _Writer, roster_entries, n_lines: int) -> None:
    rng = w.rng
    k = 0
    while k < n_lines:
        r = rng.random()
        if r < 0.08 and k + 1 < n_lines:
            a, b = rng.choice(HYPHEN_SPLITS)
            w.add(f"{_sentence(rng, 4)} {a}-")
            w.add(f"{b} {_sentence(rng, 4)}")
            k += 2
            continue
        if r < 0.13:
            e = rng.choice(roster_entries)
            # a colon mid-line is reported speech, not a header
            w.add(f"{_sentence(rng, 3)} wie Kollege {e.last_name}: {_sentence(rng, 3)}")
        elif r < 0.17:
            # bracket opening a line but followed by text stays speech
            w.add(f"({_sentence(rng, 3)}) {_sentence(rng, 4)}")
        elif r < 0.20:
            w.add(f"{_sentence(rng, 4)} (so steht es im {rng.choice(WORDS)}) weiter")
        else:
            w.add(_sentence(rng))
        k += 1
        w.blank(0.05)


def _header(rng, e: RosterEntry, shared: bool) -> str:
    if shared:
        style = rng.choice(["{last} ({party}):", "Abg. {last} ({party}):",
                            "Abgeordneter Dr. {last} ({party}):"])
    else:
        style = rng.choice(["{last} ({party}):", "Abgeordneter Dr. {last}:",
                            "Abgeordnete {last}:", "{last}:",
                            "Dr. {last} ({party}):", "{first} {last} ({party}):",
                            "Prof. Dr. {last}:"])
    return style.format(last=e.last_name, party=e.party, first=e.first_name)


def _comment(w: _Writer, entries, parties: PartyRegistry) -> None:
    rng = w.rng
    r = rng.random()
    opener, closer = ("[", "]") if rng.random() < 0.15 else ("(", ")")
    if r < 0.35:
        p = rng.choice(["SPD", "CDU", "FDP", "GRÜNE", "AfD"])
        body = rng.choice(REACTIONS).format(p=p)
        mps, pts = (), (parties.canonical(p),)
    elif r < 0.6:
        e = rng.choice(entries)
        if e.last_name == SHARED_SURNAME:
            body = f"Zuruf des Abg. {e.last_name} ({e.party})"
            pts = (e.party,)
        else:
            body = f"Zuruf des Abg. {e.last_name}"
            pts = ()
        mps = (e.mp_id,)
    elif r < 0.8:
        body = rng.choice(ANONYMOUS)
        mps, pts = (), ()
    else:
        e = rng.choice([x for x in entries if x.last_name != SHARED_SURNAME])
        w.open(SegmentKind.COMMENT, e.mp_id, (e.mp_id,), ())
        w.add(f"{opener}{e.last_name}: Das ist doch {_sentence(rng, 3)}")
        for _ in range(rng.randint(0, 2)):
            w.add(f"  {_sentence(rng, 5)}")
        w.add(f"{_sentence(rng, 2)}!{closer}")
        return
    w.open(SegmentKind.COMMENT, mps[0] if len(mps) == 1 else None, mps, pts)
    w.add(f"{opener}{body}{closer}")


def _preamble(w: _Writer, entries, n: int) -> None:
    rng = w.rng
    w.add("Plenarprotokoll")
    w.add("Inhalt:")
    for k in range(n):
        e = rng.choice(entries)
        if k % 3 == 0:
            w.add(f"{e.last_name} ({e.party}) . . . . . . . . {rng.randint(100, 999)} B")
        elif k % 3 == 1:
            w.add(f"Tagesordnungspunkt {k}: {_sentence(rng, 4)}")
        else:
            w.add(f"({_sentence(rng, 3)})")


def _appendix(w: _Writer, entries, n: int) -> None:
    rng = w.rng
    w.add("Anlagen zum Stenographischen Bericht")
    for _ in range(n):
        e = rng.choice(entries)
        w.add(f"{e.last_name}: {_sentence(rng, 4)}")


def generate_protocol(rng: random.Random, parl: SyntheticParliament, session=1,
                      n_turns=50, start_marker="Beginn", end_marker=True,
                      closing_phrase=True, greeting=True, lead_text=False,
                      preamble_lines=30, appendix_lines=20,
                      speech_lines=(1, 6), p_interrupt=0.3, p_between=0.25,
                      date: dt.date | None = None) -> SyntheticProtocol:
    """Build one protocol and the segments a correct splitter must produce.

    ``start_marker`` is the keyword inside the opening marker (pass
    ``"ßeginn"`` for OCR damage or None to omit it).
    """
    entries = parl.entries
    chair = entries[0]
    speakers = entries[1:]
    w = _Writer(rng)
    date = date or dt.date(1990, 1, 1) + dt.timedelta(days=rng.randint(0, 12000))

    _preamble(w, entries, preamble_lines)
    if start_marker:
        w.add(f"({start_marker}: {rng.randint(9, 11)}.{rng.randint(0, 59):02d} Uhr)")
    body_start = len(w.lines)

    if lead_text:
        w.open(SegmentKind.CHAIR, None)
        w.add("Die Sitzung ist eröffnet.")
        w.add(_sentence(rng))
    chair_title = "Präsidentin" if rng.random() < 0.5 else "Präsident"
    w.open(SegmentKind.CHAIR, chair.mp_id)
    if greeting:
        w.add(f"{chair_title} {chair.last_name}: Meine sehr verehrten Damen und Herren,")
    else:
        w.add(f"{chair_title} {chair.last_name}: {_sentence(rng)}")
    w.add(_sentence(rng))

    for _ in range(n_turns):
        w.blank(0.15)
        if rng.random() < p_between:
            _comment(w, entries, parl.parties)
            w.blank(0.15)
        if rng.random() < 0.15:
            title = rng.choice(["Präsident", "Vizepräsidentin", "Vizepräsident"])
            w.open(SegmentKind.CHAIR, chair.mp_id)
            w.add(f"{title} {chair.last_name}: {_sentence(rng)}")
            continue
        e = rng.choice(speakers)
        shared = e.last_name == SHARED_SURNAME
        w.open(SegmentKind.SPEECH, e.mp_id)
        head = _header(rng, e, shared)
        if rng.random() < 0.3:
            w.add(head)
        else:
            w.add(f"{head} {_sentence(rng)}")
        _speech_lines(w, entries, rng.randint(*speech_lines))
        while rng.random() < p_interrupt:
            _comment(w, entries, parl.parties)
            w.blank(0.1)
            w.open(SegmentKind.SPEECH, e.mp_id)
            w.add(_sentence(rng))
            _speech_lines(w, entries, rng.randint(*speech_lines))

    w.blank(0.1)
    w.open(SegmentKind.CHAIR, chair.mp_id)
    if closing_phrase:
        w.add(f"{chair_title} {chair.last_name}: Ich schließe damit die Sitzung.")
    else:
        w.add(f"{chair_title} {chair.last_name}: {_sentence(rng)}.")
    body_end = len(w.lines)
    if end_marker:
        w.add(f"(Ende: {rng.randint(15, 20)}.{rng.randint(0, 59):02d} Uhr)")
    _appendix(w, entries, appendix_lines)

    doc = RawDocument(parl.name, parl.period, [session], w.lines,
                      SourceKind.NATIVE, name=f"{session}.txt")
    return SyntheticProtocol(doc, w.truth, body_start, body_end, date)


def vocabulary() -> list[str]:
    """Every word the generator can emit outside names and numbers."""
    fixed = ("Meine sehr verehrten Damen und Herren Ich schließe damit die Sitzung "
             "wie Kollege so steht es im weiter Zuruf des Abg Das ist doch "
             "Plenarprotokoll Inhalt Tagesordnungspunkt Anlagen zum Stenographischen "
             "Bericht Beginn Ende Uhr Präsident Präsidentin Vizepräsident "
             "Vizepräsidentin Abgeordneter Abgeordnete Dr Prof eröffnet")
    words = set(WORDS) | set(fixed.split())
    for a, b in HYPHEN_SPLITS:
        words.update((a, b, a + b))
    for text in REACTIONS + ANONYMOUS:
        words.update(w for w in text.replace("{p}", "").split() if w.isalpha())
    return sorted(words)


def session_records(protocols, parl: SyntheticParliament) -> list[SessionDateRecord]:
    return [SessionDateRecord(parl.name, parl.period, p.doc.session_numbers[0],
                              p.session_date, estimated=(k % 5 == 4))
            for k, p in enumerate(protocols)]


def write_roster_csv(entries, path) -> None:
    import csv
    from dataclasses import asdict, fields as dc_fields
    cols = [f.name for f in dc_fields(RosterEntry)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, cols, lineterminator="\n")
        w.writeheader()
        for e in entries:
            row = asdict(e)
            row["birth_year"] = "" if e.birth_year is None else e.birth_year
            w.writerow(row)


def write_parties_csv(parties: PartyRegistry, path) -> None:
    import csv
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["canonical_name", "aliases", "alignment", "successor"])
        for p in parties.parties.values():
            w.writerow([p.canonical_name, ";".join(sorted(p.aliases)),
                        p.alignment, p.successor])


def write_sessions_csv(records, path) -> None:
    import csv
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["parliament", "period", "session", "date", "estimated"])
        for r in records:
            w.writerow([r.parliament, r.period, r.session, r.date.isoformat(),
                        "true" if r.estimated else "false"])


def paginate(lines, page_lines=50) -> str:
    """Join lines into page text with form feeds between pages."""
    pages = ["\n".join(lines[i:i + page_lines])
             for i in range(0, len(lines), page_lines)]
    return "\n\f".join(pages) + "\n"
