"""Corpus-level tallies and the average speaker age series."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Sequence

from .corpus_io import CorpusRecord
from .metadata import PartyRegistry

SPEAKING_KINDS = ("speech", "chair_speech")
COUNT_KINDS = ("chair_speech", "comment", "speech")

CountKey = tuple[str, "str | None", str]  # (parliament, party, kind)


def count_segments(records: Iterable[CorpusRecord],
                   merge_successors: bool = False,
                   parties: PartyRegistry | None = None) -> Counter:
    """Tally records by ``(parliament, party, kind)``.

    With ``merge_successors`` every party is counted under its final
    successor (SED and PDS under Die Linke, for example).
    """
    if merge_successors and parties is None:
        raise ValueError("merging successors needs a party registry")
    counts: Counter = Counter()
    for r in records:
        party = r.party
        if merge_successors and party:
            party = parties.final_successor(party)
        counts[(r.parliament, party, r.kind)] += 1
    return counts


def totals_by_kind(counts: Counter) -> dict[str, int]:
    out = {k: 0 for k in COUNT_KINDS}
    for (_, _, kind), n in counts.items():
        out[kind] = out.get(kind, 0) + n
    return out


@dataclass
class AgeAccumulator:
    """Streaming per-year age sums; partial accumulators can be merged."""

    per_speaker: bool = False
    sums: dict[int, int] = field(default_factory=lambda: defaultdict(int))
    counts: dict[int, int] = field(default_factory=lambda: defaultdict(int))
    speakers: dict[int, dict[str, int]] = field(
        default_factory=lambda: defaultdict(dict))

    def add(self, r: CorpusRecord) -> None:
        if r.kind not in SPEAKING_KINDS or r.birth_year is None or not r.date:
            return
        year = r.year
        age = year - r.birth_year
        if self.per_speaker:
            key = r.mp_id or f"{r.first_name} {r.last_name}"
            self.speakers[year][key] = age
        else:
            self.sums[year] += age
            self.counts[year] += 1

    def merge(self, other: AgeAccumulator) -> AgeAccumulator:
        if other.per_speaker != self.per_speaker:
            raise ValueError("cannot merge accumulators of different weighting")
        for y, s in other.sums.items():
            self.sums[y] += s
        for y, c in other.counts.items():
            self.counts[y] += c
        for y, d in other.speakers.items():
            self.speakers[y].update(d)
        return self

    def series(self) -> dict[int, tuple[float, int]]:
        if self.per_speaker:
            return {y: (sum(d.values()) / len(d), len(d))
                    for y, d in sorted(self.speakers.items()) if d}
        return {y: (self.sums[y] / self.counts[y], self.counts[y])
                for y in sorted(self.counts) if self.counts[y]}


def average_age_series(records: Iterable[CorpusRecord],
                       per_speaker: bool = False
                       ) -> dict[int, tuple[float, int]]:
    """Year -> (mean age, contributing count) over speeches and chair speeches.

    Age is session year minus birth year. By default each speech segment
    counts once; ``per_speaker`` counts each MP once per year instead.
    """
    acc = AgeAccumulator(per_speaker=per_speaker)
    for r in records:
        acc.add(r)
    return acc.series()


@dataclass
class CorpusStats:
    counts: Counter
    age_series: dict[int, tuple[float, int]]


def compute_stats(records: Iterable[CorpusRecord], merge_successors=False,
                  parties=None, per_speaker=False) -> CorpusStats:
    records = list(records)
    return CorpusStats(count_segments(records, merge_successors, parties),
                       average_age_series(records, per_speaker))


def thousands(n: int) -> int:
    return int((Decimal(n) / 1000).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def count_table(counts: Counter) -> tuple[list[str], list[list]]:
    """Parliament rows with Chair, Comment, then one column per party.

    Party columns hold speech counts only; chair statements and comments
    are counted in their own columns whatever their party.
    """
    parliaments = sorted({k[0] for k in counts})
    party_cols = sorted({k[1] for k in counts if k[2] == "speech" and k[1]})
    has_unknown = any(k[2] == "speech" and not k[1] for k in counts)
    header = ["parliament", "Chair", "Comment", *party_cols]
    if has_unknown:
        header.append("unknown")
    rows = []
    for parl in parliaments:
        row = [parl,
               sum(n for (p, _, k), n in counts.items() if p == parl and k == "chair_speech"),
               sum(n for (p, _, k), n in counts.items() if p == parl and k == "comment")]
        row += [counts.get((parl, party, "speech"), 0) for party in party_cols]
        if has_unknown:
            row.append(counts.get((parl, None, "speech"), 0))
        rows.append(row)
    return header, rows


def write_counts_csv(counts: Counter, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["parliament", "party", "kind", "count"])
        for (parl, party, kind), n in sorted(
                counts.items(), key=lambda kv: (kv[0][0], kv[0][1] or "", kv[0][2])):
            w.writerow([parl, party or "", kind, n])


def write_count_table_csv(counts: Counter, path, in_thousands=False) -> None:
    header, rows = count_table(counts)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if in_thousands:
                row = [row[0], *(thousands(v) for v in row[1:])]
            w.writerow(row)


def write_age_csv(series: dict[int, tuple[float, int]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "average_age", "segments"])
        for year, (mean, n) in sorted(series.items()):
            w.writerow([year, f"{mean:.6f}", n])


def write_stats(stats: CorpusStats, out_dir, figures: bool = True) -> list[Path]:
    """Write the CSV tables (and figures) into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "counts.csv", out / "count_table.csv",
               out / "count_table_thousands.csv", out / "age_series.csv"]
    write_counts_csv(stats.counts, written[0])
    write_count_table_csv(stats.counts, written[1])
    write_count_table_csv(stats.counts, written[2], in_thousands=True)
    write_age_csv(stats.age_series, written[3])
    if figures:
        from . import plotting
        written += plotting.render_all(stats, out)
    return written
