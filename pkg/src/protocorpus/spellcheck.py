"""Dictionary-based OCR post-correction.

Lookup uses a symmetric-delete index: every dictionary word is indexed
under all strings obtained by deleting up to two characters, and a query
is matched through its own deletion variants. Candidates are then
verified with a true Levenshtein distance.

The permitted distance grows with word length (see
:func:`max_edit_distance`). MP surnames are injected as protected entries
whose frequency dominates the lexicon, so an OCR-damaged surname resolves
back to the name instead of to an ordinary word, and intact surnames are
never altered.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

INDEX_DISTANCE = 2

_WS_SPLIT = re.compile(r"(\s+)")


def levenshtein(a: str, b: str) -> int:
    """Insert/delete/substitute edit distance, two-row dynamic programming."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1,
                           cur[j - 1] + 1,
                           prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def max_edit_distance(word_length: int) -> int:
    if word_length < 0:
        raise ValueError("word length must be non-negative")
    if word_length <= 3:
        return 0
    if word_length <= 6:
        return 1
    return 2


def deletion_variants(word: str, depth: int) -> set[str]:
    """All strings reachable from ``word`` by deleting at most ``depth`` chars."""
    out = {word}
    frontier = {word}
    for _ in range(depth):
        nxt = set()
        for w in frontier:
            for i in range(len(w)):
                nxt.add(w[:i] + w[i + 1:])
        nxt -= out
        out |= nxt
        frontier = nxt
    return out


@dataclass
class Entry:
    form: str  # surface form emitted as replacement
    frequency: int
    protected: bool = False


@dataclass
class CorrectionDictionary:
    """Frequency lexicon with a delete-neighbourhood index.

    Keys are case-folded; each entry keeps the surface form that is
    written out when it is chosen as a replacement.
    """

    entries: dict[str, Entry] = field(default_factory=dict)
    delete_index: dict[str, set[str]] = field(default_factory=dict)
    max_index_distance: int = INDEX_DISTANCE

    def __contains__(self, token: str) -> bool:
        return token.casefold() in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def frequency(self, token: str) -> int | None:
        e = self.entries.get(token.casefold())
        return e.frequency if e else None

    def is_protected(self, token: str) -> bool:
        e = self.entries.get(token.casefold())
        return bool(e and e.protected)

    def _index(self, key: str) -> None:
        for variant in deletion_variants(key, self.max_index_distance):
            self.delete_index.setdefault(variant, set()).add(key)

    def lookup(self, core: str, max_distance: int) -> tuple[str, int] | None:
        """Best entry key within ``max_distance`` of ``core`` and its distance.

        Ranking: smallest distance, then highest frequency, then the
        lexicographically smallest key.
        """
        if max_distance > self.max_index_distance:
            raise ValueError(
                f"distance {max_distance} exceeds index depth "
                f"{self.max_index_distance}")
        query = core.casefold()
        if query in self.entries:
            return query, 0
        seen = set()
        best = None
        for variant in deletion_variants(query, max_distance):
            for key in self.delete_index.get(variant, ()):
                if key in seen:
                    continue
                seen.add(key)
                if abs(len(key) - len(query)) > max_distance:
                    continue
                d = levenshtein(query, key)
                if d > max_distance:
                    continue
                rank = (d, -self.entries[key].frequency, key)
                if best is None or rank < best:
                    best = rank
        if best is None:
            return None
        return best[2], best[0]


def build_dictionary(lexicon: Iterable[tuple[str, int]],
                     protected_names: Iterable[str] = (),
                     max_index_distance: int = INDEX_DISTANCE
                     ) -> CorrectionDictionary:
    """Index a frequency lexicon plus protected surnames.

    Duplicate tokens (after case folding) keep the larger frequency.
    Protected names get frequency ``max lexicon frequency + 1``.
    """
    d = CorrectionDictionary(max_index_distance=max_index_distance)
    for token, freq in lexicon:
        if not token:
            raise ValueError("lexicon tokens must be non-empty")
        freq = int(freq)
        if freq < 1:
            raise ValueError(f"frequency of {token!r} must be >= 1, got {freq}")
        key = token.casefold()
        old = d.entries.get(key)
        if old is None or freq > old.frequency or (
                freq == old.frequency and token < old.form):
            d.entries[key] = Entry(token, freq)

    top = max((e.frequency for e in d.entries.values()), default=0) + 1
    for name in protected_names:
        name = name.strip()
        if not name:
            continue
        d.entries[name.casefold()] = Entry(name, top, protected=True)

    for key in d.entries:
        d._index(key)
    return d


@dataclass(frozen=True)
class CorrectionResult:
    original: str
    corrected: str
    distance: int
    changed: bool


def split_core(token: str) -> tuple[str, str, str]:
    """Split leading/trailing non-alphanumeric characters off ``token``."""
    i, j = 0, len(token)
    while i < j and not token[i].isalnum():
        i += 1
    while j > i and not token[j - 1].isalnum():
        j -= 1
    return token[:i], token[i:j], token[j:]


def correct_token(token: str, dictionary: CorrectionDictionary
                  ) -> CorrectionResult:
    unchanged = CorrectionResult(token, token, 0, False)
    lead, core, trail = split_core(token)
    if not core or any(ch.isdigit() for ch in core):
        return unchanged
    if core.casefold() in dictionary.entries:
        return unchanged
    hit = dictionary.lookup(core, max_edit_distance(len(core)))
    if hit is None:
        return unchanged
    key, dist = hit
    replacement = dictionary.entries[key].form
    return CorrectionResult(token, lead + replacement + trail, dist, True)


@dataclass(frozen=True)
class ChangeRecord:
    original: str
    corrected: str
    distance: int
    line_index: int
    token_index: int

    def as_dict(self) -> dict:
        return {"original": self.original, "corrected": self.corrected,
                "distance": self.distance, "line_index": self.line_index,
                "token_index": self.token_index}


def correct_lines(lines: Sequence[str], dictionary: CorrectionDictionary
                  ) -> tuple[list[str], list[ChangeRecord]]:
    """Correct every token; whitespace runs are kept byte for byte."""
    out = []
    log = []
    cache: dict[str, CorrectionResult] = {}
    for li, line in enumerate(lines):
        parts = _WS_SPLIT.split(line)
        ti = 0
        for k in range(0, len(parts), 2):  # even slots hold tokens
            tok = parts[k]
            if not tok:
                continue
            res = cache.get(tok)
            if res is None:
                res = cache[tok] = correct_token(tok, dictionary)
            if res.changed:
                parts[k] = res.corrected
                log.append(ChangeRecord(tok, res.corrected, res.distance,
                                        li, ti))
            ti += 1
        out.append("".join(parts))
    return out, log


def load_lexicon(path) -> list[tuple[str, int]]:
    """Read ``token<TAB>frequency`` lines."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            token, sep, freq = line.rpartition("\t")
            if not sep or not token:
                raise ValueError(f"{path}:{n}: expected token<TAB>frequency")
            try:
                rows.append((token, int(freq)))
            except ValueError:
                raise ValueError(f"{path}:{n}: bad frequency {freq!r}") from None
    return rows


def load_names(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip()]
