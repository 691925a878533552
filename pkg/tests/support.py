"""Independent oracles and fixture builders shared by the test modules.

Oracles here deliberately avoid the code paths they check: Otsu by exact
rational arithmetic on the textbook two-class formula, edit distance by a
memoized recursion, correction by linear scan over the whole lexicon.
"""

from __future__ import annotations

import random
import string
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from protocorpus import synthetic
from protocorpus.preprocess import GrayBitmap


# -- acceptance reporting ------------------------------------------------

ACCEPTANCE: list[str] = []


def criterion(name: str, ok: bool, detail: str = "") -> None:
    """Record one pass/fail line for the terminal summary, then assert."""
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


# -- preprocess ----------------------------------------------------------

def otsu_brute_force(hist) -> int:
    """Maximize w0*w1*(mu0-mu1)^2 over all 256 cuts, exactly; first max wins."""
    counts = [int(c) for c in hist]
    total = sum(counts)
    best_t, best = 0, Fraction(-1)
    for t in range(256):
        lo = counts[:t + 1]
        hi = counts[t + 1:]
        n0, n1 = sum(lo), sum(hi)
        if n0 == 0 or n1 == 0:
            var = Fraction(0)
        else:
            mu0 = Fraction(sum(i * c for i, c in enumerate(lo)), n0)
            mu1 = Fraction(sum((t + 1 + i) * c for i, c in enumerate(hi)), n1)
            var = Fraction(n0, total) * Fraction(n1, total) * (mu0 - mu1) ** 2
        if var > best:
            best_t, best = t, var
    return best_t


def stripe_page(height=301, width=401, period=12, thickness=3) -> GrayBitmap:
    px = np.full((height, width), 255, dtype=np.uint8)
    for y in range(20, height - 20, period):
        px[y:y + thickness, 30:width - 30] = 0
    return GrayBitmap(px)


# -- spellcheck ----------------------------------------------------------

def levenshtein_oracle(a: str, b: str) -> int:
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1,
                   d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))
    return d(len(a), len(b))


def bound_oracle(n: int) -> int:
    return 0 if n <= 3 else 1 if n <= 6 else 2


def linear_scan_correct(core: str, lexicon: dict[str, tuple[str, int]]) -> str:
    """Expected replacement for an alphabetic core.

    ``lexicon`` maps case-folded key -> (surface form, frequency).
    """
    q = core.casefold()
    if q in lexicon:
        return core
    limit = bound_oracle(len(core))
    best = None
    for key, (form, freq) in lexicon.items():
        dist = levenshtein_oracle(q, key)
        if dist <= limit:
            rank = (dist, -freq, key)
            if best is None or rank < best:
                best = rank
    return core if best is None else lexicon[best[2]][0]


def random_lexicon(rng: random.Random, n=1000, alphabet=string.ascii_lowercase[:12]):
    words = set()
    while len(words) < n:
        words.add("".join(rng.choice(alphabet) for _ in range(rng.randint(3, 12))))
    return [(w, rng.randint(1, 5000)) for w in sorted(words)]


def substitute_one(rng: random.Random, word: str, alphabet) -> str:
    i = rng.randrange(len(word))
    ch = rng.choice([c for c in alphabet if c != word[i]])
    return word[:i] + ch + word[i + 1:]


# -- pipeline workspace --------------------------------------------------

def build_workspace(root: Path, n_docs=4, seed=0, n_turns=30, parliament="Testland",
                    period=1, lexicon=True, **gen_kwargs):
    """Write inputs, metadata and a config; return (config path, protocols)."""
    parl = synthetic.make_parliament(seed, parliament, period)
    rng = random.Random(seed)
    protocols = [synthetic.generate_protocol(rng, parl, session=s + 1,
                                             n_turns=n_turns, **gen_kwargs)
                 for s in range(n_docs)]
    raw = root / "raw" / parliament / str(period)
    raw.mkdir(parents=True, exist_ok=True)
    for p in protocols:
        (raw / f"{p.doc.session_numbers[0]}.txt").write_text(
            synthetic.paginate(p.doc.lines), encoding="utf-8")
    synthetic.write_roster_csv(parl.entries, root / "roster.csv")
    synthetic.write_parties_csv(parl.parties, root / "parties.csv")
    synthetic.write_sessions_csv(synthetic.session_records(protocols, parl),
                                 root / "sessions.csv")
    lines = [f"inputs:\n  {parliament}: raw/{parliament}",
             "roster: roster.csv", "parties: parties.csv",
             "sessions: sessions.csv", "output_root: build", "workers: 1"]
    if lexicon:
        words = sorted(set(synthetic.vocabulary()) | {"Bravo"})
        (root / "lexicon.tsv").write_text(
            "".join(f"{w}\t{100 + k}\n" for k, w in enumerate(words)),
            encoding="utf-8")
        lines.append("lexicon: lexicon.tsv")
    cfg = root / "config.yaml"
    cfg.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return cfg, protocols, parl


def generated_corpus(n_docs=4, seed=0, n_turns=30, parliament="Testland", period=1):
    """Segment freshly generated protocols; return (segments, parliament, calendar)."""
    from protocorpus.metadata import SessionCalendar
    from protocorpus.segmenter import find_session_body, split_speeches

    parl = synthetic.make_parliament(seed, parliament, period)
    rng = random.Random(seed)
    protocols = [synthetic.generate_protocol(rng, parl, session=s + 1, n_turns=n_turns)
                 for s in range(n_docs)]
    calendar = SessionCalendar(synthetic.session_records(protocols, parl))
    segments = []
    for p in protocols:
        body = find_session_body(p.doc.lines)
        segments += split_speeches(p.doc, body, parl.roster, parl.parties, calendar)
    return segments, parl, calendar


def generated_records(n_docs=4, seed=0, n_turns=30, **kw):
    from protocorpus.corpus_io import to_record

    segments, parl, calendar = generated_corpus(n_docs, seed, n_turns, **kw)
    return [to_record(s, parl.roster, calendar, parl.parties) for s in segments]


def anchor(seg) -> int:
    """Absolute index of the first non-blank line of a segment."""
    return seg.start_line + next(i for i, ln in enumerate(seg.source) if ln.strip())


def truth_tuples(protocol):
    return [(t.anchor, t.kind, t.speaker) for t in protocol.truth]


def segment_tuples(segments):
    return [(anchor(s), s.kind, s.speaker.mp_id) for s in segments]


def f1(got, expected) -> float:
    g, e = set(got), set(expected)
    if not g and not e:
        return 1.0
    tp = len(g & e)
    if tp == 0:
        return 0.0
    p, r = tp / len(g), tp / len(e)
    return 2 * p * r / (p + r)
