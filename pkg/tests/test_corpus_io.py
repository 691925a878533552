import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from protocorpus.corpus_io import (FIELD_NAMES, CorpusFormatError, CorpusRecord,
                                   dump_records, merge_files, read_corpus,
                                   session_path, to_record, write_corpus)
from protocorpus.metadata import Roster, RosterEntry, SpeakerKind, SpeakerRef
from protocorpus.segmenter import Segment, SegmentKind
from support import generated_corpus, generated_records


@pytest.fixture
def roster():
    return Roster([RosterEntry("m1", "Max", "Mustermann", 1960, "SPD", "Nord",
                               "social democratic", "", "BT", 1)])


def seg(pos, kind=SegmentKind.SPEECH, speaker=None, text="t", party=None):
    speaker = speaker or SpeakerRef(SpeakerKind.MP, "m1")
    return Segment(f"BT-1-1-{pos}", kind, speaker, party, text, pos, "BT", 1, 1)


def four_segments():
    return [seg(0, SegmentKind.CHAIR, SpeakerRef(SpeakerKind.CHAIR)),
            seg(1, party="SPD"),
            seg(2, SegmentKind.COMMENT, SpeakerRef.unknown(), "Beifall"),
            seg(3, party="SPD")]


def test_four_segments(roster):
    buf = io.StringIO()
    assert write_corpus(four_segments(), roster, None, buf) == 4
    lines = buf.getvalue().splitlines()
    assert len(lines) == 5  # plus end marker
    ids = [json.loads(ln)["segment_id"] for ln in lines[:4]]
    assert len(set(ids)) == 4


def test_key_order_and_nulls(roster):
    buf = io.StringIO()
    write_corpus([seg(0, SegmentKind.COMMENT, SpeakerRef.unknown())], roster, None, buf)
    d = json.loads(buf.getvalue().splitlines()[0])
    assert tuple(d) == FIELD_NAMES
    assert d["speaker_kind"] == "unknown"
    for key in ("mp_id", "first_name", "last_name", "birth_year", "constituency", "date"):
        assert key in d and d[key] is None


def test_round_trip_joins_roster(roster):
    buf = io.StringIO()
    segs = four_segments()
    write_corpus(segs, roster, None, buf)
    recs = read_corpus(io.StringIO(buf.getvalue()))
    assert recs == [to_record(s, roster) for s in segs]
    assert recs[1].last_name == "Mustermann" and recs[1].birth_year == 1960
    assert recs[1].alignment == "social democratic"


def test_empty_file(tmp_path):
    p = tmp_path / "empty.jsonl"
    p.write_text("", encoding="utf-8")
    assert read_corpus(p) == []


def test_thousand_records_double_round_trip():
    recs = generated_records(n_docs=16, seed=5, n_turns=40)
    assert len(recs) >= 1000
    recs = recs[:1000]
    once = dump_records(recs)
    again = dump_records(read_corpus(io.StringIO(once)))
    assert once == again
    assert once.encode("utf-8") == again.encode("utf-8")


def test_duplicate_id_rejected():
    rec = generated_records(n_docs=1, n_turns=3)[0]
    text = rec.to_json() + "\n" + rec.to_json() + "\n"
    with pytest.raises(CorpusFormatError, match="line 2.*duplicate"):
        read_corpus(io.StringIO(text))


def test_malformed_line_reports_number():
    recs = generated_records(n_docs=1, n_turns=3)[:2]
    text = recs[0].to_json() + "\n{broken\n"
    with pytest.raises(CorpusFormatError, match="line 2"):
        read_corpus(io.StringIO(text))


def test_truncated_file_detected():
    text = dump_records(generated_records(n_docs=1, n_turns=5))
    cut = "".join(text.splitlines(keepends=True)[:-1])
    with pytest.raises(CorpusFormatError, match="truncated"):
        read_corpus(io.StringIO(cut))


def test_sentinel_count_mismatch():
    recs = generated_records(n_docs=1, n_turns=5)
    text = dump_records(recs).splitlines(keepends=True)
    del text[0]
    with pytest.raises(CorpusFormatError, match="end marker"):
        read_corpus(io.StringIO("".join(text)))


def test_count_conservation(tmp_path):
    segments, parl, cal = generated_corpus(n_docs=3, seed=2)
    path = tmp_path / "c.jsonl"
    assert write_corpus(segments, parl.roster, cal, path, parl.parties) == len(segments)
    assert len(read_corpus(path)) == len(segments)


def test_merge_files(tmp_path):
    segments, parl, cal = generated_corpus(n_docs=3, seed=2)
    paths = []
    for s in (1, 2, 3):
        p = session_path(tmp_path / "out", "Testland", 1, s)
        write_corpus([x for x in segments if x.session == s], parl.roster, cal, p)
        paths.append(p)
    assert paths[0] == tmp_path / "out" / "Testland" / "1" / "1.jsonl"
    n = merge_files(paths, tmp_path / "corpus.jsonl")
    assert n == len(segments)
    merged = read_corpus(tmp_path / "corpus.jsonl")
    assert [r.segment_id for r in merged] == [s.segment_id for s in segments]


optional_text = st.none() | st.text(max_size=10)


@st.composite
def records(draw):
    n = draw(st.integers(0, 6))
    out = []
    for k in range(n):
        out.append(CorpusRecord(
            segment_id=f"X-1-1-{k}", parliament="X", period=1, session=1,
            date=draw(st.none() | st.just("2001-02-03")), estimated_date=draw(st.booleans()),
            kind=draw(st.sampled_from(["speech", "chair_speech", "comment"])),
            speaker_kind=draw(st.sampled_from(["mp", "chair", "unknown", "ambiguous"])),
            mp_id=draw(optional_text), first_name=draw(optional_text),
            last_name=draw(optional_text), party=draw(optional_text),
            alignment=draw(optional_text), birth_year=draw(st.none() | st.integers(1850, 2010)),
            constituency=draw(optional_text), text=draw(st.text(max_size=30)),
            text_original=draw(optional_text), position=k,
            attributed_mps=tuple(draw(st.lists(st.text(max_size=4), max_size=3))),
            attributed_parties=tuple(draw(st.lists(st.text(max_size=4), max_size=3)))))
    return out


@settings(max_examples=80, deadline=None)
@given(records())
def test_write_read_write_identity(recs):
    once = dump_records(recs)
    back = read_corpus(io.StringIO(once))
    assert back == recs
    assert dump_records(back) == once
