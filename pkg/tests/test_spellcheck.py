import random
import re
import string

import pytest
from hypothesis import given, settings, strategies as st

from protocorpus.spellcheck import (build_dictionary, correct_lines,
                                    correct_token, deletion_variants,
                                    levenshtein, load_lexicon,
                                    max_edit_distance, split_core)
from support import (levenshtein_oracle, linear_scan_correct, random_lexicon,
                     substitute_one)

ALPHA = string.ascii_lowercase[:12]


@pytest.fixture(scope="module")
def lexicon():
    return random_lexicon(random.Random(7), 1000, ALPHA)


@pytest.fixture(scope="module")
def dictionary(lexicon):
    return build_dictionary(lexicon)


def test_levenshtein_examples():
    assert levenshtein("", "abc") == 3
    assert levenshtein("Bravol", "Bravo") == 1
    assert levenshtein("abc", "abc") == 0


def test_levenshtein_random_pairs():
    rng = random.Random(1)
    for _ in range(200):
        a = "".join(rng.choice("abcde") for _ in range(rng.randint(0, 9)))
        b = "".join(rng.choice("abcde") for _ in range(rng.randint(0, 9)))
        assert levenshtein(a, b) == levenshtein_oracle(a, b)


@settings(max_examples=100, deadline=None)
@given(st.text("abcä", max_size=8), st.text("abcä", max_size=8))
def test_levenshtein_symmetric(a, b):
    d = levenshtein(a, b)
    assert d == levenshtein(b, a)
    assert (d == 0) == (a == b)


@pytest.mark.parametrize("n,expected", [(0, 0), (2, 0), (3, 0), (4, 1), (5, 1),
                                        (6, 1), (7, 2), (20, 2)])
def test_max_edit_distance_table(n, expected):
    assert max_edit_distance(n) == expected


def test_max_edit_distance_monotone():
    vals = [max_edit_distance(n) for n in range(40)]
    assert vals == sorted(vals)


def test_build_dictionary_protected():
    d = build_dictionary([("haus", 100)], ["Mustermann"])
    assert "haus" in d and "Mustermann" in d
    assert d.frequency("Mustermann") == 101
    assert d.is_protected("Mustermann") and not d.is_protected("haus")


def test_build_dictionary_without_names():
    d = build_dictionary([("haus", 100), ("baum", 5)], [])
    assert {k: e.frequency for k, e in d.entries.items()} == {"haus": 100, "baum": 5}


def test_build_dictionary_duplicates_keep_larger():
    d = build_dictionary([("haus", 3), ("haus", 9), ("haus", 4)])
    assert d.frequency("haus") == 9


def test_build_dictionary_rejects_bad_rows():
    with pytest.raises(ValueError):
        build_dictionary([("haus", 0)])
    with pytest.raises(ValueError):
        build_dictionary([("", 3)])


def test_delete_index_complete(lexicon, dictionary):
    # every word is reachable from each of its <=2-deletion variants,
    # enumerated here position by position
    for word, _ in lexicon:
        variants = {word}
        for i in range(len(word)):
            one = word[:i] + word[i + 1:]
            variants.add(one)
            for j in range(len(one)):
                variants.add(one[:j] + one[j + 1:])
        for v in variants:
            assert word in dictionary.delete_index[v]


def test_deletion_variants_small():
    assert deletion_variants("abc", 1) == {"abc", "bc", "ac", "ab"}


def test_bravol():
    d = build_dictionary([("Bravo", 50), ("brav", 80)])
    r = correct_token("Bravol", d)
    assert (r.corrected, r.distance, r.changed) == ("Bravo", 1, True)
    assert correct_token("Bravol!", d).corrected == "Bravo!"


def test_in_dictionary_unchanged():
    d = build_dictionary([("haus", 10)])
    r = correct_token("haus", d)
    assert (r.corrected, r.distance, r.changed) == ("haus", 0, False)
    assert not correct_token("Haus", d).changed


def test_digits_never_corrected():
    d = build_dictionary([("drucksache", 10), ("abcdefg", 10)])
    assert not correct_token("abcdef1", d).changed
    assert not correct_token("12/345", d).changed


def test_short_words_untouched():
    d = build_dictionary([("das", 1000)])
    assert not correct_token("dar", d).changed


def test_split_core():
    assert split_core("„Bravol!“") == ("„", "Bravol", "!“")
    assert split_core("...") == ("...", "", "")


def test_protected_name_shadows_word():
    # "mustermaxn" is one substitution from both
    d = build_dictionary([("mustermaxx", 5000)], ["Mustermann"])
    assert correct_token("mustermaxn", d).corrected == "Mustermann"
    assert not correct_token("Mustermann", d).changed


def test_ranking_frequency_then_lexicographic():
    d = build_dictionary([("abcdefgh", 10), ("abcdefgx", 20), ("abcdefgy", 20)])
    assert correct_token("abcdefgz", d).corrected == "abcdefgx"


def test_fixpoint_whole_lexicon(lexicon, dictionary):
    for word, _ in lexicon:
        assert not correct_token(word, dictionary).changed


def test_substitutions_match_linear_scan(lexicon, dictionary):
    rng = random.Random(99)
    table = {w: (w, f) for w, f in lexicon}
    long_words = [w for w, _ in lexicon if len(w) >= 7]
    for _ in range(200):
        bad = substitute_one(rng, rng.choice(long_words), ALPHA)
        got = correct_token(bad, dictionary)
        assert got.corrected == linear_scan_correct(bad, table)
        if got.changed:
            assert got.distance == levenshtein(bad, got.corrected)
            assert got.distance <= max_edit_distance(len(bad))


@settings(max_examples=80, deadline=None)
@given(st.text(ALPHA + ".,!", min_size=1, max_size=12))
def test_idempotent(dictionary, token):
    once = correct_token(token, dictionary).corrected
    assert correct_token(once, dictionary).corrected == once


def test_correct_lines_noop():
    d = build_dictionary([("haus", 3)])
    lines, log = correct_lines(["haus  haus\thaus"], d)
    assert lines == ["haus  haus\thaus"] and log == []


def test_correct_lines_bravol():
    d = build_dictionary([("Bravo", 3)])
    lines, log = correct_lines(["Bravol Bravol"], d)
    assert lines == ["Bravo Bravo"]
    assert [(c.token_index, c.corrected) for c in log] == [(0, "Bravo"), (1, "Bravo")]


def test_correct_lines_tokenwise(dictionary):
    rng = random.Random(5)
    words = [w for w in dictionary.entries][:200]
    lines = []
    for _ in range(30):
        toks = [substitute_one(rng, w, ALPHA) if rng.random() < 0.5 else w
                for w in rng.sample(words, 6)]
        lines.append("  ".join(toks) + " ")
    out, log = correct_lines(lines, dictionary)
    for src, dst in zip(lines, out):
        assert dst.split() == [correct_token(t, dictionary).corrected for t in src.split()]
        assert re.findall(r"\s+", src) == re.findall(r"\s+", dst)
    for ch in log:
        assert out[ch.line_index].split()[ch.token_index] == ch.corrected


def test_load_lexicon(tmp_path):
    p = tmp_path / "lex.tsv"
    p.write_text("haus\t12\nBravo\t3\n\n", encoding="utf-8")
    assert load_lexicon(p) == [("haus", 12), ("Bravo", 3)]
    p.write_text("haus 12\n", encoding="utf-8")
    with pytest.raises(ValueError, match="lex.tsv:1"):
        load_lexicon(p)
