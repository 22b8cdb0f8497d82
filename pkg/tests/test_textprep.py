from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from affectkit import textprep
from affectkit.textprep import WordFreq, normalize_tokenize, segment_word

from oracles import SEG_FREQ, SEG_TOTAL, SEG_WORDS, brute_force_segment

FREQ = WordFreq(SEG_FREQ, SEG_TOTAL)


def test_iloveyou_matches_enumeration():
    freq = WordFreq({"i": 100, "love": 50, "you": 80}, total=1000)
    got = segment_word("iloveyou", freq)
    expected, _ = brute_force_segment("iloveyou", {"i": 100, "love": 50, "you": 80}, 1000)
    assert got == expected == ["i", "love", "you"]


def test_known_word_kept_whole():
    assert segment_word("love", FREQ) == ["love"]


def test_unknown_pair_stays_whole():
    freq = WordFreq({"a": 500}, total=1000)
    assert segment_word("zq", freq) == ["zq"]
    # one unknown piece: 10/(N*1000^2); two: 100/(N^2*1000^2), smaller once N > 10
    assert freq.score(["zq"]) > freq.score(["z", "q"])
    assert segment_word("zq", freq) == brute_force_segment("zq", {"a": 500}, 1000)[0]


def test_empty_word():
    assert segment_word("", FREQ) == []


def test_probability_formula():
    assert FREQ.probability("love") == Fraction(50, 1000)
    assert FREQ.probability("qqq") == Fraction(10, 1000 * 1000 ** 3)


@pytest.mark.parametrize("word", [w for w in SEG_WORDS if len(w) <= 12])
def test_segment_equals_brute_force(word):
    expected, best = brute_force_segment(word, SEG_FREQ, SEG_TOTAL)
    got = segment_word(word, FREQ)
    assert got == expected
    assert FREQ.score(got) == best


def test_tie_breaks_fewer_then_lexicographic():
    # "ab"+"c" and "a"+"bc" have equal probability; "abc" unknown loses
    freq = WordFreq({"ab": 1, "c": 1, "a": 1, "bc": 1}, total=4)
    assert segment_word("abc", freq) == ["a", "bc"]
    # whole word ties with a two-piece split -> fewer pieces wins
    freq = WordFreq({"x": 2, "xx": 1}, total=4)
    assert freq.score(["xx"]) == freq.score(["x", "x"]) == Fraction(1, 4)
    assert segment_word("xx", freq) == ["xx"]


def test_max_segment_length():
    word = "b" * 30
    freq = WordFreq({word: 1000, "b": 1})
    pieces = segment_word(word, freq)
    assert "".join(pieces) == word
    assert max(map(len, pieces)) <= 24


@given(st.text("abcdefgilnorstuvy", min_size=0, max_size=16))
def test_segments_concatenate_to_input(word):
    assert "".join(segment_word(word, FREQ)) == word


@given(st.text("ailnoveuyds", min_size=1, max_size=9))
def test_segment_score_at_least_brute_force(word):
    _, best = brute_force_segment(word, SEG_FREQ, SEG_TOTAL)
    assert FREQ.score(segment_word(word, FREQ)) >= best


def test_normalize_examples():
    assert normalize_tokenize("I LOVE you!!") == ["i", "love", "you"]
    assert normalize_tokenize("😀😀") == []
    vocab = {"i", "love", "you"}
    freq = WordFreq({"i": 100, "love": 50, "you": 80}, total=1000)
    assert normalize_tokenize("#iloveyou", vocab, freq) == ["i", "love", "you"]


def test_digits_kept():
    assert normalize_tokenize("top 10 #2day") == ["top", "10", "2day"]


def test_no_segmentation_without_table():
    assert normalize_tokenize("#iloveyou", {"i"}, None) == ["iloveyou"]


@given(st.text(max_size=40))
def test_tokens_are_lowercase_alnum(text):
    for tok in normalize_tokenize(text, {"love"}, FREQ):
        assert tok and all(ch.isalnum() for ch in tok)
        assert tok == tok.lower() or not tok.lower().isalnum()


@given(st.text(max_size=40))
def test_normalize_idempotent(text):
    vocab = {"i", "love", "you", "good"}
    once = normalize_tokenize(text, vocab, FREQ)
    assert normalize_tokenize(" ".join(once), vocab, FREQ) == once


def test_tokenize_instances_sets_tokens():
    from affectkit.dataio import LabeledInstance
    inst = [LabeledInstance("a", "Good DAY :)")]
    textprep.tokenize_instances(inst)
    assert inst[0].tokens == ["good", "day"]
