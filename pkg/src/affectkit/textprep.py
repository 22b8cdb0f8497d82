"""Tweet normalization, tokenization and hashtag segmentation.

Segmentation maximizes the product of unigram probabilities.  Scores are
kept as exact rationals so that ties (which are common with small count
tables) are resolved by the documented rule instead of by rounding noise.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

MAX_SEGMENT_LEN = 24
UNKNOWN_NUMERATOR = 10
UNKNOWN_BASE = 1000


class WordFreq:
    """Unigram counts with a corpus total.

    ``total`` defaults to the sum of the counts; it may be set larger when
    the table is a truncated view of a bigger corpus.
    """

    def __init__(self, counts: Mapping[str, int], total: int | None = None):
        self.counts = {w: int(c) for w, c in counts.items() if int(c) >= 1}
        observed = sum(self.counts.values())
        if total is None:
            total = observed
        if total < observed:
            raise ValueError(f"total {total} is smaller than the summed counts {observed}")
        self.total = max(int(total), 1)
        self._segment = lru_cache(maxsize=65536)(self._segment_uncached)

    def __contains__(self, word):
        return word in self.counts

    def __len__(self):
        return len(self.counts)

    def probability(self, word: str) -> Fraction:
        count = self.counts.get(word)
        if count is not None:
            return Fraction(count, self.total)
        return Fraction(UNKNOWN_NUMERATOR, self.total * UNKNOWN_BASE ** len(word))

    def score(self, segments: Iterable[str]) -> Fraction:
        p = Fraction(1)
        for s in segments:
            p *= self.probability(s)
        return p

    def segment(self, word: str) -> list[str]:
        return list(self._segment(word))

    def _segment_uncached(self, word: str) -> tuple[str, ...]:
        n = len(word)
        if n == 0:
            return ()
        # best[i] = (score, n_segments, segments) for word[:i]; the ordering
        # key (-score, n_segments, segments) is preserved by appending a
        # common last segment, so the DP is exact for the full tie rule.
        best: list[tuple[Fraction, int, tuple[str, ...]] | None] = [None] * (n + 1)
        best[0] = (Fraction(1), 0, ())
        for end in range(1, n + 1):
            cand = None
            for start in range(max(0, end - MAX_SEGMENT_LEN), end):
                prev = best[start]
                piece = word[start:end]
                entry = (prev[0] * self.probability(piece), prev[1] + 1, prev[2] + (piece,))
                if cand is None or _better(entry, cand):
                    cand = entry
            best[end] = cand
        return best[n][2]


def _better(a, b) -> bool:
    if a[0] != b[0]:
        return a[0] > b[0]
    if a[1] != b[1]:
        return a[1] < b[1]
    return a[2] < b[2]


def _as_freq(freq) -> WordFreq | None:
    if freq is None or isinstance(freq, WordFreq):
        return freq
    return WordFreq(freq)


def segment_word(word: str, freq) -> list[str]:
    """Split a concatenated lowercase word (typically a hashtag body).

    Among all splits into pieces of at most 24 characters, returns the one
    with the highest unigram probability product; ties go to fewer pieces,
    then to the lexicographically smallest piece sequence.
    """
    if not word:
        return []
    return _as_freq(freq).segment(word)


def clean_text(raw_text: str) -> str:
    """Lowercase and replace every non-alphanumeric character with a space."""
    return "".join(ch if ch.isalnum() else " " for ch in raw_text.lower())


def normalize_tokenize(raw_text: str, vocab=None, freq=None) -> list[str]:
    """Tokenize a tweet; tokens outside ``vocab`` are segmented with ``freq``.

    With ``vocab`` or ``freq`` missing, no segmentation is attempted.
    """
    tokens = clean_text(raw_text).split()
    freq = _as_freq(freq)
    if vocab is None or freq is None or len(freq) == 0:
        return tokens
    out = []
    for tok in tokens:
        if tok in vocab:
            out.append(tok)
        else:
            out.extend(freq.segment(tok))
    return out


def tokenize_instances(instances, vocab=None, freq=None):
    freq = _as_freq(freq)
    for inst in instances:
        inst.tokens = normalize_tokenize(inst.raw_text, vocab, freq)
    return instances
