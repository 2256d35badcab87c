"""Feature extraction: whitespace tokens, character n-grams, token shingles."""

from __future__ import annotations

from typing import Sequence

# Sentinel used for n-gram padding; outside every normalized alphabet.
PAD_CHAR = "\x00"


def tokenize(s: str) -> list[str]:
    """Split on whitespace runs; order is preserved for shingling."""
    return s.split()


def ngrams(s: str, n: int, padded: bool = False) -> list[str]:
    """All character n-grams of ``s``, in order, as a multiset.

    With ``padded`` the string is framed by ``n - 1`` sentinel characters on
    each side, which emphasizes its beginning and end.  Without padding a
    string shorter than ``n`` yields no n-grams, which signals that a backup
    metric is needed.
    """
    if padded:
        pad = PAD_CHAR * (n - 1)
        s = pad + s + pad
    return [s[i : i + n] for i in range(len(s) - n + 1)]


def shingles(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    """All n-shingles (tuples of n consecutive tokens), in order."""
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def set_coefficient(kind: str, a: set, b: set) -> float:
    """Jaccard, Dice, or Overlap coefficient of two sets.

    Two empty sets compare as equal (1.0); exactly one empty set yields 0.0.
    """
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    inter = len(a & b)
    if kind == "jaccard":
        return inter / len(a | b)
    if kind == "dice":
        return 2.0 * inter / (len(a) + len(b))
    if kind == "overlap":
        return inter / min(len(a), len(b))
    raise ValueError(f"unknown set coefficient: {kind!r}")
