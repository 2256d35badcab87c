"""Winnowing fingerprints over rolling n-gram hashes.

Every character n-gram is hashed with a 64-bit polynomial rolling hash; a
window of ``w`` consecutive hashes slides over the sequence and the minimum
hash of each window (rightmost occurrence on ties) is selected.  The
fingerprint is the sequence of selected hashes in document order, with
consecutive selections of the same position recorded once.
"""

from __future__ import annotations

from dataclasses import dataclass

# Polynomial rolling hash constants: h(c1..cn) = sum(ci * BASE^(n-i)) mod 2^64.
HASH_BASE = 1_000_003
HASH_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class Fingerprint:
    """Selected n-gram hashes with the n-gram start positions they came from."""

    hashes: tuple[int, ...]
    positions: tuple[int, ...]

    def __bool__(self) -> bool:
        return bool(self.hashes)

    def __len__(self) -> int:
        return len(self.hashes)


def ngram_hashes(s: str, n: int) -> list[int]:
    """Rolling 64-bit hash of every character n-gram of ``s``."""
    if len(s) < n:
        return []
    h = 0
    for c in s[:n]:
        h = (h * HASH_BASE + ord(c)) & HASH_MASK
    out = [h]
    # BASE^(n-1) for removing the leading character while rolling.
    top = pow(HASH_BASE, n - 1, 1 << 64)
    for i in range(n, len(s)):
        h = (h - ord(s[i - n]) * top) & HASH_MASK
        h = (h * HASH_BASE + ord(s[i])) & HASH_MASK
        out.append(h)
    return out


def winnow(s: str, n: int, w: int | None = None) -> Fingerprint:
    """Winnowing fingerprint of ``s`` using n-grams of size ``n``.

    ``w`` is the window size in hashes and defaults to ``n``.  An input too
    short for one full n-gram or one full window yields an empty
    fingerprint, which signals that a backup metric is needed.
    """
    if w is None:
        w = n
    if w < 1:
        raise ValueError("window size must be >= 1")
    hashes = ngram_hashes(s, n)
    if len(hashes) < w:
        return Fingerprint((), ())
    selected_h: list[int] = []
    selected_p: list[int] = []
    last_pos = -1
    for start in range(len(hashes) - w + 1):
        min_pos = start
        for k in range(start + 1, start + w):
            if hashes[k] <= hashes[min_pos]:  # rightmost minimum wins ties
                min_pos = k
        if min_pos != last_pos:
            selected_h.append(hashes[min_pos])
            selected_p.append(min_pos)
            last_pos = min_pos
    return Fingerprint(tuple(selected_h), tuple(selected_p))
