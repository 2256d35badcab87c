"""Character-level edit distances and longest common subsequence.

All functions accept any sequence of hashable, comparable items; the
fingerprint metrics reuse them on sequences of hash values.

The ``optimalAlignment`` distance here permits insertions and deletions
only (no substitution), so it equals ``len(a) + len(b) - 2 * LCS(a, b)``.
``damerauLevenshtein`` is the unrestricted variant (Lowrance-Wagner).
"""

from __future__ import annotations

from typing import Sequence


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Minimum number of single-item insertions, deletions, or substitutions."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    row = list(range(lb + 1))
    for i in range(la):
        ca = a[i]
        prev = row[0]
        row[0] = i + 1
        for j in range(lb):
            cur = row[j + 1]
            x = prev if ca == b[j] else prev + 1
            y = cur + 1
            if y < x:
                x = y
            z = row[j] + 1
            if z < x:
                x = z
            row[j + 1] = x
            prev = cur
    return row[lb]


def lcs_length(a: Sequence, b: Sequence) -> int:
    """Length of the longest common subsequence."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0
    row = [0] * (lb + 1)
    for i in range(la):
        ca = a[i]
        prev = 0
        for j in range(lb):
            cur = row[j + 1]
            if ca == b[j]:
                row[j + 1] = prev + 1
            elif row[j] > cur:
                row[j + 1] = row[j]
            prev = cur
    return row[lb]


def optimal_alignment(a: Sequence, b: Sequence) -> int:
    """Insert/delete-only edit distance."""
    return len(a) + len(b) - 2 * lcs_length(a, b)


def damerau_levenshtein(a: Sequence, b: Sequence) -> int:
    """Unrestricted Damerau-Levenshtein distance.

    Insertions, deletions, substitutions, and transpositions of two
    neighboring items; unlike the restricted variant, a transposed pair may
    be edited again later.
    """
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    inf = la + lb
    # d is offset by one: d[i+1][j+1] is the distance of a[:i] and b[:j].
    d = [[inf] * (lb + 2) for _ in range(la + 2)]
    for i in range(la + 1):
        d[i + 1][1] = i
    for j in range(lb + 1):
        d[1][j + 1] = j
    last_row: dict = {}
    for i in range(1, la + 1):
        ai = a[i - 1]
        last_col = 0
        for j in range(1, lb + 1):
            bj = b[j - 1]
            i_prev = last_row.get(bj, 0)
            j_prev = last_col
            if ai == bj:
                cost = 0
                last_col = j
            else:
                cost = 1
            d[i + 1][j + 1] = min(
                d[i][j] + cost,  # substitution / match
                d[i + 1][j] + 1,  # insertion
                d[i][j + 1] + 1,  # deletion
                d[i_prev][j_prev] + (i - i_prev - 1) + 1 + (j - j_prev - 1),
            )
        last_row[ai] = i
    return d[la + 1][lb + 1]


_DISTANCES = {
    "levenshtein": levenshtein,
    "damerauLevenshtein": damerau_levenshtein,
    "optimalAlignment": optimal_alignment,
}


def edit_distance(kind: str, a: Sequence, b: Sequence) -> int:
    """Dispatch to ``levenshtein``, ``damerauLevenshtein``, or ``optimalAlignment``."""
    try:
        return _DISTANCES[kind](a, b)
    except KeyError:
        raise ValueError(f"unknown edit distance kind: {kind!r}") from None


def edit_similarity(a: Sequence, b: Sequence, distance: int) -> float:
    """Map an edit distance to a similarity: (maxlen - d) / maxlen.

    Two empty sequences are treated as equal (similarity 1).  The
    insert/delete-only distance can exceed the longer length, so the result
    is floored at 0 to stay within [0, 1].
    """
    m = max(len(a), len(b))
    if m == 0:
        return 1.0
    return max((m - distance) / m, 0.0)


def lcs_similarity(a: Sequence, b: Sequence) -> float:
    """LCS length over the length of the longer sequence; both empty -> 1."""
    m = max(len(a), len(b))
    if m == 0:
        return 1.0
    return lcs_length(a, b) / m
