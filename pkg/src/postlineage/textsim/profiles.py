"""Profile-based similarity: feature vectors compared by cosine or Manhattan.

Each distinct feature (token, n-gram, or n-shingle) is one dimension of a
vector space.  Weights are boolean presence, raw term frequency, or a
BM15-dampened term frequency that lowers the effect of very frequent terms.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Hashable, Mapping, Sequence

# BM15 parameter k; the weight of a term with raw frequency f is
# f * (k + 1) / (f + k), strictly increasing in f and bounded by k + 1.
BM15_K = 1.5

Profile = Mapping[Hashable, float]


def build_profile(features: Sequence[Hashable], weighting: str) -> dict:
    """Weight vector over the distinct features of ``features``."""
    counts = Counter(features)
    if weighting == "bool":
        return {f: 1.0 for f in counts}
    if weighting == "tf":
        return {f: float(c) for f, c in counts.items()}
    if weighting == "normalizedTF":
        return {f: c * (BM15_K + 1.0) / (c + BM15_K) for f, c in counts.items()}
    raise ValueError(f"unknown profile weighting: {weighting!r}")


def cosine_similarity(p1: Profile, p2: Profile) -> float:
    """Cosine of the angle between two profiles.

    Two empty profiles compare as equal (1.0); one empty yields 0.0.
    Identical profiles short-circuit to exactly 1.0.  Summation runs over
    sorted dimensions so the result is exactly symmetric.
    """
    if not p1 and not p2:
        return 1.0
    if not p1 or not p2:
        return 0.0
    if p1 == p2:
        return 1.0
    dot = sum(p1[f] * p2[f] for f in sorted(set(p1) & set(p2)))
    n1 = math.sqrt(sum(w * w for w in p1.values()))
    n2 = math.sqrt(sum(w * w for w in p2.values()))
    value = dot / (n1 * n2)
    return min(max(value, 0.0), 1.0)


def manhattan_similarity(p1: Profile, p2: Profile) -> float:
    """Manhattan (L1) distance mapped into [0, 1].

    Defined as ``1 - L1(p1, p2) / (|p1| + |p2|)`` with L1 norms in the
    denominator, which is 1 exactly for identical profiles and 0 for
    profiles with disjoint dimensions.  Empty-profile conventions as in
    :func:`cosine_similarity`.
    """
    if not p1 and not p2:
        return 1.0
    if not p1 or not p2:
        return 0.0
    dist = sum(abs(p1.get(f, 0.0) - p2.get(f, 0.0)) for f in sorted(set(p1) | set(p2)))
    total = sum(p1.values()) + sum(p2.values())
    value = 1.0 - dist / total
    return min(max(value, 0.0), 1.0)
