"""The similarity metric catalog: configurations, registry, and dispatch.

A metric configuration combines a base metric with its variant knobs
(n-gram/shingle size, input normalization, n-gram padding, profile
weighting).  The full catalog enumerates to exactly 134 configurations:

* edit (8): levenshtein, damerauLevenshtein, optimalAlignment,
  longestCommonSubsequence, each plain and normalized;
* set (54): n-gram Jaccard/Dice/Overlap for n in 2..5 (plain, normalized,
  and normalized+padded), shingle coefficients for n in 2..3 and token
  coefficients (plain and normalized);
* profile (28): cosine over n-grams/shingles/tokens with bool, term
  frequency, and BM15 weighting, plus Manhattan over the same features;
  profile metrics always normalize their input, so cosine names carry the
  weighting suffix while Manhattan names carry an explicit ``Normalized``;
* fingerprint (40): Winnowing n-gram fingerprints for n in 2..5 compared
  with Jaccard/Dice/Overlap/LCS/OptimalAlignment, plain and normalized;
* equal (4): equal and tokenEqual, plain and normalized.

Every metric maps two strings to [0, 1].  A metric that cannot represent an
input (n-gram or shingle extraction on a too-short string, Winnowing input
shorter than the window) raises :class:`NotApplicableError` so the caller
can fall back to a backup metric.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .editdist import (
    edit_distance,
    edit_similarity,
    lcs_length,
    lcs_similarity,
    optimal_alignment,
)
from .features import ngrams, set_coefficient, shingles, tokenize
from .normalize import normalize_for_edit, normalize_for_ngram, normalize_for_shingle
from .profiles import build_profile, cosine_similarity, manhattan_similarity
from .winnowing import Fingerprint, winnow

NGRAM_SIZES = (2, 3, 4, 5)
SHINGLE_SIZES = (2, 3)

_SIZE_WORDS = {2: "Two", 3: "Three", 4: "Four", 5: "Five"}
_COEFFICIENTS = ("jaccard", "dice", "overlap")
_FP_COEFFICIENTS = ("jaccard", "dice", "overlap", "lcs", "oa")
_FP_COEFF_WORDS = {
    "jaccard": "Jaccard",
    "dice": "Dice",
    "overlap": "Overlap",
    "lcs": "LongestCommonSubsequence",
    "oa": "OptimalAlignment",
}
_WEIGHTINGS = ("bool", "tf", "normalizedTF")
_WEIGHT_WORDS = {"bool": "Bool", "tf": "TermFrequency", "normalizedTF": "NormalizedTermFrequency"}
_WEIGHT_ABBREV = {"bool": "Bool", "tf": "TF", "normalizedTF": "NormalizedTF"}


class NotApplicableError(ValueError):
    """The metric cannot represent one of the inputs; use the backup metric."""


@dataclass(frozen=True)
class MetricConfig:
    """One entry of the similarity metric catalog."""

    name: str
    family: str  # edit | set | profile | fingerprint | equal
    base: str
    n: int | None = None
    normalized: bool = False
    padded: bool = False
    weighting: str | None = None  # bool | tf | normalizedTF (profile)
    coefficient: str | None = None  # jaccard | dice | overlap | lcs | oa
    distance: str | None = None  # cosine | manhattan (profile)
    feature: str | None = None  # token | ngram | shingle

    def __str__(self) -> str:  # pragma: no cover
        return self.name


@dataclass(frozen=True)
class SimilarityScore:
    """Metric value plus a flag distinguishing true string equality.

    ``is_equal`` is true only when the raw inputs are string-equal, which
    separates equal contents from contents that merely score 1.0.
    """

    value: float
    is_equal: bool


def _build_catalog() -> list[MetricConfig]:
    configs: list[MetricConfig] = []

    def add(name: str, **kw) -> None:
        configs.append(MetricConfig(name=name, **kw))

    # --- edit ---
    for base in ("levenshtein", "damerauLevenshtein", "optimalAlignment", "longestCommonSubsequence"):
        for norm in (False, True):
            add(base + ("Normalized" if norm else ""), family="edit", base=base, normalized=norm)

    # --- set ---
    for n in NGRAM_SIZES:
        for coeff in _COEFFICIENTS:
            stem = f"{_SIZE_WORDS[n].lower()}Gram{coeff.capitalize()}"
            base = f"nGram{coeff.capitalize()}"
            add(stem, family="set", base=base, n=n, coefficient=coeff, feature="ngram")
            add(stem + "Normalized", family="set", base=base, n=n, normalized=True,
                coefficient=coeff, feature="ngram")
            add(stem + "NormalizedPadded", family="set", base=base, n=n, normalized=True,
                padded=True, coefficient=coeff, feature="ngram")
    for n in SHINGLE_SIZES:
        for coeff in _COEFFICIENTS:
            stem = f"{_SIZE_WORDS[n].lower()}Shingle{coeff.capitalize()}"
            base = f"nShingle{coeff.capitalize()}"
            for norm in (False, True):
                add(stem + ("Normalized" if norm else ""), family="set", base=base, n=n,
                    normalized=norm, coefficient=coeff, feature="shingle")
    for coeff in _COEFFICIENTS:
        for norm in (False, True):
            add(f"token{coeff.capitalize()}" + ("Normalized" if norm else ""), family="set",
                base=f"token{coeff.capitalize()}", normalized=norm, coefficient=coeff,
                feature="token")

    # --- profile (input always normalized) ---
    for n in NGRAM_SIZES:
        for weighting in _WEIGHTINGS:
            add(f"cosine{_SIZE_WORDS[n]}Gram{_WEIGHT_WORDS[weighting]}", family="profile",
                base=f"cosineNGram{_WEIGHT_ABBREV[weighting]}", n=n, normalized=True,
                weighting=weighting, distance="cosine", feature="ngram")
    for n in SHINGLE_SIZES:
        for weighting in _WEIGHTINGS:
            add(f"cosine{_SIZE_WORDS[n]}Shingle{_WEIGHT_WORDS[weighting]}", family="profile",
                base=f"cosineNShingle{_WEIGHT_ABBREV[weighting]}", n=n, normalized=True,
                weighting=weighting, distance="cosine", feature="shingle")
    for weighting in _WEIGHTINGS:
        add(f"cosineToken{_WEIGHT_WORDS[weighting]}", family="profile",
            base=f"cosineToken{_WEIGHT_ABBREV[weighting]}", normalized=True,
            weighting=weighting, distance="cosine", feature="token")
    for n in NGRAM_SIZES:
        add(f"manhattan{_SIZE_WORDS[n]}GramNormalized", family="profile", base="manhattanNGram",
            n=n, normalized=True, weighting="tf", distance="manhattan", feature="ngram")
    for n in SHINGLE_SIZES:
        add(f"manhattan{_SIZE_WORDS[n]}ShingleNormalized", family="profile",
            base="manhattanNShingle", n=n, normalized=True, weighting="tf",
            distance="manhattan", feature="shingle")
    add("manhattanTokenNormalized", family="profile", base="manhattanToken", normalized=True,
        weighting="tf", distance="manhattan", feature="token")

    # --- fingerprint ---
    for n in NGRAM_SIZES:
        for coeff in _FP_COEFFICIENTS:
            stem = f"winnowing{_SIZE_WORDS[n]}Gram{_FP_COEFF_WORDS[coeff]}"
            base = f"winnowingNGram{_FP_COEFF_WORDS[coeff]}"
            for norm in (False, True):
                add(stem + ("Normalized" if norm else ""), family="fingerprint", base=base,
                    n=n, normalized=norm, coefficient=coeff, feature="ngram")

    # --- equal ---
    for base, feature in (("equal", None), ("tokenEqual", "token")):
        for norm in (False, True):
            add(base + ("Normalized" if norm else ""), family="equal", base=base,
                normalized=norm, feature=feature)

    return configs


_CATALOG: list[MetricConfig] = _build_catalog()
_BY_NAME: dict[str, MetricConfig] = {c.name: c for c in _CATALOG}
assert len(_BY_NAME) == len(_CATALOG), "metric names must be unique"


def enumerate_configs() -> list[MetricConfig]:
    """All metric configurations in a fixed, deterministic order."""
    return list(_CATALOG)


def metric_by_name(name: str) -> MetricConfig:
    """Resolve a serialized metric name to its configuration."""
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown similarity metric: {name!r}") from None


# ---------------------------------------------------------------------------
# Feature pipelines
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _extract_features(name: str, s: str) -> tuple:
    """Feature multiset for a set/profile config, cached per content string."""
    config = _BY_NAME[name]
    if config.feature == "token":
        text = normalize_for_edit(s) if config.normalized else s
        return tuple(tokenize(text))
    if config.feature == "ngram":
        text = normalize_for_ngram(s) if config.normalized else s
        return tuple(ngrams(text, config.n, config.padded))
    if config.feature == "shingle":
        text = normalize_for_shingle(s) if config.normalized else s
        return tuple(shingles(tokenize(text), config.n))
    raise ValueError(f"config {config.name} has no feature extractor")


@lru_cache(maxsize=4096)
def _extract_fingerprint(name: str, s: str) -> Fingerprint:
    config = _BY_NAME[name]
    text = normalize_for_ngram(s) if config.normalized else s
    return winnow(text, config.n)


def clear_caches() -> None:
    """Drop the per-content feature caches (mainly for tests)."""
    _extract_features.cache_clear()
    _extract_fingerprint.cache_clear()


def is_applicable(config: MetricConfig, s1: str, s2: str) -> bool:
    """Whether the metric can represent both inputs.

    Edit, equal, and token-based metrics apply to arbitrary strings.
    N-gram and shingle metrics need at least one feature per input;
    fingerprint metrics need inputs long enough for one full Winnowing
    window.
    """
    if config.family in ("edit", "equal") or config.feature == "token":
        return True
    if config.family == "fingerprint":
        return bool(_extract_fingerprint(config.name, s1)) and bool(
            _extract_fingerprint(config.name, s2)
        )
    return bool(_extract_features(config.name, s1)) and bool(_extract_features(config.name, s2))


def fingerprint_similarity(kind: str, f1: Fingerprint, f2: Fingerprint) -> float:
    """Compare two fingerprints by set coefficient or by sequence similarity.

    ``lcs`` and ``oa`` treat the hash sequences as strings over a hash
    alphabet and apply the edit-similarity semantics.
    """
    if not f1 or not f2:
        raise NotApplicableError("empty fingerprint; use the backup metric")
    if kind in ("jaccard", "dice", "overlap"):
        return set_coefficient(kind, set(f1.hashes), set(f2.hashes))
    if kind == "lcs":
        return lcs_similarity(f1.hashes, f2.hashes)
    if kind == "oa":
        return edit_similarity(f1.hashes, f2.hashes, optimal_alignment(f1.hashes, f2.hashes))
    raise ValueError(f"unknown fingerprint comparison: {kind!r}")


def similarity(config: MetricConfig, s1: str, s2: str) -> SimilarityScore:
    """Similarity of two strings under one metric configuration.

    Raises :class:`NotApplicableError` when the metric cannot represent an
    input; callers should then retry with their configured backup metric.
    """
    is_equal = s1 == s2

    if config.family == "equal":
        if config.base == "equal":
            t1 = normalize_for_edit(s1) if config.normalized else s1
            t2 = normalize_for_edit(s2) if config.normalized else s2
            value = 1.0 if t1 == t2 else 0.0
        else:  # tokenEqual
            value = 1.0 if _extract_features(config.name, s1) == _extract_features(config.name, s2) else 0.0
        return SimilarityScore(value, is_equal)

    if config.family == "edit":
        t1 = normalize_for_edit(s1) if config.normalized else s1
        t2 = normalize_for_edit(s2) if config.normalized else s2
        if config.base == "longestCommonSubsequence":
            value = lcs_similarity(t1, t2)
        else:
            value = edit_similarity(t1, t2, edit_distance(config.base, t1, t2))
        return SimilarityScore(value, is_equal)

    if config.family == "set":
        f1 = _extract_features(config.name, s1)
        f2 = _extract_features(config.name, s2)
        if config.feature != "token" and (not f1 or not f2):
            raise NotApplicableError(
                f"{config.name} is not applicable to inputs this short; use the backup metric"
            )
        return SimilarityScore(set_coefficient(config.coefficient, set(f1), set(f2)), is_equal)

    if config.family == "profile":
        f1 = _extract_features(config.name, s1)
        f2 = _extract_features(config.name, s2)
        if config.feature != "token" and (not f1 or not f2):
            raise NotApplicableError(
                f"{config.name} is not applicable to inputs this short; use the backup metric"
            )
        p1 = build_profile(f1, config.weighting)
        p2 = build_profile(f2, config.weighting)
        if config.distance == "cosine":
            value = cosine_similarity(p1, p2)
        else:
            value = manhattan_similarity(p1, p2)
        return SimilarityScore(value, is_equal)

    if config.family == "fingerprint":
        fp1 = _extract_fingerprint(config.name, s1)
        fp2 = _extract_fingerprint(config.name, s2)
        if not fp1 or not fp2:
            raise NotApplicableError(
                f"{config.name} is not applicable to inputs this short; use the backup metric"
            )
        return SimilarityScore(fingerprint_similarity(config.coefficient, fp1, fp2), is_equal)

    raise ValueError(f"unknown metric family: {config.family!r}")
