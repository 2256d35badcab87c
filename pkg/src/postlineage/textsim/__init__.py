"""String similarity metrics for matching post blocks across versions."""

from .editdist import (
    damerau_levenshtein,
    edit_distance,
    edit_similarity,
    lcs_length,
    lcs_similarity,
    levenshtein,
    optimal_alignment,
)
from .features import PAD_CHAR, ngrams, set_coefficient, shingles, tokenize
from .metrics import (
    MetricConfig,
    NotApplicableError,
    SimilarityScore,
    clear_caches,
    enumerate_configs,
    fingerprint_similarity,
    is_applicable,
    metric_by_name,
    similarity,
)
from .normalize import normalize, normalize_for_edit, normalize_for_ngram, normalize_for_shingle
from .profiles import BM15_K, build_profile, cosine_similarity, manhattan_similarity
from .winnowing import Fingerprint, ngram_hashes, winnow

__all__ = [
    "BM15_K",
    "Fingerprint",
    "MetricConfig",
    "NotApplicableError",
    "PAD_CHAR",
    "SimilarityScore",
    "build_profile",
    "clear_caches",
    "cosine_similarity",
    "damerau_levenshtein",
    "edit_distance",
    "edit_similarity",
    "enumerate_configs",
    "fingerprint_similarity",
    "is_applicable",
    "lcs_length",
    "lcs_similarity",
    "levenshtein",
    "manhattan_similarity",
    "metric_by_name",
    "ngram_hashes",
    "ngrams",
    "normalize",
    "normalize_for_edit",
    "normalize_for_ngram",
    "normalize_for_shingle",
    "optimal_alignment",
    "set_coefficient",
    "shingles",
    "similarity",
    "tokenize",
    "winnow",
]
