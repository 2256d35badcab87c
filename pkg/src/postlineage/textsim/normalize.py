"""Input normalizers shared by the similarity metric families.

Edit- and n-gram-based metrics share one normalizer that lowercases and
strips a small set of special characters; they differ only in whether
whitespace runs are collapsed to a single space (edit) or removed entirely
(n-gram).  Shingle metrics keep only word characters and spaces so that
whitespace tokenization still works afterwards.
"""

from __future__ import annotations

import re

# Stripped by the edit/n-gram normalizer.  The base set was "{};"; colons,
# commas, and periods were added after observing false negatives on token
# pairs like "to" vs. "to:".
SPECIAL_CHARS = "{};:,."

_SPECIAL = str.maketrans("", "", SPECIAL_CHARS)
_WS_RUN = re.compile(r"\s+")
_NON_WORD = re.compile(r"[^a-zA-Z_0-9 ]")


def normalize_for_edit(s: str) -> str:
    """Lowercase, strip special characters, collapse whitespace runs to one space."""
    s = s.lower().translate(_SPECIAL)
    return _WS_RUN.sub(" ", s).strip()


def normalize_for_ngram(s: str) -> str:
    """Lowercase, strip special characters, remove all whitespace."""
    s = s.lower().translate(_SPECIAL)
    return _WS_RUN.sub("", s)


def normalize_for_shingle(s: str) -> str:
    """Lowercase, unify whitespace, drop every character outside [a-zA-Z_0-9 ]."""
    s = _WS_RUN.sub(" ", s.lower())
    s = _NON_WORD.sub("", s)
    return _WS_RUN.sub(" ", s).strip()


_NORMALIZERS = {
    "edit": normalize_for_edit,
    "ngram": normalize_for_ngram,
    "shingle": normalize_for_shingle,
}


def normalize(family: str, s: str) -> str:
    """Apply the named family normalizer (``edit``, ``ngram``, or ``shingle``)."""
    try:
        return _NORMALIZERS[family](s)
    except KeyError:
        raise ValueError(f"unknown normalizer family: {family!r}") from None
