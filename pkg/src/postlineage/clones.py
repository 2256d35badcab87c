"""Detect code blocks duplicated across threads.

Snippets are normalized in three ordered steps — newline runs collapse to
one newline, trailing newlines drop, and lines containing only brackets
drop — giving the normalized line count (NLOC).  For grouping, the content
is further reduced to the characters [a-zA-Z0-9]; snippets are grouped by
that exact string (so grouping is sound by construction) and each group is
identified by a stable 64-bit fingerprint of it.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Iterable

from .corpus_io import Corpus

_NEWLINE_RUN = re.compile(r"\n+")
_NON_ALNUM = re.compile(r"[^a-zA-Z0-9]")
_BRACKETS = set("()[]{}")


@dataclass(frozen=True)
class NormalizedSnippet:
    whitespace_normalized: str
    nloc: int
    fingerprint_input: str


@dataclass(frozen=True)
class Occurrence:
    thread_id: int
    post_id: int
    post_history_id: int
    local_id: int


@dataclass
class CloneGroup:
    fingerprint: int
    nloc: int
    normalized_content: str
    occurrences: list[Occurrence]

    @property
    def thread_count(self) -> int:
        return len({occ.thread_id for occ in self.occurrences})


def _bracket_only(line: str) -> bool:
    stripped = line.strip()
    return bool(stripped) and set(stripped) <= _BRACKETS


def normalize_snippet(code: str) -> NormalizedSnippet:
    """Apply the three whitespace steps and derive NLOC and the grouping key."""
    text = _NEWLINE_RUN.sub("\n", code)
    text = text.rstrip("\n")
    lines = [line for line in text.split("\n") if not _bracket_only(line)]
    normalized = "\n".join(lines)
    nloc = len(normalized.split("\n")) if normalized else 0
    return NormalizedSnippet(
        whitespace_normalized=normalized,
        nloc=nloc,
        fingerprint_input=_NON_ALNUM.sub("", normalized),
    )


def fingerprint64(fingerprint_input: str) -> int:
    """Stable 64-bit content fingerprint (BLAKE2b with an 8-byte digest)."""
    digest = hashlib.blake2b(fingerprint_input.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def latest_code_blocks(
    corpus: Corpus, all_versions: bool = False
) -> Iterable[tuple[Occurrence, str]]:
    """Code blocks of the most recent post versions (or of every version)."""
    for post_id in corpus.post_ids():
        versions = corpus.posts[post_id]
        selected = versions if all_versions else versions[-1:]
        thread_id = corpus.thread_ids.get(post_id, post_id)
        for version in selected:
            for block in version.blocks:
                if block.block_type != "code":
                    continue
                yield (
                    Occurrence(thread_id, post_id, version.post_history_id, block.local_id),
                    block.content,
                )


def detect_clones(
    blocks: Iterable[tuple[Occurrence, str]],
    min_threads: int = 2,
    min_nloc: int = 6,
) -> list[CloneGroup]:
    """Group snippets by normalized content and filter to non-trivial clones.

    A group survives when it spans at least ``min_threads`` distinct
    threads and its normalized line count reaches ``min_nloc`` (6 keeps
    non-trivial snippets; 20 is the stricter setting).  Groups are ranked
    by thread count, then normalized length, then fingerprint.
    """
    by_input: dict[str, CloneGroup] = {}
    fingerprints: dict[int, str] = {}
    for occurrence, content in blocks:
        snippet = normalize_snippet(content)
        if not snippet.fingerprint_input:
            continue
        group = by_input.get(snippet.fingerprint_input)
        if group is None:
            fp = fingerprint64(snippet.fingerprint_input)
            known = fingerprints.get(fp)
            if known is not None and known != snippet.fingerprint_input:
                raise RuntimeError(f"64-bit fingerprint collision on {fp:#x}")
            fingerprints[fp] = snippet.fingerprint_input
            group = CloneGroup(
                fingerprint=fp,
                nloc=snippet.nloc,
                normalized_content=snippet.whitespace_normalized,
                occurrences=[],
            )
            by_input[snippet.fingerprint_input] = group
        else:
            group.nloc = max(group.nloc, snippet.nloc)
        group.occurrences.append(occurrence)

    selected = [
        group
        for group in by_input.values()
        if group.thread_count >= min_threads and group.nloc >= min_nloc
    ]
    for group in selected:
        group.occurrences.sort(
            key=lambda o: (o.thread_id, o.post_id, o.post_history_id, o.local_id)
        )
    return sorted(selected, key=lambda g: (-g.thread_count, -g.nloc, g.fingerprint))
