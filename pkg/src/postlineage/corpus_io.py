"""Neutral corpus ingestion and table export.

Post edit events arrive as JSON-lines (canonical) or delimited text, one
record per post-history event.  Body events (type ids 2: initial body, 5:
edit body, 8: rollback body) become post versions; title events (1, 4, 7)
feed the title history; all other type ids are skipped and counted.

The exporter writes one delimited file per output table (PostVersion,
PostBlockVersion, PostBlockDiff, PostVersionUrl, TitleVersion) plus an
``events.jsonl`` that can be re-ingested losslessly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from .extraction import extract_blocks, extract_urls
from .history import (
    PostBlockVersion,
    PostVersion,
    TitleVersion,
    line_diff,
    title_history,
)

BODY_TYPE_IDS = {2, 5, 8}
TITLE_TYPE_IDS = {1, 4, 7}

# Exported table column encoding for block types.
BLOCK_TYPE_IDS = {"text": 1, "code": 2}

EVENT_FIELDS = [
    "postId",
    "postTypeId",
    "postHistoryId",
    "postHistoryTypeId",
    "creationDate",
    "userId",
    "parentId",
    "text",
]


class CorpusError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass
class PostHistoryEvent:
    """One raw edit event of a post (body or title)."""

    post_id: int
    post_type_id: int
    post_history_id: int
    post_history_type_id: int
    creation_date: datetime
    text: str
    user_id: int | None = None
    parent_id: int | None = None

    @property
    def thread_id(self) -> int:
        """The question's post id: answers point to it via ``parent_id``."""
        if self.post_type_id == 2 and self.parent_id is not None:
            return self.parent_id
        return self.post_id


@dataclass
class Corpus:
    """Ingested posts with ordered versions, plus title histories."""

    posts: dict[int, list[PostVersion]] = field(default_factory=dict)
    titles: dict[int, list[TitleVersion]] = field(default_factory=dict)
    thread_ids: dict[int, int] = field(default_factory=dict)
    skipped_type_counts: dict[int, int] = field(default_factory=dict)

    def post_ids(self) -> list[int]:
        return sorted(self.posts)

    def all_versions(self) -> Iterator[PostVersion]:
        for post_id in self.post_ids():
            yield from self.posts[post_id]

    def reset_links(self) -> None:
        """Clear every lineage field so matching can run again."""
        for version in self.all_versions():
            for block in version.blocks:
                block.pred_post_history_id = None
                block.pred_local_id = None
                block.pred_similarity = None
                block.pred_is_equal = False
                block.pred_count = 0
                block.succ_count = 0
                block.root_post_history_id = None
                block.root_local_id = None


def parse_timestamp(raw: str) -> datetime:
    """ISO-8601 timestamp; a trailing Z means UTC."""
    text = raw.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        stamp = datetime.fromisoformat(text)
    except ValueError as exc:
        raise CorpusError(f"unparseable timestamp: {raw!r}") from exc
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


def format_timestamp(stamp: datetime) -> str:
    return stamp.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _event_from_record(record: dict, where: str) -> PostHistoryEvent:
    try:
        return PostHistoryEvent(
            post_id=int(record["postId"]),
            post_type_id=int(record["postTypeId"]),
            post_history_id=int(record["postHistoryId"]),
            post_history_type_id=int(record["postHistoryTypeId"]),
            creation_date=parse_timestamp(str(record["creationDate"])),
            text=str(record.get("text", "")),
            user_id=_optional_int(record.get("userId")),
            parent_id=_optional_int(record.get("parentId")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"malformed event record at {where}: {exc}") from exc


def _optional_int(value) -> int | None:
    if value is None or value == "":
        return None
    return int(value)


def read_events(path: str | Path, fmt: str | None = None) -> Iterator[PostHistoryEvent]:
    """Stream events from a ``.jsonl`` or delimited ``.csv`` file."""
    path = Path(path)
    if fmt is None:
        fmt = "delimited" if path.suffix.lower() in (".csv", ".tsv") else "json-lines"
    if fmt == "json-lines":
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"invalid JSON at {path}:{lineno}: {exc}") from exc
                yield _event_from_record(record, f"{path}:{lineno}")
    elif fmt == "delimited":
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            for lineno, record in enumerate(reader, start=2):
                yield _event_from_record(record, f"{path}:{lineno}")
    else:
        raise ValueError(f"unknown event format: {fmt!r}")


def write_events(events: Iterable[PostHistoryEvent], path: str | Path) -> None:
    """Write events as JSON-lines, the canonical interchange format."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for event in events:
            record = {
                "postId": event.post_id,
                "postTypeId": event.post_type_id,
                "postHistoryId": event.post_history_id,
                "postHistoryTypeId": event.post_history_type_id,
                "creationDate": format_timestamp(event.creation_date),
                "userId": event.user_id,
                "parentId": event.parent_id,
                "text": event.text,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def ingest(events: Iterable[PostHistoryEvent]) -> Corpus:
    """Group body events into ordered version lists; collect title events.

    Duplicate post-history ids are an error; unknown type ids are skipped
    and counted.  Versions are ordered by creation date (ties by history
    id) and linked to their neighbors.
    """
    corpus = Corpus()
    seen_history_ids: set[int] = set()
    bodies: dict[int, list[PostHistoryEvent]] = {}
    titles: dict[int, list[PostHistoryEvent]] = {}

    for event in events:
        if event.post_history_id in seen_history_ids:
            raise CorpusError(f"duplicate postHistoryId {event.post_history_id}")
        seen_history_ids.add(event.post_history_id)
        corpus.thread_ids[event.post_id] = event.thread_id
        if event.post_history_type_id in BODY_TYPE_IDS:
            bodies.setdefault(event.post_id, []).append(event)
        elif event.post_history_type_id in TITLE_TYPE_IDS:
            titles.setdefault(event.post_id, []).append(event)
        else:
            counts = corpus.skipped_type_counts
            counts[event.post_history_type_id] = counts.get(event.post_history_type_id, 0) + 1

    for post_id, post_events in bodies.items():
        post_events.sort(key=lambda e: (e.creation_date, e.post_history_id))
        versions: list[PostVersion] = []
        for index, event in enumerate(post_events, start=1):
            versions.append(
                PostVersion(
                    post_id=post_id,
                    post_history_id=event.post_history_id,
                    version_index=index,
                    creation_date=event.creation_date,
                    content=event.text,
                    post_type_id=event.post_type_id,
                )
            )
        for prev, cur in zip(versions, versions[1:]):
            prev.succ_post_history_id = cur.post_history_id
            cur.pred_post_history_id = prev.post_history_id
        corpus.posts[post_id] = versions

    for post_id, title_events in titles.items():
        corpus.titles[post_id] = title_history(
            [
                TitleVersion(
                    post_id=post_id,
                    post_history_id=e.post_history_id,
                    creation_date=e.creation_date,
                    title=e.text,
                )
                for e in title_events
            ]
        )
    return corpus


def load_corpus(path: str | Path, fmt: str | None = None) -> Corpus:
    return ingest(read_events(path, fmt))


def extract_corpus(corpus: Corpus) -> Corpus:
    """Split every version body into typed blocks."""
    for version in corpus.all_versions():
        version.blocks = [
            PostBlockVersion(
                post_id=version.post_id,
                post_history_id=version.post_history_id,
                local_id=block.local_id,
                block_type=block.block_type,
                content=block.content,
            )
            for block in extract_blocks(version.content)
        ]
    return corpus


def corpus_to_events(corpus: Corpus) -> list[PostHistoryEvent]:
    """Inverse of ingest for the in-scope fields (bodies and titles)."""
    events: list[PostHistoryEvent] = []
    for post_id in corpus.post_ids():
        for version in corpus.posts[post_id]:
            type_id = 2 if version.version_index == 1 else 5
            parent = corpus.thread_ids.get(post_id)
            events.append(
                PostHistoryEvent(
                    post_id=post_id,
                    post_type_id=version.post_type_id,
                    post_history_id=version.post_history_id,
                    post_history_type_id=type_id,
                    creation_date=version.creation_date,
                    text=version.content,
                    parent_id=parent if parent != post_id else None,
                )
            )
    for post_id, titles in sorted(corpus.titles.items()):
        for index, title in enumerate(titles):
            type_id = 1 if index == 0 else 4
            events.append(
                PostHistoryEvent(
                    post_id=post_id,
                    post_type_id=1,
                    post_history_id=title.post_history_id,
                    post_history_type_id=type_id,
                    creation_date=title.creation_date,
                    text=title.title,
                )
            )
    events.sort(key=lambda e: (e.creation_date, e.post_history_id))
    return events


# ---------------------------------------------------------------------------
# Table export
# ---------------------------------------------------------------------------

POST_VERSION_COLUMNS = [
    "PostId", "PostTypeId", "PostHistoryId", "VersionIndex", "CreationDate",
    "PredPostHistoryId", "SuccPostHistoryId", "Content",
]
POST_BLOCK_VERSION_COLUMNS = [
    "Id", "PostId", "PostHistoryId", "LocalId", "PostBlockTypeId", "LineCount",
    "PredPostBlockVersionId", "PredPostHistoryId", "PredLocalId", "PredSimilarity",
    "PredEqual", "PredCount", "SuccCount", "RootPostBlockVersionId",
    "RootPostHistoryId", "RootLocalId", "Content",
]
POST_BLOCK_DIFF_COLUMNS = [
    "PostId", "PostHistoryId", "LocalId", "PredPostHistoryId", "PredLocalId",
    "LineIndex", "Operation", "Text",
]
POST_VERSION_URL_COLUMNS = [
    "PostId", "PostHistoryId", "LocalId", "LinkType", "LinkPosition", "RootDomain",
    "Query", "FragmentIdentifier", "Url",
]
TITLE_VERSION_COLUMNS = [
    "PostId", "PostHistoryId", "CreationDate", "Title", "PredPostHistoryId",
    "SuccPostHistoryId", "PredEditDistance", "SuccEditDistance",
]

TABLE_FILES = {
    "PostVersion": "PostVersion.csv",
    "PostBlockVersion": "PostBlockVersion.csv",
    "PostBlockDiff": "PostBlockDiff.csv",
    "PostVersionUrl": "PostVersionUrl.csv",
    "TitleVersion": "TitleVersion.csv",
}


def _write_table(path: Path, columns: list[str], rows: Iterable[list]) -> None:
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            writer.writerows(rows)
    except OSError as exc:
        raise CorpusError(f"cannot write table {path}: {exc}") from exc


def _opt(value):
    return "" if value is None else value


def export_tables(corpus: Corpus, outdir: str | Path) -> dict[str, Path]:
    """Write the per-table delimited files plus a re-ingestible events file."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {name: outdir / fname for name, fname in TABLE_FILES.items()}

    version_rows = []
    for version in corpus.all_versions():
        version_rows.append([
            version.post_id, version.post_type_id, version.post_history_id,
            version.version_index, format_timestamp(version.creation_date),
            _opt(version.pred_post_history_id), _opt(version.succ_post_history_id),
            version.content,
        ])
    _write_table(paths["PostVersion"], POST_VERSION_COLUMNS, version_rows)

    # Block version ids are sequential in (post, version, local) order.
    block_ids: dict[tuple[int, int], int] = {}
    next_id = 1
    for version in corpus.all_versions():
        for block in version.blocks:
            block_ids[(block.post_history_id, block.local_id)] = next_id
            next_id += 1

    block_rows = []
    diff_rows = []
    url_rows = []
    for version in corpus.all_versions():
        block_count = len(version.blocks)
        for block in version.blocks:
            row_id = block_ids[(block.post_history_id, block.local_id)]
            pred_id = (
                block_ids.get((block.pred_post_history_id, block.pred_local_id))
                if block.has_pred
                else None
            )
            root_id = (
                block_ids.get((block.root_post_history_id, block.root_local_id))
                if block.root_post_history_id is not None
                else None
            )
            block_rows.append([
                row_id, block.post_id, block.post_history_id, block.local_id,
                BLOCK_TYPE_IDS[block.block_type], block.line_count,
                _opt(pred_id), _opt(block.pred_post_history_id), _opt(block.pred_local_id),
                _opt(block.pred_similarity), int(block.pred_is_equal),
                block.pred_count, block.succ_count,
                _opt(root_id), _opt(block.root_post_history_id), _opt(block.root_local_id),
                block.content,
            ])
            if block.has_pred:
                pred_version = next(
                    v for v in corpus.posts[block.post_id]
                    if v.post_history_id == block.pred_post_history_id
                )
                pred_block = next(
                    b for b in pred_version.blocks if b.local_id == block.pred_local_id
                )
                for line_index, op in enumerate(line_diff(pred_block.content, block.content), 1):
                    diff_rows.append([
                        block.post_id, block.post_history_id, block.local_id,
                        block.pred_post_history_id, block.pred_local_id,
                        line_index, op.kind, op.text,
                    ])
            if block.block_type == "text":
                for link in extract_urls(block.content, block.local_id, block_count):
                    url_rows.append([
                        block.post_id, block.post_history_id, block.local_id,
                        link.link_type, link.position, link.root_domain,
                        _opt(link.query), _opt(link.fragment), link.url,
                    ])
    _write_table(paths["PostBlockVersion"], POST_BLOCK_VERSION_COLUMNS, block_rows)
    _write_table(paths["PostBlockDiff"], POST_BLOCK_DIFF_COLUMNS, diff_rows)
    _write_table(paths["PostVersionUrl"], POST_VERSION_URL_COLUMNS, url_rows)

    title_rows = []
    for post_id in sorted(corpus.titles):
        for title in corpus.titles[post_id]:
            title_rows.append([
                title.post_id, title.post_history_id, format_timestamp(title.creation_date),
                title.title, _opt(title.pred_post_history_id), _opt(title.succ_post_history_id),
                _opt(title.pred_edit_distance), _opt(title.succ_edit_distance),
            ])
    _write_table(paths["TitleVersion"], TITLE_VERSION_COLUMNS, title_rows)

    events_path = outdir / "events.jsonl"
    write_events(corpus_to_events(corpus), events_path)
    paths["events"] = events_path
    return paths


def summary_statistics(corpus: Corpus) -> dict:
    """Descriptive measures of a reconstructed corpus.

    Includes block counts, lifespan lengths (chains of predecessor links),
    and the share of matched blocks that kept their local id.
    """
    text_blocks = 0
    code_blocks = 0
    matched = 0
    same_local_id = 0
    lifespan_lengths: dict[tuple[int, int], int] = {}
    versions = 0
    for version in corpus.all_versions():
        versions += 1
        for block in version.blocks:
            if block.block_type == "text":
                text_blocks += 1
            else:
                code_blocks += 1
            if block.has_pred:
                matched += 1
                if block.pred_local_id == block.local_id:
                    same_local_id += 1
            if block.root_post_history_id is not None:
                root = (block.root_post_history_id, block.root_local_id)
                lifespan_lengths[root] = lifespan_lengths.get(root, 0) + 1
    histogram: dict[str, int] = {}
    for length in lifespan_lengths.values():
        histogram[str(length)] = histogram.get(str(length), 0) + 1
    return {
        "posts": len(corpus.posts),
        "postVersions": versions,
        "textBlockCount": text_blocks,
        "codeBlockCount": code_blocks,
        "matchedBlocks": matched,
        "sameLocalIdPercent": round(100.0 * same_local_id / matched, 2) if matched else None,
        "lifespans": len(lifespan_lengths),
        "lifespanLengths": histogram,
        "skippedEventTypes": dict(sorted(corpus.skipped_type_counts.items())),
    }
