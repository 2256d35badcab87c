"""Synthetic corpora with lineages known by construction.

The matching generator builds posts as alternating text/code block lists,
applies scripted edits version by version (small content edits, block
insertion and deletion, same-type reordering, duplicated block content),
and tracks a hidden identity per block.  The identity chains are the ground
truth the matcher is scored against.  Insertions happen at the ends or as
text/code pairs in the middle so the rendered Markdown always re-extracts
into exactly the generated block structure.

The clone generator plants identical snippets (modulo whitespace, blank
lines, and bracket-only lines) across threads.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from .corpus_io import PostHistoryEvent
from .evaluation import GroundTruth

_BASE_DATE = datetime(2017, 6, 1, tzinfo=timezone.utc)


def _word(rng: random.Random) -> str:
    return "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(3, 9)))


def _identifier(rng: random.Random) -> str:
    return "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(4, 10)))


@dataclass
class _GenBlock:
    uid: int
    block_type: str
    lines: list[str]

    @property
    def content(self) -> str:
        return "\n".join(self.lines)


@dataclass
class GeneratedCorpus:
    events: list[PostHistoryEvent]
    ground_truth: GroundTruth
    duplicate_posts: set[int] = field(default_factory=set)
    connection_count: int = 0


class _PostGenerator:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.next_uid = 1

    def _new_text_block(self) -> _GenBlock:
        rng = self.rng
        lines = [
            " ".join(_word(rng) for _ in range(rng.randint(6, 11)))
            for _ in range(rng.randint(1, 3))
        ]
        block = _GenBlock(self.next_uid, "text", lines)
        self.next_uid += 1
        return block

    def _new_code_block(self) -> _GenBlock:
        rng = self.rng
        lines = []
        for _ in range(rng.randint(3, 8)):
            a, b, c = _identifier(rng), _identifier(rng), _identifier(rng)
            template = rng.choice(
                [
                    f"{a} = {b}({c});",
                    f"int {a} = {b} + {rng.randint(0, 99)};",
                    f"if ({a} > {rng.randint(1, 9)}) {{ {b}({c}); }}",
                    f"return {a}.{b}({c});",
                ]
            )
            lines.append(template)
        block = _GenBlock(self.next_uid, "code", lines)
        self.next_uid += 1
        return block

    def _new_block(self, block_type: str) -> _GenBlock:
        return self._new_text_block() if block_type == "text" else self._new_code_block()

    def initial_blocks(self) -> list[_GenBlock]:
        rng = self.rng
        count = rng.randint(2, 6)
        first = rng.choice(["text", "code"])
        blocks = []
        for i in range(count):
            block_type = first if i % 2 == 0 else ("code" if first == "text" else "text")
            blocks.append(self._new_block(block_type))
        return blocks

    # --- scripted edits; every edit keeps the type alternation intact ---

    def small_edit(self, blocks: list[_GenBlock]) -> None:
        rng = self.rng
        block = rng.choice(blocks)
        line_idx = rng.randrange(len(block.lines))
        words = block.lines[line_idx].split(" ")
        words[rng.randrange(len(words))] = (
            _word(rng) if block.block_type == "text" else _identifier(rng) + ";"
        )
        block.lines[line_idx] = " ".join(words)

    def append_block(self, blocks: list[_GenBlock]) -> None:
        last = blocks[-1].block_type if blocks else self.rng.choice(["text", "code"])
        blocks.append(self._new_block("code" if last == "text" else "text"))

    def prepend_block(self, blocks: list[_GenBlock]) -> None:
        first = blocks[0].block_type if blocks else self.rng.choice(["text", "code"])
        blocks.insert(0, self._new_block("code" if first == "text" else "text"))

    def insert_pair(self, blocks: list[_GenBlock]) -> None:
        # Inserting (other-type, same-type) after position i keeps alternation.
        rng = self.rng
        i = rng.randrange(len(blocks))
        anchor = blocks[i].block_type
        other = "code" if anchor == "text" else "text"
        blocks.insert(i + 1, self._new_block(anchor))
        blocks.insert(i + 1, self._new_block(other))

    def delete_end(self, blocks: list[_GenBlock]) -> None:
        if len(blocks) <= 1:
            return
        if self.rng.random() < 0.5:
            blocks.pop(0)
        else:
            blocks.pop()

    def swap_same_type(self, blocks: list[_GenBlock]) -> None:
        rng = self.rng
        for block_type in rng.sample(["text", "code"], 2):
            idxs = [i for i, b in enumerate(blocks) if b.block_type == block_type]
            if len(idxs) >= 2:
                i, j = rng.sample(idxs, 2)
                blocks[i], blocks[j] = blocks[j], blocks[i]
                return

    def duplicate_content(self, blocks: list[_GenBlock]) -> bool:
        rng = self.rng
        for block_type in rng.sample(["text", "code"], 2):
            idxs = [i for i, b in enumerate(blocks) if b.block_type == block_type]
            if len(idxs) >= 2:
                src, dst = rng.sample(idxs, 2)
                blocks[dst].lines = list(blocks[src].lines)
                return True
        return False


def render_body(blocks: list[_GenBlock]) -> str:
    parts = []
    for block in blocks:
        if block.block_type == "text":
            parts.append(block.content)
        else:
            parts.append("\n".join("    " + line for line in block.lines))
    return "\n\n".join(parts)


def generate_matching_corpus(
    n_posts: int = 1000,
    seed: int = 0,
    min_versions: int = 2,
    max_versions: int = 8,
    duplicate_weight: float = 0.015,
    stable_order: bool = False,
) -> GeneratedCorpus:
    """Posts with scripted edit histories and the true connection set.

    With ``stable_order`` only edits that never move an existing block are
    applied (content edits and appends), so every matched block keeps its
    local id.
    """
    rng = random.Random(seed)
    gen = _PostGenerator(rng)
    events: list[PostHistoryEvent] = []
    gt = GroundTruth()
    duplicate_posts: set[int] = set()
    connection_count = 0
    next_history_id = 1

    if stable_order:
        base_weights = [("small_edit", 0.8), ("append", 0.2)]
    else:
        base_weights = [
            ("small_edit", 0.55),
            ("append", 0.08),
            ("prepend", 0.05),
            ("insert_pair", 0.07),
            ("delete", 0.10),
            ("swap", 0.09),
            ("duplicate", duplicate_weight),
        ]
    ops, weights = zip(*base_weights)

    for post_index in range(n_posts):
        post_id = 1000 + post_index
        blocks = gen.initial_blocks()
        n_versions = rng.randint(min_versions, max_versions)
        prev_positions: dict[int, int] = {}
        for version_index in range(1, n_versions + 1):
            if version_index > 1:
                for _ in range(rng.randint(1, 2)):
                    op = rng.choices(ops, weights)[0]
                    if op == "small_edit":
                        gen.small_edit(blocks)
                    elif op == "append":
                        gen.append_block(blocks)
                    elif op == "prepend":
                        gen.prepend_block(blocks)
                    elif op == "insert_pair":
                        gen.insert_pair(blocks)
                    elif op == "delete":
                        gen.delete_end(blocks)
                    elif op == "swap":
                        gen.swap_same_type(blocks)
                    elif op == "duplicate":
                        if gen.duplicate_content(blocks):
                            duplicate_posts.add(post_id)
            history_id = next_history_id
            next_history_id += 1
            events.append(
                PostHistoryEvent(
                    post_id=post_id,
                    post_type_id=1,
                    post_history_id=history_id,
                    post_history_type_id=2 if version_index == 1 else 5,
                    creation_date=_BASE_DATE + timedelta(days=post_index, minutes=version_index),
                    text=render_body(blocks),
                )
            )
            positions = {block.uid: idx for idx, block in enumerate(blocks, start=1)}
            if version_index > 1:
                for idx, block in enumerate(blocks, start=1):
                    pred_local = prev_positions.get(block.uid)
                    gt.add_record(post_id, history_id, idx, block.block_type, pred_local)
                    if pred_local is not None:
                        connection_count += 1
            prev_positions = positions

    return GeneratedCorpus(
        events=events,
        ground_truth=gt,
        duplicate_posts=duplicate_posts,
        connection_count=connection_count,
    )


# ---------------------------------------------------------------------------
# Planted clone corpus
# ---------------------------------------------------------------------------


@dataclass
class PlantedClone:
    lines: list[str]
    nloc: int
    thread_ids: list[int]


@dataclass
class GeneratedCloneCorpus:
    events: list[PostHistoryEvent]
    planted: list[PlantedClone]


def _snippet_lines(rng: random.Random, nloc: int) -> list[str]:
    lines = []
    for _ in range(nloc):
        a, b = _identifier(rng), _identifier(rng)
        lines.append(f"{a} = {b}({rng.randint(0, 999)});")
    return lines


def _perturb(rng: random.Random, lines: list[str]) -> list[str]:
    """Whitespace and bracket noise that clone normalization removes."""
    out: list[str] = []
    for line in lines:
        if rng.random() < 0.3:
            out.append(rng.choice(["{", "}", "()", "[]", "  }"]))
        if rng.random() < 0.3:
            out.append("")
        out.append(line.replace(" = ", rng.choice([" = ", "=", "  =  "])))
    if rng.random() < 0.5:
        out.append("}")
    return out


def generate_clone_corpus(seed: int = 0, n_threads: int = 50) -> GeneratedCloneCorpus:
    """Fifty threads with five planted clone groups at NLOC 6, 20, and 25.

    Distractors include unique snippets, a snippet duplicated within a
    single thread only, and short cross-thread duplicates below the NLOC 6
    threshold.
    """
    rng = random.Random(seed)
    thread_ids = [5000 + i for i in range(n_threads)]
    planted = []
    for nloc, spread in zip((6, 6, 20, 20, 25), (2, 3, 3, 2, 4)):
        planted.append(
            PlantedClone(
                lines=_snippet_lines(rng, nloc),
                nloc=nloc,
                thread_ids=rng.sample(thread_ids, spread),
            )
        )
    short_dup_lines = _snippet_lines(rng, 3)
    short_dup_threads = set(rng.sample(thread_ids, 4))
    within_thread = rng.choice(thread_ids)

    events = []
    next_history_id = 1
    for i, thread_id in enumerate(thread_ids):
        code_blocks: list[list[str]] = []
        for clone in planted:
            if thread_id in clone.thread_ids:
                code_blocks.append(_perturb(rng, clone.lines))
        if thread_id in short_dup_threads:
            code_blocks.append(_perturb(rng, short_dup_lines))
        if thread_id == within_thread:
            repeated = _snippet_lines(rng, 25)
            code_blocks.append(list(repeated))
            code_blocks.append(_perturb(rng, repeated))
        code_blocks.append(_snippet_lines(rng, rng.randint(3, 30)))  # unique noise

        parts = []
        for block_lines in code_blocks:
            parts.append(" ".join(_word(rng) for _ in range(8)))
            parts.append("\n".join("    " + line for line in block_lines))
        body = "\n\n".join(parts)
        events.append(
            PostHistoryEvent(
                post_id=thread_id,
                post_type_id=1,
                post_history_id=next_history_id,
                post_history_type_id=2,
                creation_date=_BASE_DATE + timedelta(hours=i),
                text=body,
            )
        )
        next_history_id += 1
    return GeneratedCloneCorpus(events=events, planted=planted)
