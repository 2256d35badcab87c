"""Reconstruct per-block lineages across post versions.

Every block of a version is linked to at most one block of the immediately
preceding version (the predecessor relation is injective per version pair
and type-preserving).  Candidates are collected per adjacent version pair:
equal-content blocks are preferred; otherwise the configured similarity
metric (with a backup metric for inputs the main metric cannot represent)
proposes the candidates with maximum similarity above the threshold.

Predecessors are then assigned in phases: unique candidates first, then
context (neighboring blocks already matched on both sides, below, above),
then closest position, and finally the best still-available runner-up
candidate whose similarity reached the threshold but not the maximum.  The
runner-up phases are what distinguish the revised strategy from the
initial one; both are available for comparison.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime

from .textsim import MetricConfig, NotApplicableError, metric_by_name, similarity

logger = logging.getLogger(__name__)

STRATEGY_INITIAL = "initial"
STRATEGY_REVISED = "revised"


@dataclass
class PostBlockVersion:
    """One text or code block in one post version, with lineage fields."""

    post_id: int
    post_history_id: int
    local_id: int
    block_type: str
    content: str
    pred_post_history_id: int | None = None
    pred_local_id: int | None = None
    pred_similarity: float | None = None
    pred_is_equal: bool = False
    pred_count: int = 0
    succ_count: int = 0
    root_post_history_id: int | None = None
    root_local_id: int | None = None

    @property
    def line_count(self) -> int:
        return len(self.content.split("\n"))

    @property
    def has_pred(self) -> bool:
        return self.pred_local_id is not None


@dataclass
class PostVersion:
    """One version of a post: its body and the blocks extracted from it."""

    post_id: int
    post_history_id: int
    version_index: int
    creation_date: datetime
    content: str = ""
    post_type_id: int = 1
    blocks: list[PostBlockVersion] = field(default_factory=list)
    pred_post_history_id: int | None = None
    succ_post_history_id: int | None = None


@dataclass
class TitleVersion:
    """One version of a post title with edit distances to its neighbors."""

    post_id: int
    post_history_id: int
    creation_date: datetime
    title: str
    pred_post_history_id: int | None = None
    succ_post_history_id: int | None = None
    pred_edit_distance: int | None = None
    succ_edit_distance: int | None = None


@dataclass(frozen=True)
class MatchingConfig:
    """Similarity metrics and thresholds for text and code blocks.

    The backup metrics must be applicable to arbitrarily short strings;
    they take over whenever a main metric reports it cannot represent an
    input.  Without a backup such pairs simply produce no candidate.
    """

    sim_text: MetricConfig
    theta_text: float
    sim_code: MetricConfig
    theta_code: float
    backup_text: MetricConfig | None = None
    backup_theta_text: float | None = None
    backup_code: MetricConfig | None = None
    backup_theta_code: float | None = None

    def __post_init__(self):
        for theta in (self.theta_text, self.theta_code):
            if not 0.0 <= theta <= 1.0:
                raise ValueError(f"threshold out of range: {theta}")
        for backup in (self.backup_text, self.backup_code):
            if backup is not None and not (
                backup.family in ("edit", "equal") or backup.feature == "token"
            ):
                raise ValueError(
                    f"backup metric {backup.name} cannot handle arbitrarily short strings"
                )

    def metric_for(self, block_type: str) -> tuple[MetricConfig, float]:
        if block_type == "text":
            return self.sim_text, self.theta_text
        return self.sim_code, self.theta_code

    def backup_for(self, block_type: str) -> tuple[MetricConfig | None, float | None]:
        if block_type == "text":
            return self.backup_text, self.backup_theta_text
        return self.backup_code, self.backup_theta_code

    def describe(self) -> dict:
        return {
            "simText": self.sim_text.name,
            "thetaText": self.theta_text,
            "simCode": self.sim_code.name,
            "thetaCode": self.theta_code,
            "backupText": self.backup_text.name if self.backup_text else None,
            "backupThetaText": self.backup_theta_text,
            "backupCode": self.backup_code.name if self.backup_code else None,
            "backupThetaCode": self.backup_theta_code,
        }


def default_matching_config() -> MatchingConfig:
    """The tuned production configuration."""
    return MatchingConfig(
        sim_text=metric_by_name("manhattanFourGramNormalized"),
        theta_text=0.17,
        sim_code=metric_by_name("winnowingFourGramDiceNormalized"),
        theta_code=0.23,
        backup_text=metric_by_name("cosineTokenNormalizedTermFrequency"),
        backup_theta_text=0.36,
        backup_code=metric_by_name("cosineTokenNormalizedTermFrequency"),
        backup_theta_code=0.26,
    )


@dataclass
class BlockCandidates:
    """Possible predecessors of one block, from the previous version."""

    equal: list[int] = field(default_factory=list)  # equal-content prev local ids
    sims: dict[int, float] = field(default_factory=dict)  # qualified non-equal sims
    max_sim: float = 0.0
    pred: list[int] = field(default_factory=list)  # the possible-predecessor set


@dataclass
class PairCandidates:
    """Candidate structure of one adjacent version pair."""

    per_block: dict[int, BlockCandidates] = field(default_factory=dict)
    succ: dict[int, list[int]] = field(default_factory=dict)  # prev local -> cur locals

    def pred_count(self, cur_local: int) -> int:
        return len(self.per_block[cur_local].pred)

    def succ_count(self, prev_local: int) -> int:
        return len(self.succ.get(prev_local, []))


def compute_candidates(
    prev: PostVersion, cur: PostVersion, config: MatchingConfig
) -> PairCandidates:
    """Equality and similarity structure between two adjacent versions.

    Similarity is only computed when contents differ, so equal blocks stay
    distinguishable from blocks that merely score 1.0.  A possible
    predecessor (``Pred``) is an equal-content block; only when no equal
    block exists, the candidates attaining the maximum similarity at or
    above the threshold.  ``Succ`` is the mirror image: the blocks of the
    current version that list a previous block as possible predecessor.
    """
    pair = PairCandidates()
    for block in cur.blocks:
        bc = BlockCandidates()
        metric, theta = config.metric_for(block.block_type)
        backup, backup_theta = config.backup_for(block.block_type)
        for prev_block in prev.blocks:
            if prev_block.block_type != block.block_type:
                continue
            if prev_block.content == block.content:
                bc.equal.append(prev_block.local_id)
                continue
            try:
                value = similarity(metric, prev_block.content, block.content).value
                threshold = theta
            except NotApplicableError:
                if backup is None:
                    continue
                value = similarity(backup, prev_block.content, block.content).value
                threshold = backup_theta
            if value >= threshold:
                bc.sims[prev_block.local_id] = value
        if bc.equal:
            bc.max_sim = 1.0
            bc.pred = list(bc.equal)
        elif bc.sims:
            bc.max_sim = max(bc.sims.values())
            bc.pred = sorted(l for l, v in bc.sims.items() if v == bc.max_sim)
        pair.per_block[block.local_id] = bc
        for l in bc.pred:
            pair.succ.setdefault(l, []).append(block.local_id)
    return pair


class _PairMatcher:
    """Assigns predecessors for one version pair, phase by phase."""

    def __init__(self, prev: PostVersion, cur: PostVersion, pair: PairCandidates):
        self.prev = prev
        self.cur = cur
        self.pair = pair
        self.consumed: set[int] = set()

    def available(self, prev_local: int) -> bool:
        return prev_local not in self.consumed

    def _unmatched(self) -> list[PostBlockVersion]:
        return [b for b in self.cur.blocks if not b.has_pred]

    def _link(self, block: PostBlockVersion, prev_local: int) -> None:
        bc = self.pair.per_block[block.local_id]
        block.pred_post_history_id = self.prev.post_history_id
        block.pred_local_id = prev_local
        if prev_local in bc.equal:
            block.pred_similarity = 1.0
            block.pred_is_equal = True
        else:
            block.pred_similarity = bc.sims[prev_local]
            block.pred_is_equal = False
        self.consumed.add(prev_local)

    def set_pred_unique(self, runner_up_on_unavailable: bool) -> None:
        """Link blocks whose only candidate is wanted by nobody else.

        With ``runner_up_on_unavailable`` (the revised strategy), finding
        the unique candidate already consumed triggers a runner-up pass
        over the whole version.
        """
        for block in self.cur.blocks:
            if block.has_pred:
                continue
            bc = self.pair.per_block[block.local_id]
            if len(bc.pred) != 1:
                continue
            candidate = bc.pred[0]
            if self.available(candidate):
                if self.pair.succ_count(candidate) == 1:
                    self._link(block, candidate)
            elif runner_up_on_unavailable:
                self.set_pred_runner_up()

    def set_pred_context(self, mode: str) -> bool:
        """Link a candidate whose neighbors match the block's neighbors.

        For a block at local id j and a candidate at local id l, the
        required neighbors (j-1/j+1, usually of the other block type) must
        already have predecessors sitting at l-1/l+1.  ``mode`` selects
        which sides are required: BOTH, ABOVE (j-1 only), or BELOW (j+1
        only).  Returns whether at least one predecessor was set; callers
        loop until nothing changes.
        """
        blocks_by_local = {b.local_id: b for b in self.cur.blocks}
        changed = False
        for block in self.cur.blocks:
            if block.has_pred:
                continue
            bc = self.pair.per_block[block.local_id]
            j = block.local_id
            for l in bc.pred:
                if not self.available(l):
                    continue
                above_ok = self._neighbor_matches(blocks_by_local.get(j - 1), l - 1)
                below_ok = self._neighbor_matches(blocks_by_local.get(j + 1), l + 1)
                if mode == "BOTH" and not (above_ok and below_ok):
                    continue
                if mode == "ABOVE" and not above_ok:
                    continue
                if mode == "BELOW" and not below_ok:
                    continue
                self._link(block, l)
                changed = True
                break
        return changed

    def _neighbor_matches(self, neighbor: PostBlockVersion | None, wanted_local: int) -> bool:
        return (
            neighbor is not None
            and neighbor.has_pred
            and neighbor.pred_local_id == wanted_local
        )

    def set_pred_position(self) -> None:
        """Link each remaining block to its positionally closest candidate.

        Ties prefer the smaller local id.  Candidates consumed earlier in
        the pass are no longer available to later blocks.
        """
        for block in self.cur.blocks:
            if block.has_pred:
                continue
            bc = self.pair.per_block[block.local_id]
            candidates = [l for l in bc.pred if self.available(l)]
            if not candidates:
                continue
            j = block.local_id
            best = min(candidates, key=lambda l: (abs(l - j), l))
            self._link(block, best)

    def set_pred_runner_up(self) -> None:
        """Link the best still-available below-maximum candidate.

        Runner-up candidates reached the threshold but not the maximum
        similarity.  The best runner-up is linked only when it is the
        unique maximum among them and no block of the current version
        counts it as a possible predecessor (its successor set is empty).
        """
        for block in self.cur.blocks:
            if block.has_pred:
                continue
            bc = self.pair.per_block[block.local_id]
            runner_ups = {
                l: v for l, v in bc.sims.items() if self.available(l) and v < bc.max_sim
            }
            if not runner_ups:
                continue
            best_value = max(runner_ups.values())
            best = [l for l, v in runner_ups.items() if v == best_value]
            if len(best) != 1:
                continue
            if self.pair.succ_count(best[0]) == 0:
                self._link(block, best[0])

    def run(self, strategy: str) -> None:
        revised = strategy == STRATEGY_REVISED
        self.set_pred_unique(runner_up_on_unavailable=revised)
        for mode in ("BOTH", "BELOW", "ABOVE"):
            while self.set_pred_context(mode):
                pass
        self.set_pred_position()
        if revised:
            self.set_pred_runner_up()


def process_version_history(
    versions: list[PostVersion],
    config: MatchingConfig | None = None,
    strategy: str = STRATEGY_REVISED,
) -> list[PostVersion]:
    """Populate predecessor links, candidate counts, and lineage roots.

    Versions must be ordered; blocks must already be extracted.  The result
    is deterministic in the versions and the configuration.
    """
    if config is None:
        config = default_matching_config()
    if strategy not in (STRATEGY_INITIAL, STRATEGY_REVISED):
        raise ValueError(f"unknown matching strategy: {strategy!r}")

    for prev, cur in zip(versions, versions[1:]):
        pair = compute_candidates(prev, cur, config)
        matcher = _PairMatcher(prev, cur, pair)
        matcher.run(strategy)
        for block in cur.blocks:
            block.pred_count = pair.pred_count(block.local_id)
        for block in prev.blocks:
            block.succ_count = pair.succ_count(block.local_id)

    by_key: dict[tuple[int, int], PostBlockVersion] = {}
    for version in versions:
        for block in version.blocks:
            if block.has_pred:
                pred = by_key[(block.pred_post_history_id, block.pred_local_id)]
                block.root_post_history_id = pred.root_post_history_id
                block.root_local_id = pred.root_local_id
            else:
                block.root_post_history_id = block.post_history_id
                block.root_local_id = block.local_id
            by_key[(block.post_history_id, block.local_id)] = block
    return versions


# ---------------------------------------------------------------------------
# Line diff
# ---------------------------------------------------------------------------

UNCHANGED = "unchanged"
ADDED = "added"
DELETED = "deleted"


@dataclass(frozen=True)
class DiffOp:
    kind: str  # unchanged | added | deleted
    text: str


def line_diff(pred_content: str, content: str) -> list[DiffOp]:
    """LCS-based line difference; applying it to ``pred_content`` yields ``content``."""
    a = pred_content.split("\n") if pred_content else []
    b = content.split("\n") if content else []
    la, lb = len(a), len(b)
    # dp[i][j] = LCS length of a[i:], b[j:]
    dp = [[0] * (lb + 1) for _ in range(la + 1)]
    for i in range(la - 1, -1, -1):
        row = dp[i]
        nxt = dp[i + 1]
        for j in range(lb - 1, -1, -1):
            if a[i] == b[j]:
                row[j] = nxt[j + 1] + 1
            else:
                row[j] = nxt[j] if nxt[j] >= row[j + 1] else row[j + 1]
    ops: list[DiffOp] = []
    i = j = 0
    while i < la and j < lb:
        if a[i] == b[j]:
            ops.append(DiffOp(UNCHANGED, a[i]))
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            ops.append(DiffOp(DELETED, a[i]))
            i += 1
        else:
            ops.append(DiffOp(ADDED, b[j]))
            j += 1
    for k in range(i, la):
        ops.append(DiffOp(DELETED, a[k]))
    for k in range(j, lb):
        ops.append(DiffOp(ADDED, b[k]))
    return ops


def apply_diff(pred_content: str, ops: list[DiffOp]) -> str:
    """Reconstruct the successor content from a predecessor and its diff."""
    out = [op.text for op in ops if op.kind in (UNCHANGED, ADDED)]
    kept = [op.text for op in ops if op.kind in (UNCHANGED, DELETED)]
    expected = pred_content.split("\n") if pred_content else []
    if kept != expected:
        raise ValueError("diff does not match the predecessor content")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Title history
# ---------------------------------------------------------------------------


def title_history(titles: list[TitleVersion]) -> list[TitleVersion]:
    """Link title versions and compute Levenshtein distances between neighbors."""
    from .textsim import levenshtein

    ordered = sorted(titles, key=lambda t: (t.creation_date, t.post_history_id))
    for prev, cur in zip(ordered, ordered[1:]):
        prev.succ_post_history_id = cur.post_history_id
        cur.pred_post_history_id = prev.post_history_id
        d = levenshtein(prev.title, cur.title)
        prev.succ_edit_distance = d
        cur.pred_edit_distance = d
    return ordered
