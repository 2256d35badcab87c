"""Score matching configurations against human ground truth.

Each configuration is a binary classifier over predecessor connections: the
connections it sets are compared with the validated connections, separately
for text and code blocks, and ranked by Matthews correlation coefficient.
The threshold sweep runs in three stages: a coarse grid over every metric,
a fine grid over the best performers plus backup candidates, and a combined
stage crossing text, code, and backup configurations.
"""

from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus_io import Corpus, CorpusError
from .history import MatchingConfig, process_version_history
from .textsim import MetricConfig, enumerate_configs, metric_by_name

COARSE_THRESHOLDS = [round(0.1 * i, 1) for i in range(11)]
FINE_THRESHOLDS = [round(0.01 * i, 2) for i in range(101)]

# A connection: one block of a version linked to a block of the previous
# version, keyed as (postId, postHistoryId, localId, predLocalId).
Connection = tuple[int, int, int, int]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int


@dataclass
class GroundTruth:
    """Validated predecessor connections, with explicit no-predecessor rows.

    ``blocks`` lists every covered block of versions 2..n as
    (postId, postHistoryId, localId, blockType); ``connections`` holds the
    actual links per block type.
    """

    blocks: set[tuple[int, int, int, str]] = field(default_factory=set)
    connections: dict[str, set[Connection]] = field(
        default_factory=lambda: {"text": set(), "code": set()}
    )

    def add_record(
        self,
        post_id: int,
        post_history_id: int,
        local_id: int,
        block_type: str,
        pred_local_id: int | None,
    ) -> None:
        if block_type not in ("text", "code"):
            raise CorpusError(f"unknown block type in ground truth: {block_type!r}")
        self.blocks.add((post_id, post_history_id, local_id, block_type))
        if pred_local_id is not None:
            self.connections[block_type].add((post_id, post_history_id, local_id, pred_local_id))

    def post_ids(self) -> set[int]:
        return {post_id for post_id, _, _, _ in self.blocks}


GROUND_TRUTH_COLUMNS = ["postId", "postHistoryId", "localId", "blockType", "predLocalId"]


def load_ground_truth(path: str | Path) -> GroundTruth:
    """Read the delimited ground-truth format (empty predLocalId = no pred)."""
    gt = GroundTruth()
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(GROUND_TRUTH_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise CorpusError(f"ground-truth file {path} lacks columns: {sorted(missing)}")
        for record in reader:
            pred = record["predLocalId"].strip()
            gt.add_record(
                int(record["postId"]),
                int(record["postHistoryId"]),
                int(record["localId"]),
                record["blockType"].strip(),
                int(pred) if pred else None,
            )
    return gt


def save_ground_truth(gt: GroundTruth, path: str | Path) -> None:
    rows = []
    linked = {
        (p, h, l): pred
        for conns in gt.connections.values()
        for (p, h, l, pred) in conns
    }
    for post_id, hid, local_id, block_type in sorted(gt.blocks):
        pred = linked.get((post_id, hid, local_id))
        rows.append([post_id, hid, local_id, block_type, "" if pred is None else pred])
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GROUND_TRUTH_COLUMNS)
        writer.writerows(rows)


def ground_truth_from_corpus(corpus: Corpus) -> GroundTruth:
    """Ground truth mirroring the corpus' current predecessor links."""
    gt = GroundTruth()
    for version in corpus.all_versions():
        if version.version_index == 1:
            continue
        for block in version.blocks:
            gt.add_record(
                block.post_id,
                block.post_history_id,
                block.local_id,
                block.block_type,
                block.pred_local_id,
            )
    return gt


def connections_from_corpus(corpus: Corpus) -> dict[str, set[Connection]]:
    """The predecessor connections currently set on the corpus, per type."""
    out: dict[str, set[Connection]] = {"text": set(), "code": set()}
    for version in corpus.all_versions():
        if version.version_index == 1:
            continue
        for block in version.blocks:
            if block.has_pred:
                out[block.block_type].add(
                    (block.post_id, block.post_history_id, block.local_id, block.pred_local_id)
                )
    return out


def possible_connection_counts(corpus: Corpus) -> dict[str, int]:
    """Number of possible predecessor connections: blocks of versions 2..n."""
    counts = {"text": 0, "code": 0}
    for version in corpus.all_versions():
        if version.version_index == 1:
            continue
        for block in version.blocks:
            counts[block.block_type] += 1
    return counts


def confusion(c: set, gt: set, n_pos: int) -> ConfusionCounts:
    """Confusion counts of a connection set against the ground truth.

    ``tn`` is defined as ``n_pos - |C u GT|`` and can go negative when the
    sets disagree heavily (each disagreement contributes two elements to
    the union but one to ``n_pos``); reports flag that rather than hiding
    it.
    """
    tp = len(c & gt)
    fp = len(c - gt)
    fn = len(gt - c)
    tn = n_pos - len(c | gt)
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def mcc(counts: ConfusionCounts) -> float:
    """Matthews correlation coefficient; 0 when the denominator vanishes."""
    tp, fp, tn, fn = counts.tp, counts.fp, counts.tn, counts.fn
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom <= 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(denom)


@dataclass
class SweepResult:
    config: MatchingConfig
    counts_text: ConfusionCounts
    counts_code: ConfusionCounts
    mcc_text: float
    mcc_code: float
    runtime: float  # seconds, median over repetitions

    @property
    def mcc_total(self) -> float:
        return self.mcc_text + self.mcc_code

    @property
    def name(self) -> str:
        c = self.config
        parts = [f"{c.sim_text.name}@{c.theta_text:g}", f"{c.sim_code.name}@{c.theta_code:g}"]
        if c.backup_text is not None:
            parts.append(f"{c.backup_text.name}@{c.backup_theta_text:g}")
        if c.backup_code is not None:
            parts.append(f"{c.backup_code.name}@{c.backup_theta_code:g}")
        return "|".join(parts)


def validate_coverage(corpus: Corpus, gt: GroundTruth) -> None:
    """Every corpus block of versions 2..n must be covered by the ground truth."""
    corpus_blocks = set()
    for version in corpus.all_versions():
        if version.version_index == 1:
            continue
        for block in version.blocks:
            corpus_blocks.add(
                (block.post_id, block.post_history_id, block.local_id, block.block_type)
            )
    uncovered = corpus_blocks - gt.blocks
    if uncovered:
        posts = sorted({post_id for post_id, _, _, _ in uncovered})
        raise CorpusError(f"posts not covered by ground truth: {posts}")


def evaluate(
    config: MatchingConfig, corpus: Corpus, gt: GroundTruth, repeats: int = 1
) -> SweepResult:
    """Reconstruct with one configuration and score it against the ground truth.

    Runtime is the median over ``repeats`` repetitions, which stabilizes
    runtime-based tie-breaking in the rankings.
    """
    validate_coverage(corpus, gt)
    durations = []
    for _ in range(max(1, repeats)):
        corpus.reset_links()
        started = time.perf_counter()
        for post_id in corpus.post_ids():
            process_version_history(corpus.posts[post_id], config)
        durations.append(time.perf_counter() - started)
    connections = connections_from_corpus(corpus)
    n_pos = possible_connection_counts(corpus)
    counts_text = confusion(connections["text"], gt.connections["text"], n_pos["text"])
    counts_code = confusion(connections["code"], gt.connections["code"], n_pos["code"])
    return SweepResult(
        config=config,
        counts_text=counts_text,
        counts_code=counts_code,
        mcc_text=mcc(counts_text),
        mcc_code=mcc(counts_code),
        runtime=statistics.median(durations),
    )


# ---------------------------------------------------------------------------
# Sweep plans
# ---------------------------------------------------------------------------


def coarse_plan() -> list[MatchingConfig]:
    """Every metric as both text and code metric, over the coarse threshold grid."""
    plan = []
    for metric in enumerate_configs():
        for theta in COARSE_THRESHOLDS:
            plan.append(
                MatchingConfig(
                    sim_text=metric, theta_text=theta, sim_code=metric, theta_code=theta
                )
            )
    return plan


def fine_plan(metric_names: Sequence[str]) -> list[MatchingConfig]:
    """Selected metrics over the fine threshold grid, text and code tied."""
    plan = []
    for name in metric_names:
        metric = metric_by_name(name)
        for theta in FINE_THRESHOLDS:
            plan.append(
                MatchingConfig(
                    sim_text=metric, theta_text=theta, sim_code=metric, theta_code=theta
                )
            )
    return plan


def combined_plan(
    text_configs: Sequence[tuple[str, float]],
    text_backups: Sequence[tuple[str, float]],
    code_configs: Sequence[tuple[str, float]],
    code_backups: Sequence[tuple[str, float]],
) -> list[MatchingConfig]:
    """Cross product of text, code, and backup configurations."""
    plan = []
    for text_name, theta_text in text_configs:
        for bt_name, bt_theta in text_backups:
            for code_name, theta_code in code_configs:
                for bc_name, bc_theta in code_backups:
                    plan.append(
                        MatchingConfig(
                            sim_text=metric_by_name(text_name),
                            theta_text=theta_text,
                            sim_code=metric_by_name(code_name),
                            theta_code=theta_code,
                            backup_text=metric_by_name(bt_name),
                            backup_theta_text=bt_theta,
                            backup_code=metric_by_name(bc_name),
                            backup_theta_code=bc_theta,
                        )
                    )
    return plan


def is_backup_candidate(metric: MetricConfig) -> bool:
    """Edit- and token-based metrics apply to arbitrarily short strings."""
    return metric.family in ("edit", "equal") or metric.feature == "token"


def select_fine_metrics(
    coarse_results: Sequence[SweepResult], quantile: float = 0.95
) -> list[str]:
    """Metrics whose best MCC reaches the quantile, plus backup candidates.

    The best edit/token metrics are kept as backup candidates and the
    ``equal`` baseline is always included.
    """
    best: dict[str, float] = {}
    for result in coarse_results:
        name = result.config.sim_text.name
        score = max(result.mcc_text, result.mcc_code)
        if score > best.get(name, float("-inf")):
            best[name] = score
    if not best:
        return ["equal"]
    scores = sorted(best.values())
    cut = scores[min(len(scores) - 1, int(quantile * len(scores)))]
    selected = {name for name, score in best.items() if score >= cut}
    backup_pool = sorted(
        (name for name in best if is_backup_candidate(metric_by_name(name))),
        key=lambda name: best[name],
        reverse=True,
    )
    selected.update(backup_pool[:4])
    selected.add("equal")
    return sorted(selected)


def rank_results(results: Iterable[SweepResult]) -> list[SweepResult]:
    """Total order: summed MCC descending, runtime ascending, name ascending."""
    return sorted(results, key=lambda r: (-r.mcc_total, r.runtime, r.name))


def run_sweep(
    plan: Sequence[MatchingConfig],
    corpus: Corpus,
    gt: GroundTruth,
    repeats: int = 1,
) -> list[SweepResult]:
    """Evaluate every configuration of a plan and rank the results."""
    results = [evaluate(config, corpus, gt, repeats=repeats) for config in plan]
    return rank_results(results)
