"""Report emission: delimited tables, JSON, and rendered figures.

Every CLI report path writes a machine-readable JSON report and a
delimited table; where the data has a useful shape, a PNG figure rendered
with matplotlib (Agg, no display needed) lands next to them.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .clones import CloneGroup
from .evaluation import SweepResult


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence],
              comment_lines: Sequence[str] = ()) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        for line in comment_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_json(path: str | Path, payload) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False, default=str)
        fh.write("\n")
    return path


def _new_figure(width: float = 8.0, height: float = 4.5) -> Figure:
    fig = Figure(figsize=(width, height))
    FigureCanvasAgg(fig)
    return fig


def _save(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    return path


# ---------------------------------------------------------------------------
# Sweep reports
# ---------------------------------------------------------------------------

SWEEP_COLUMNS = [
    "rank", "simText", "thetaText", "simCode", "thetaCode", "backupText",
    "backupThetaText", "backupCode", "backupThetaCode", "mccText", "mccCode",
    "mccTotal", "tpText", "fpText", "tnText", "fnText", "tpCode", "fpCode",
    "tnCode", "fnCode", "runtimeSeconds", "negativeTnFlag",
]


def sweep_rows(results: Sequence[SweepResult]) -> list[list]:
    rows = []
    for rank, r in enumerate(results, start=1):
        c = r.config
        rows.append([
            rank, c.sim_text.name, c.theta_text, c.sim_code.name, c.theta_code,
            c.backup_text.name if c.backup_text else "",
            "" if c.backup_theta_text is None else c.backup_theta_text,
            c.backup_code.name if c.backup_code else "",
            "" if c.backup_theta_code is None else c.backup_theta_code,
            f"{r.mcc_text:.6f}", f"{r.mcc_code:.6f}", f"{r.mcc_total:.6f}",
            r.counts_text.tp, r.counts_text.fp, r.counts_text.tn, r.counts_text.fn,
            r.counts_code.tp, r.counts_code.fp, r.counts_code.tn, r.counts_code.fn,
            f"{r.runtime:.6f}",
            int(r.counts_text.tn < 0 or r.counts_code.tn < 0),
        ])
    return rows


def sweep_result_payload(r: SweepResult) -> dict:
    return {
        "config": r.config.describe(),
        "countsText": vars(r.counts_text),
        "countsCode": vars(r.counts_code),
        "mccText": r.mcc_text,
        "mccCode": r.mcc_code,
        "mccTotal": r.mcc_total,
        "runtimeSeconds": r.runtime,
        "negativeTn": r.counts_text.tn < 0 or r.counts_code.tn < 0,
    }


def write_sweep_report(results: Sequence[SweepResult], outdir: str | Path,
                       stage: str, figures: bool = True) -> dict[str, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": write_csv(outdir / f"sweep_{stage}.csv", SWEEP_COLUMNS, sweep_rows(results)),
        "json": write_json(
            outdir / f"sweep_{stage}.json",
            {"stage": stage, "results": [sweep_result_payload(r) for r in results]},
        ),
    }
    if figures and results:
        paths["figure"] = _save(sweep_figure(results), outdir / f"sweep_{stage}.png")
    return paths


def sweep_figure(results: Sequence[SweepResult], top_metrics: int = 6) -> Figure:
    """MCC against threshold for the best-performing metrics."""
    by_metric: dict[str, list[SweepResult]] = {}
    for r in results:
        by_metric.setdefault(r.config.sim_text.name, []).append(r)
    ranked = sorted(
        by_metric.items(),
        key=lambda kv: max(x.mcc_total for x in kv[1]),
        reverse=True,
    )[:top_metrics]
    fig = _new_figure()
    axes = fig.subplots(1, 2, sharey=True)
    for name, rs in ranked:
        rs = sorted(rs, key=lambda r: r.config.theta_text)
        thetas = [r.config.theta_text for r in rs]
        axes[0].plot(thetas, [r.mcc_text for r in rs], marker=".", label=name)
        axes[1].plot(thetas, [r.mcc_code for r in rs], marker=".")
    axes[0].set_title("text blocks")
    axes[1].set_title("code blocks")
    for ax in axes:
        ax.set_xlabel("threshold")
        ax.grid(True, alpha=0.3)
    axes[0].set_ylabel("MCC")
    axes[0].legend(fontsize=7, loc="lower left")
    fig.suptitle("Matching performance by similarity threshold")
    return fig


# ---------------------------------------------------------------------------
# Clone reports
# ---------------------------------------------------------------------------

CLONE_COLUMNS = [
    "rank", "fingerprint", "nloc", "threadCount", "occurrenceCount",
    "occurrences", "urls",
]


def write_clone_report(groups: Sequence[CloneGroup], outdir: str | Path,
                       min_threads: int, min_nloc: int,
                       urls_by_post: dict[int, list[str]] | None = None,
                       figures: bool = True) -> dict[str, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    urls_by_post = urls_by_post or {}
    rows = []
    payload = []
    for rank, group in enumerate(groups, start=1):
        occ_strs = [
            f"{o.thread_id}/{o.post_id}/{o.post_history_id}/{o.local_id}"
            for o in group.occurrences
        ]
        group_urls = sorted({
            url for o in group.occurrences for url in urls_by_post.get(o.post_id, [])
        })
        rows.append([
            rank, f"{group.fingerprint:#018x}", group.nloc, group.thread_count,
            len(group.occurrences), ";".join(occ_strs), ";".join(group_urls),
        ])
        payload.append({
            "fingerprint": f"{group.fingerprint:#018x}",
            "nloc": group.nloc,
            "threadCount": group.thread_count,
            "occurrences": [
                {
                    "threadId": str(o.thread_id),
                    "postId": str(o.post_id),
                    "postHistoryId": str(o.post_history_id),
                    "localId": str(o.local_id),
                }
                for o in group.occurrences
            ],
            "urls": group_urls,
            "normalizedContent": group.normalized_content,
        })
    comments = [f"minThreads={min_threads}", f"minNloc={min_nloc}"]
    paths = {
        "csv": write_csv(outdir / "clones.csv", CLONE_COLUMNS, rows, comment_lines=comments),
        "json": write_json(
            outdir / "clones.json",
            {"minThreads": min_threads, "minNloc": min_nloc, "groups": payload},
        ),
    }
    if figures:
        paths["figure"] = _save(clone_figure(groups), outdir / "clones.png")
    return paths


def clone_figure(groups: Sequence[CloneGroup]) -> Figure:
    fig = _new_figure()
    axes = fig.subplots(1, 2)
    nlocs = [g.nloc for g in groups]
    threads = [g.thread_count for g in groups]
    if nlocs:
        axes[0].hist(nlocs, bins=min(20, max(3, len(set(nlocs)))), color="#4878a8")
        axes[1].hist(threads, bins=range(2, max(threads) + 2), color="#a85448")
    axes[0].set_xlabel("normalized line count")
    axes[0].set_ylabel("clone groups")
    axes[1].set_xlabel("distinct threads")
    fig.suptitle("Cross-thread code clones")
    return fig


# ---------------------------------------------------------------------------
# Reconstruction summary
# ---------------------------------------------------------------------------


def write_reconstruct_report(stats: dict, outdir: str | Path, figures: bool = True) -> dict[str, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {"json": write_json(outdir / "summary.json", stats)}
    if figures:
        paths["figure"] = _save(reconstruct_figure(stats), outdir / "summary.png")
    return paths


def reconstruct_figure(stats: dict) -> Figure:
    fig = _new_figure()
    axes = fig.subplots(1, 2)
    lifespans = stats.get("lifespanLengths", {})
    if lifespans:
        lengths = sorted(int(k) for k in lifespans)
        axes[0].bar(lengths, [lifespans[str(k)] if str(k) in lifespans else lifespans[k] for k in lengths], color="#4878a8")
    axes[0].set_xlabel("block lifespan length (versions)")
    axes[0].set_ylabel("lifespans")
    counts = [
        stats.get("textBlockCount", 0),
        stats.get("codeBlockCount", 0),
    ]
    axes[1].bar(["text", "code"], counts, color=["#4878a8", "#a85448"])
    axes[1].set_ylabel("block versions")
    fig.suptitle("Reconstruction summary")
    return fig
