"""Command-line interface.

Subcommands: ``reconstruct`` (full pipeline to exported tables),
``evaluate`` (score one configuration against ground truth), ``sweep``
(staged threshold sweeps), ``clones`` (cross-thread duplicate report),
``synth`` (generate synthetic corpora), and ``serve-annotate`` (the local
annotation backend).

Options can come from a JSON config file (``--config``); command-line
flags win over file values.  Exit codes: 0 success, 1 usage error, 2 data
error, 3 internal error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .corpus_io import (
    Corpus,
    CorpusError,
    export_tables,
    extract_corpus,
    load_corpus,
    summary_statistics,
    write_events,
)
from .clones import detect_clones, latest_code_blocks
from .evaluation import (
    coarse_plan,
    combined_plan,
    evaluate,
    fine_plan,
    load_ground_truth,
    run_sweep,
    save_ground_truth,
    select_fine_metrics,
)
from .extraction import extract_urls
from .history import (
    MatchingConfig,
    default_matching_config,
    process_version_history,
)
from .report import (
    sweep_result_payload,
    write_clone_report,
    write_reconstruct_report,
    write_sweep_report,
)
from .textsim import metric_by_name

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 for usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    """Pipeline options; defaults mirror the tuned production configuration."""

    input: str | None = None
    input_format: str | None = None
    output_dir: str = "out"
    ground_truth: str | None = None
    sim_text: str = "manhattanFourGramNormalized"
    theta_text: float = 0.17
    sim_code: str = "winnowingFourGramDiceNormalized"
    theta_code: float = 0.23
    backup_text: str | None = "cosineTokenNormalizedTermFrequency"
    backup_theta_text: float | None = 0.36
    backup_code: str | None = "cosineTokenNormalizedTermFrequency"
    backup_theta_code: float | None = 0.26
    threads: int = 1
    figures: bool = True
    min_threads: int = 2
    min_nloc: int = 6
    all_versions: bool = False
    stage: str = "coarse"
    from_report: str | None = None
    repeats: int = 1
    port: int = 8642
    ui_dir: str | None = None
    seed: int = 0
    posts: int = 100
    kind: str = "matching"

    def matching_config(self) -> MatchingConfig:
        return MatchingConfig(
            sim_text=metric_by_name(self.sim_text),
            theta_text=self.theta_text,
            sim_code=metric_by_name(self.sim_code),
            theta_code=self.theta_code,
            backup_text=metric_by_name(self.backup_text) if self.backup_text else None,
            backup_theta_text=self.backup_theta_text,
            backup_code=metric_by_name(self.backup_code) if self.backup_code else None,
            backup_theta_code=self.backup_theta_code,
        )


def _load_run_config(path: str | None) -> RunConfig:
    config = RunConfig()
    if path is None:
        return config
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CorpusError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorpusError(f"config file {path} is not valid JSON: {exc}") from exc
    known = {f for f in RunConfig.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return replace(config, **data)


def _apply_flags(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    for name in RunConfig.__dataclass_fields__:
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    return replace(config, **updates)


def _add_matching_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sim-text", dest="sim_text", help="text similarity metric name")
    parser.add_argument("--theta-text", dest="theta_text", type=float)
    parser.add_argument("--sim-code", dest="sim_code", help="code similarity metric name")
    parser.add_argument("--theta-code", dest="theta_code", type=float)
    parser.add_argument("--backup-text", dest="backup_text")
    parser.add_argument("--backup-theta-text", dest="backup_theta_text", type=float)
    parser.add_argument("--backup-code", dest="backup_code")
    parser.add_argument("--backup-theta-code", dest="backup_theta_code", type=float)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags win over file values")
    parser.add_argument("--input", help="events file (.jsonl or .csv)")
    parser.add_argument("--input-format", dest="input_format", choices=["json-lines", "delimited"])
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--threads", type=int, help="worker processes; 1 = single-threaded")
    parser.add_argument("--no-figures", dest="figures", action="store_const", const=False)


def build_parser() -> _Parser:
    parser = _Parser(prog="postlineage", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"postlineage {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reconstruct", help="run the full pipeline and export tables")
    _add_common_flags(p)
    _add_matching_flags(p)

    p = sub.add_parser("evaluate", help="score one configuration against ground truth")
    _add_common_flags(p)
    _add_matching_flags(p)
    p.add_argument("--ground-truth", dest="ground_truth")
    p.add_argument("--repeats", type=int, help="runtime repetitions (median is reported)")

    p = sub.add_parser("sweep", help="threshold sweep over metric configurations")
    _add_common_flags(p)
    p.add_argument("--ground-truth", dest="ground_truth")
    p.add_argument("--stage", choices=["coarse", "fine", "combined"])
    p.add_argument("--from", dest="from_report", help="prior stage JSON report")
    p.add_argument("--repeats", type=int)

    p = sub.add_parser("clones", help="detect code blocks duplicated across threads")
    _add_common_flags(p)
    p.add_argument("--min-threads", dest="min_threads", type=int)
    p.add_argument("--min-nloc", dest="min_nloc", type=int)
    p.add_argument("--all-versions", dest="all_versions", action="store_const", const=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    _add_common_flags(p)
    p.add_argument("--kind", choices=["matching", "clones"])
    p.add_argument("--posts", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("serve-annotate", help="serve the annotation backend")
    _add_common_flags(p)
    _add_matching_flags(p)
    p.add_argument("--ground-truth", dest="ground_truth")
    p.add_argument("--port", type=int)
    p.add_argument("--ui-dir", dest="ui_dir", help="directory with the built web UI")
    return parser


def _require_input(config: RunConfig) -> Path:
    if not config.input:
        raise UsageError("--input is required")
    path = Path(config.input)
    if not path.exists():
        raise CorpusError(f"input file does not exist: {path}")
    return path


def _load_extracted(config: RunConfig) -> Corpus:
    path = _require_input(config)
    corpus = load_corpus(path, config.input_format)
    return extract_corpus(corpus)


def _match_worker(args):
    versions, config = args
    process_version_history(versions, config)
    return versions


def _match_corpus(corpus: Corpus, matching: MatchingConfig, threads: int) -> None:
    post_ids = corpus.post_ids()
    if threads <= 1:
        for post_id in post_ids:
            process_version_history(corpus.posts[post_id], matching)
        return
    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
        jobs = ((corpus.posts[post_id], matching) for post_id in post_ids)
        for post_id, versions in zip(post_ids, pool.map(_match_worker, jobs, chunksize=16)):
            corpus.posts[post_id] = versions


def cmd_reconstruct(config: RunConfig) -> int:
    started = time.perf_counter()
    corpus = _load_extracted(config)
    _match_corpus(corpus, config.matching_config(), config.threads)
    outdir = Path(config.output_dir)
    export_tables(corpus, outdir)
    stats = summary_statistics(corpus)
    stats["matchingConfig"] = config.matching_config().describe()
    stats["elapsedSeconds"] = round(time.perf_counter() - started, 3)
    write_reconstruct_report(stats, outdir, figures=config.figures)
    print(f"reconstructed {stats['posts']} posts, {stats['postVersions']} versions")
    print(
        f"blocks: {stats['textBlockCount']} text, {stats['codeBlockCount']} code, "
        f"{stats['lifespans']} lifespans"
    )
    if stats["sameLocalIdPercent"] is not None:
        print(f"same-local-id: {stats['sameLocalIdPercent']}%")
    print(f"tables written to {outdir}")
    return EXIT_OK


def _require_ground_truth(config: RunConfig):
    if not config.ground_truth:
        raise UsageError("--ground-truth is required")
    path = Path(config.ground_truth)
    if not path.exists():
        raise CorpusError(f"ground-truth file does not exist: {path}")
    return load_ground_truth(path)


def cmd_evaluate(config: RunConfig) -> int:
    corpus = _load_extracted(config)
    gt = _require_ground_truth(config)
    result = evaluate(config.matching_config(), corpus, gt, repeats=config.repeats)
    outdir = Path(config.output_dir)
    write_sweep_report([result], outdir, stage="evaluate", figures=False)
    print(f"mccText={result.mcc_text:.4f} mccCode={result.mcc_code:.4f}")
    if result.counts_text.tn < 0 or result.counts_code.tn < 0:
        print("warning: negative true-negative count (heavy disagreement with ground truth)")
    print(f"report written to {outdir}")
    return EXIT_OK


def _plan_from_prior(config: RunConfig, stage: str):
    if not config.from_report:
        raise UsageError(f"--from <prior stage report.json> is required for stage {stage}")
    with open(config.from_report, encoding="utf-8") as fh:
        prior = json.load(fh)
    results = prior.get("results", [])
    if stage == "fine":
        scored = [
            (r["config"]["simText"], max(r["mccText"], r["mccCode"])) for r in results
        ]
        best: dict[str, float] = {}
        for name, score in scored:
            best[name] = max(score, best.get(name, float("-inf")))
        ranked = sorted(best, key=lambda n: best[n], reverse=True)
        cut = max(1, round(len(ranked) * 0.05))
        names = sorted(set(ranked[:cut]) | {"equal"})
        return fine_plan(names)
    # combined: best text/code configurations (99% quantile) with backups
    by_text: dict[tuple[str, float], float] = {}
    by_code: dict[tuple[str, float], float] = {}
    backups_text: dict[tuple[str, float], float] = {}
    backups_code: dict[tuple[str, float], float] = {}
    from .evaluation import is_backup_candidate

    for r in results:
        text_key = (r["config"]["simText"], r["config"]["thetaText"])
        code_key = (r["config"]["simCode"], r["config"]["thetaCode"])
        by_text[text_key] = max(r["mccText"], by_text.get(text_key, float("-inf")))
        by_code[code_key] = max(r["mccCode"], by_code.get(code_key, float("-inf")))
        if is_backup_candidate(metric_by_name(text_key[0])):
            backups_text[text_key] = by_text[text_key]
            backups_code[code_key] = max(
                r["mccCode"], backups_code.get(code_key, float("-inf"))
            )

    def top(d: dict, share: float, fallback: int) -> list:
        ranked = sorted(d, key=lambda k: d[k], reverse=True)
        return ranked[: max(fallback, round(len(ranked) * share))]

    text_sel = top(by_text, 0.01, 2)
    code_sel = top(by_code, 0.01, 2)
    default_backup = [("cosineTokenNormalizedTermFrequency", 0.36)]
    bt = top(backups_text, 0.0, 1) or default_backup
    bc = top(backups_code, 0.0, 1) or default_backup
    return combined_plan(text_sel, bt, code_sel, bc)


def cmd_sweep(config: RunConfig) -> int:
    corpus = _load_extracted(config)
    gt = _require_ground_truth(config)
    if config.stage == "coarse":
        plan = coarse_plan()
    else:
        plan = _plan_from_prior(config, config.stage)
    print(f"stage {config.stage}: evaluating {len(plan)} configurations")
    results = run_sweep(plan, corpus, gt, repeats=config.repeats)
    outdir = Path(config.output_dir)
    write_sweep_report(results, outdir, stage=config.stage, figures=config.figures)
    best = results[0]
    print(f"best: {best.name} mccTotal={best.mcc_total:.4f}")
    print(f"report written to {outdir}")
    return EXIT_OK


def cmd_clones(config: RunConfig) -> int:
    corpus = _load_extracted(config)
    groups = detect_clones(
        latest_code_blocks(corpus, all_versions=config.all_versions),
        min_threads=config.min_threads,
        min_nloc=config.min_nloc,
    )
    urls_by_post: dict[int, list[str]] = {}
    for post_id in corpus.post_ids():
        version = corpus.posts[post_id][-1]
        urls = []
        for block in version.blocks:
            if block.block_type == "text":
                urls.extend(
                    link.url
                    for link in extract_urls(block.content, block.local_id, len(version.blocks))
                )
        if urls:
            urls_by_post[post_id] = urls
    outdir = Path(config.output_dir)
    write_clone_report(
        groups, outdir, config.min_threads, config.min_nloc,
        urls_by_post=urls_by_post, figures=config.figures,
    )
    print(f"{len(groups)} clone groups (minThreads={config.min_threads}, minNloc={config.min_nloc})")
    print(f"report written to {outdir}")
    return EXIT_OK


def cmd_synth(config: RunConfig) -> int:
    from .synthetic import generate_clone_corpus, generate_matching_corpus

    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if config.kind == "clones":
        generated = generate_clone_corpus(seed=config.seed)
        write_events(generated.events, outdir / "events.jsonl")
        print(f"clone corpus with {len(generated.events)} posts written to {outdir}")
        return EXIT_OK
    generated = generate_matching_corpus(n_posts=config.posts, seed=config.seed)
    write_events(generated.events, outdir / "events.jsonl")
    save_ground_truth(generated.ground_truth, outdir / "ground_truth.csv")
    print(
        f"synthetic corpus: {config.posts} posts, "
        f"{generated.connection_count} true connections, "
        f"{len(generated.duplicate_posts)} posts with duplicated blocks"
    )
    print(f"written to {outdir}")
    return EXIT_OK


def cmd_serve_annotate(config: RunConfig) -> int:
    from .annotate_server import serve

    corpus = _load_extracted(config)
    return serve(
        corpus,
        port=config.port,
        ground_truth_path=config.ground_truth,
        matching_config=config.matching_config(),
        ui_dir=config.ui_dir,
    )


COMMANDS = {
    "reconstruct": cmd_reconstruct,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "clones": cmd_clones,
    "synth": cmd_synth,
    "serve-annotate": cmd_serve_annotate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_run_config(getattr(args, "config", None))
        config = _apply_flags(config, args)
        return COMMANDS[args.command](config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorpusError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        return EXIT_OK
    except Exception as exc:  # pragma: no cover - defensive
        import traceback

        traceback.print_exc()
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
