"""CLI subcommands, exit codes, and report outputs."""

import csv
import json

import pytest

from postlineage.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


def run(*argv):
    return main(list(argv))


class TestReconstruct:
    def test_demo_corpus_deterministic_golden_tables(self, tmp_path, demo_events_file):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert run("reconstruct", "--input", str(demo_events_file), "--output-dir", str(out_a)) == EXIT_OK
        assert run("reconstruct", "--input", str(demo_events_file), "--output-dir", str(out_b)) == EXIT_OK
        for name in ("PostVersion.csv", "PostBlockVersion.csv", "PostBlockDiff.csv",
                     "PostVersionUrl.csv", "TitleVersion.csv", "events.jsonl"):
            assert (out_a / name).read_text() == (out_b / name).read_text(), name

        with (out_a / "PostBlockVersion.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        # Known lineage of the demo corpus: post 200's fenced code block
        # changes one line between its two versions.
        code_rows = [r for r in rows if r["PostId"] == "200" and r["PostBlockTypeId"] == "2"]
        assert len(code_rows) == 2
        assert code_rows[1]["PredLocalId"] == code_rows[0]["LocalId"]
        assert code_rows[1]["PredEqual"] == "0"
        assert 0.23 <= float(code_rows[1]["PredSimilarity"]) < 1.0

        summary = json.loads((out_a / "summary.json").read_text())
        assert summary["posts"] == 3
        assert (out_a / "summary.png").exists()

    def test_empty_input_header_only_exit_zero(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        out = tmp_path / "out"
        assert run("reconstruct", "--input", str(empty), "--output-dir", str(out)) == EXIT_OK
        with (out / "PostBlockVersion.csv").open() as fh:
            assert len(list(csv.reader(fh))) == 1

    def test_bad_path_exit_two_names_path(self, tmp_path, capsys):
        missing = tmp_path / "nope.jsonl"
        assert run("reconstruct", "--input", str(missing)) == EXIT_DATA
        assert str(missing) in capsys.readouterr().err

    def test_missing_input_is_usage_error(self):
        assert run("reconstruct") == EXIT_USAGE

    def test_threads_flag_matches_single_threaded_output(self, tmp_path, demo_events_file):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run("reconstruct", "--input", str(demo_events_file), "--output-dir", str(out_a), "--threads", "1")
        run("reconstruct", "--input", str(demo_events_file), "--output-dir", str(out_b), "--threads", "2")
        assert (out_a / "PostBlockVersion.csv").read_text() == (out_b / "PostBlockVersion.csv").read_text()

    def test_config_file_with_flag_override(self, tmp_path, demo_events_file):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"input": str(demo_events_file), "theta_text": 0.5}))
        out = tmp_path / "out"
        assert run("reconstruct", "--config", str(config), "--output-dir", str(out)) == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert summary["matchingConfig"]["thetaText"] == 0.5
        out2 = tmp_path / "out2"
        assert run("reconstruct", "--config", str(config), "--output-dir", str(out2),
                   "--theta-text", "0.2") == EXIT_OK
        summary2 = json.loads((out2 / "summary.json").read_text())
        assert summary2["matchingConfig"]["thetaText"] == 0.2


class TestSynthAndEvaluate:
    def test_synthetic_ground_truth_round_trip(self, tmp_path):
        data = tmp_path / "data"
        assert run("synth", "--posts", "12", "--seed", "3", "--output-dir", str(data)) == EXIT_OK
        out = tmp_path / "eval"
        code = run(
            "evaluate",
            "--input", str(data / "events.jsonl"),
            "--ground-truth", str(data / "ground_truth.csv"),
            "--output-dir", str(out),
        )
        assert code == EXIT_OK
        report = json.loads((out / "sweep_evaluate.json").read_text())
        result = report["results"][0]
        assert result["mccText"] > 0.8
        assert result["mccCode"] > 0.8

    def test_missing_ground_truth_file_exit_two(self, tmp_path, demo_events_file):
        assert run(
            "evaluate", "--input", str(demo_events_file),
            "--ground-truth", str(tmp_path / "absent.csv"),
            "--output-dir", str(tmp_path / "out"),
        ) == EXIT_DATA

    def test_coarse_sweep_full_enumeration(self, tmp_path):
        data = tmp_path / "data"
        assert run("synth", "--posts", "2", "--seed", "1", "--output-dir", str(data)) == EXIT_OK
        out = tmp_path / "sweep"
        code = run(
            "sweep", "--stage", "coarse",
            "--input", str(data / "events.jsonl"),
            "--ground-truth", str(data / "ground_truth.csv"),
            "--output-dir", str(out), "--no-figures",
        )
        assert code == EXIT_OK
        with (out / "sweep_coarse.csv").open() as fh:
            rows = [line for line in fh if not line.startswith("#")]
        assert len(rows) == 1474 + 1  # header plus one row per configuration
        report = json.loads((out / "sweep_coarse.json").read_text())
        assert len(report["results"]) == 1474
        # Feed the coarse report into the fine stage.
        fine_out = tmp_path / "fine"
        code = run(
            "sweep", "--stage", "fine",
            "--input", str(data / "events.jsonl"),
            "--ground-truth", str(data / "ground_truth.csv"),
            "--from", str(out / "sweep_coarse.json"),
            "--output-dir", str(fine_out), "--no-figures",
        )
        assert code == EXIT_OK
        fine = json.loads((fine_out / "sweep_fine.json").read_text())
        assert len(fine["results"]) % 101 == 0  # selected metrics x fine grid
        # And the fine report into the combined stage.
        combined_out = tmp_path / "combined"
        code = run(
            "sweep", "--stage", "combined",
            "--input", str(data / "events.jsonl"),
            "--ground-truth", str(data / "ground_truth.csv"),
            "--from", str(fine_out / "sweep_fine.json"),
            "--output-dir", str(combined_out), "--no-figures",
        )
        assert code == EXIT_OK
        combined = json.loads((combined_out / "sweep_combined.json").read_text())
        assert combined["results"], "combined stage produced no rows"
        for result in combined["results"]:
            assert result["config"]["backupText"] is not None
            assert result["config"]["backupCode"] is not None

    def test_sweep_fine_requires_prior_report(self, tmp_path, demo_events_file):
        gt = tmp_path / "gt.csv"
        gt.write_text("postId,postHistoryId,localId,blockType,predLocalId\n")
        assert run(
            "sweep", "--stage", "fine", "--input", str(demo_events_file),
            "--ground-truth", str(gt), "--output-dir", str(tmp_path / "out"),
        ) == EXIT_USAGE


class TestClones:
    def test_clone_report_with_thresholds_in_header(self, tmp_path):
        data = tmp_path / "data"
        assert run("synth", "--kind", "clones", "--seed", "4", "--output-dir", str(data)) == EXIT_OK
        out = tmp_path / "clones"
        assert run(
            "clones", "--input", str(data / "events.jsonl"), "--output-dir", str(out),
            "--min-threads", "2", "--min-nloc", "20",
        ) == EXIT_OK
        text = (out / "clones.csv").read_text()
        assert text.startswith("# minThreads=2\n# minNloc=20\n")
        report = json.loads((out / "clones.json").read_text())
        assert report["minNloc"] == 20
        assert all(g["nloc"] >= 20 for g in report["groups"])
        assert (out / "clones.png").exists()

    def test_trivial_corpus_empty_report(self, tmp_path, demo_events_file):
        out = tmp_path / "out"
        assert run(
            "clones", "--input", str(demo_events_file), "--output-dir", str(out),
            "--min-nloc", "20",
        ) == EXIT_OK
        report = json.loads((out / "clones.json").read_text())
        assert report["groups"] == []


class TestUsage:
    def test_unknown_command(self):
        assert run("frobnicate") == EXIT_USAGE

    def test_unknown_config_key(self, tmp_path, demo_events_file):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"inputt": "x"}))
        assert run("reconstruct", "--config", str(config),
                   "--input", str(demo_events_file)) == EXIT_USAGE
