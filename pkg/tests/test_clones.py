"""Snippet normalization, fingerprinting, and clone grouping."""

import random
import string

import pytest

from postlineage.clones import (
    Occurrence,
    detect_clones,
    fingerprint64,
    latest_code_blocks,
    normalize_snippet,
)
from postlineage.corpus_io import extract_corpus, ingest
from postlineage.synthetic import generate_clone_corpus


class TestNormalizeSnippet:
    def test_newline_collapse_and_trailing_strip(self):
        snippet = normalize_snippet("a\n\n\nb\n")
        assert snippet.whitespace_normalized == "a\nb"
        assert snippet.nloc == 2

    def test_bracket_only_lines_removed(self):
        snippet = normalize_snippet("if (x)\n{\n  y();\n}\n")
        assert snippet.whitespace_normalized == "if (x)\n  y();"
        assert snippet.nloc == 2

    def test_bracket_line_with_interior_space_kept(self):
        assert normalize_snippet("[ ]").nloc == 1
        assert normalize_snippet("  } ").nloc == 0

    def test_fingerprint_input_strips_non_alphanumerics(self):
        a = normalize_snippet("int  x = 1 ;")
        b = normalize_snippet("intx1")
        assert a.fingerprint_input == b.fingerprint_input == "intx1"

    def test_idempotent(self):
        rng = random.Random(1)
        for _ in range(100):
            raw = "\n".join(
                rng.choice(["x = f(y);", "{", "}", "", "  ", "[]", "done()"])
                for _ in range(rng.randint(0, 12))
            )
            once = normalize_snippet(raw)
            twice = normalize_snippet(once.whitespace_normalized)
            assert twice.whitespace_normalized == once.whitespace_normalized
            assert twice.nloc == once.nloc

    def test_empty(self):
        snippet = normalize_snippet("")
        assert snippet.nloc == 0
        assert snippet.fingerprint_input == ""


class TestFingerprint:
    def test_deterministic_documented_value(self):
        # Frozen: BLAKE2b with an 8-byte digest, big-endian.
        assert fingerprint64("") == 0xE4A6A0577479B2B4
        assert fingerprint64("intx1") == fingerprint64("intx1")

    def test_collision_free_on_random_sample(self):
        rng = random.Random(2)
        seen = {}
        for _ in range(100_000):
            s = "".join(rng.choice(string.ascii_letters + string.digits) for _ in range(rng.randint(1, 30)))
            h = fingerprint64(s)
            if h in seen:
                assert seen[h] == s
            seen[h] = s

    def test_single_character_difference_changes_hash(self):
        assert fingerprint64("abcdef") != fingerprint64("abcdeg")


def _occ(thread, post, local=1):
    return Occurrence(thread_id=thread, post_id=post, post_history_id=post * 10, local_id=local)


SNIPPET_25 = "\n".join(f"line{i} = call{i}(arg{i});" for i in range(25))
SNIPPET_10 = "\n".join(f"val{i} = fn{i}(x);" for i in range(10))


class TestDetectClones:
    def test_cross_thread_clone_found(self):
        blocks = [(_occ(1, 11), SNIPPET_25), (_occ(2, 22), SNIPPET_25)]
        groups = detect_clones(blocks, min_threads=2, min_nloc=20)
        assert len(groups) == 1
        assert groups[0].thread_count == 2
        assert groups[0].nloc == 25

    def test_within_thread_duplicate_excluded(self):
        blocks = [(_occ(1, 11), SNIPPET_25), (_occ(1, 12), SNIPPET_25)]
        assert detect_clones(blocks, min_threads=2, min_nloc=6) == []

    def test_nloc_threshold_semantics(self):
        blocks = [(_occ(1, 11), SNIPPET_10), (_occ(2, 22), SNIPPET_10)]
        assert detect_clones(blocks, min_nloc=20) == []
        found = detect_clones(blocks, min_nloc=6)
        assert len(found) == 1 and found[0].nloc == 10

    def test_whitespace_and_bracket_noise_groups_together(self):
        noisy = "{\n" + SNIPPET_10.replace(" = ", "=") + "\n\n}\n"
        blocks = [(_occ(1, 11), SNIPPET_10), (_occ(2, 22), noisy)]
        groups = detect_clones(blocks, min_nloc=6)
        assert len(groups) == 1
        assert groups[0].thread_count == 2

    def test_monotonic_in_thresholds(self):
        rng = random.Random(5)
        blocks = []
        for i in range(40):
            content = "\n".join(f"s{i}l{j} = g(h{j});" for j in range(rng.randint(2, 30)))
            for t in range(rng.randint(1, 4)):
                blocks.append((_occ(t, 100 + i), content))
        base = {g.fingerprint for g in detect_clones(blocks, min_threads=2, min_nloc=6)}
        stricter_nloc = {g.fingerprint for g in detect_clones(blocks, min_threads=2, min_nloc=20)}
        stricter_threads = {g.fingerprint for g in detect_clones(blocks, min_threads=3, min_nloc=6)}
        assert stricter_nloc <= base
        assert stricter_threads <= base

    def test_ranking(self):
        three_way = "\n".join(f"a{i} = b{i}(c);" for i in range(8))
        blocks = [
            (_occ(1, 1), SNIPPET_25), (_occ(2, 2), SNIPPET_25),
            (_occ(3, 3), three_way), (_occ(4, 4), three_way), (_occ(5, 5), three_way),
        ]
        groups = detect_clones(blocks, min_nloc=6)
        assert [g.thread_count for g in groups] == [3, 2]

    def test_grouping_is_exact_not_just_hash_equal(self):
        groups = detect_clones(
            [(_occ(1, 1), SNIPPET_10), (_occ(2, 2), SNIPPET_10)], min_nloc=6
        )
        assert groups[0].normalized_content == normalize_snippet(SNIPPET_10).whitespace_normalized


class TestPlantedCorpus:
    def test_planted_clones_recovered_exactly(self):
        generated = generate_clone_corpus(seed=3)
        corpus = extract_corpus(ingest(generated.events))
        blocks = list(latest_code_blocks(corpus))

        planted_fps = {
            fingerprint64(normalize_snippet("\n".join(p.lines)).fingerprint_input): p
            for p in generated.planted
        }
        for min_nloc in (6, 20):
            groups = detect_clones(blocks, min_threads=2, min_nloc=min_nloc)
            found = {g.fingerprint for g in groups}
            expected = {
                fp for fp, p in planted_fps.items() if p.nloc >= min_nloc
            }
            assert found == expected, f"min_nloc={min_nloc}"
            for g in groups:
                assert g.thread_count == len(set(planted_fps[g.fingerprint].thread_ids))
                assert g.nloc == planted_fps[g.fingerprint].nloc

    def test_all_versions_flag_widens_selection(self):
        generated = generate_clone_corpus(seed=3)
        corpus = extract_corpus(ingest(generated.events))
        latest = list(latest_code_blocks(corpus))
        everything = list(latest_code_blocks(corpus, all_versions=True))
        assert len(everything) >= len(latest)
