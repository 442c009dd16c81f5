import numpy as np
import pytest

from manipsem.bench import (
    AccuracyReport,
    SPECIAL_LABELS,
    compare_models,
    evaluate_trace,
    load_corpus_dir,
    write_corpus_entry,
)
from manipsem.synth import make_corpus, make_relation_scene


@pytest.fixture(scope="module")
def small_corpus():
    return make_corpus(45, seed=7)


class TestCompareModels:
    def test_hull_beats_box_on_mixed_corpus(self, small_corpus):
        rep = compare_models(small_corpus)
        assert rep.total == 45 * 4
        assert rep.accuracy("hull") > rep.accuracy("aabb")

    def test_box_mode_emits_no_containment_labels(self, small_corpus):
        rep = compare_models(small_corpus)
        assert sum(rep.emitted["aabb"].values()) == 0
        assert all(not v for v in rep.distinguishability("aabb").values())
        assert all(rep.distinguishability("hull").values())

    def test_trivial_far_scene_both_perfect(self):
        rng = np.random.default_rng(0)
        items = [make_relation_scene("NoRelation", rng) for _ in range(4)]
        rep = compare_models(items)
        assert rep.accuracy("hull") == 1.0
        assert rep.accuracy("aabb") == 1.0

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            compare_models([])

    def test_parallel_matches_serial(self, small_corpus):
        serial = compare_models(small_corpus[:18])
        parallel = compare_models(small_corpus[:18], jobs=3)
        assert serial.total == parallel.total
        assert serial.correct == parallel.correct
        assert serial.confusion == parallel.confusion


class TestReport:
    def test_merge(self, small_corpus):
        a = evaluate_trace(*small_corpus[0])
        b = evaluate_trace(*small_corpus[1])
        merged = AccuracyReport().merge(a).merge(b)
        assert merged.total == a.total + b.total

    def test_table_format(self, small_corpus):
        rep = compare_models(small_corpus[:9])
        table = rep.to_table()
        lines = table.strip().splitlines()
        assert lines[0] == "metric\thull\taabb"
        assert any(line.startswith("accuracy\t") for line in lines)
        for lab in SPECIAL_LABELS:
            assert any(line.startswith(f"distinguishes_{lab.value}\t") for line in lines)

    def test_records_format(self, small_corpus):
        import json
        rep = compare_models(small_corpus[:9])
        records = [json.loads(line) for line in rep.to_records().strip().splitlines()]
        kinds = {r["kind"] for r in records}
        assert kinds == {"summary", "confusion"}
        summary = [r for r in records if r["kind"] == "summary"]
        assert {r["mode"] for r in summary} == {"hull", "aabb"}


class TestCorpusIo:
    def test_write_and_load_round_trip(self, tmp_path, small_corpus):
        for k, (trace, rels) in enumerate(small_corpus[:6]):
            write_corpus_entry(str(tmp_path), f"scene_{k:03d}", trace, rels)
        loaded = load_corpus_dir(str(tmp_path))
        assert len(loaded) == 6
        rep_disk = compare_models(loaded)
        rep_mem = compare_models(small_corpus[:6])
        assert rep_disk.correct == rep_mem.correct
