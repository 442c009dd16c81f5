import json
import os

import pytest

from manipsem import cli
from manipsem.events import dump_trace
from manipsem.pipeline import analyze_trace, describe_document, describe_hand
from manipsem.synth import ScenarioSpec, generate_synthetic_trace
from conftest import box_cloud


@pytest.fixture(scope="module")
def screw_trace(tmp_path_factory):
    path = tmp_path_factory.mktemp("traces") / "screw.jsonl"
    gen = generate_synthetic_trace(ScenarioSpec("Screw", seed=7))
    dump_trace(gen.trace, str(path))
    return str(path)


@pytest.fixture(scope="module")
def nested_trace(tmp_path_factory):
    path = tmp_path_factory.mktemp("traces") / "nested.jsonl"
    inner = box_cloud((0.3, 0.3, 0.3), (0.7, 0.7, 0.7)).tolist()
    outer = box_cloud((0, 0, 0), (1, 1, 1), center=False).tolist()
    lines = []
    for k in range(3):
        lines.append(json.dumps({"t": k / 30.0, "objects": [
            {"id": "inner", "label": "ball", "role": "object", "points": inner},
            {"id": "outer", "label": "crate", "role": "object", "points": outer},
        ]}))
    path.write_text("\n".join(lines), encoding="utf-8")
    return str(path)


class TestRelationsCommand:
    def test_nested_rows_contain_wi_co(self, nested_trace, capsys):
        assert cli.main(["relations", nested_trace]) == 0
        out = capsys.readouterr().out
        assert "Wi" in out and "Co" in out

    def test_records_format(self, nested_trace, capsys):
        assert cli.main(["relations", nested_trace, "--format", "records"]) == 0
        rows = [json.loads(s) for s in capsys.readouterr().out.strip().splitlines()]
        assert {"frame", "a", "b", "ssr_ab", "ssr_ba", "dsr"} <= set(rows[0])

    def test_empty_objects_trace(self, tmp_path, capsys):
        p = tmp_path / "empty.jsonl"
        p.write_text(json.dumps({"t": 0.0, "objects": []}) + "\n")
        assert cli.main(["relations", str(p)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("frame\t")

    def test_malformed_file_exit_2(self, tmp_path, capsys):
        p = tmp_path / "bad.jsonl"
        p.write_text("definitely not json\n")
        assert cli.main(["relations", str(p)]) == 2
        assert "line 1" in capsys.readouterr().err

    def test_schema_error_exit_3(self, tmp_path):
        p = tmp_path / "schema.jsonl"
        rec = {"id": "a", "label": "a", "role": "paw", "points": [[0, 0, 0]] * 4}
        p.write_text(json.dumps({"t": 0.0, "objects": [rec]}) + "\n")
        assert cli.main(["relations", str(p)]) == 3


class TestDescribeCommand:
    def test_three_tier_document(self, screw_trace, capsys):
        assert cli.main(["describe", screw_trace, "--all-levels", "--hand", "both"]) == 0
        out = capsys.readouterr().out
        assert "Detailed sentences:" in out
        assert "Multiple sentences:" in out
        assert "One sentence:" in out
        assert ("The left hand performs screwing inside of a hard disk on the "
                "table by a screwdriver.") in out
        assert "For the right hand:" in out and "Idle." in out

    def test_level_selection(self, screw_trace, capsys):
        assert cli.main(["describe", screw_trace, "--level", "1", "--hand", "left"]) == 0
        out = capsys.readouterr().out
        assert "One sentence:" not in out

    def test_unavailable_level_exit_4(self, screw_trace, capsys):
        assert cli.main(["describe", screw_trace, "--level", "99"]) == 4
        assert "available" in capsys.readouterr().err

    def test_records_format(self, screw_trace, capsys):
        assert cli.main(["describe", screw_trace, "--format", "records",
                         "--hand", "left"]) == 0
        rows = [json.loads(s) for s in capsys.readouterr().out.strip().splitlines()]
        assert all({"hand", "level", "frames", "sentence"} <= set(r) for r in rows)


class TestParseCommand:
    def test_tree_output(self, tmp_path, capsys):
        p = tmp_path / "tokens.txt"
        p.write_text("Hand_L T O1 To Ground\n")
        assert cli.main(["parse", str(p)]) == 0
        out = capsys.readouterr().out
        for sym in ("S", "Sp", "Sub", "Ap", "SRp"):
            assert sym in out.split()

    def test_noparse_exit_6(self, tmp_path, capsys):
        p = tmp_path / "garbage.txt"
        p.write_text("To T nothing\n")
        assert cli.main(["parse", str(p)]) == 6
        assert "offset 0" in capsys.readouterr().err


class TestBenchCommand:
    def test_empty_dir_exit_5(self, tmp_path):
        assert cli.main(["bench", str(tmp_path)]) == 5

    def test_small_corpus_report(self, tmp_path, capsys):
        assert cli.main(["generate", "--corpus-out", str(tmp_path),
                         "--count", "18", "--seed", "3"]) == 0
        capsys.readouterr()
        out_dir = str(tmp_path / "reports")
        assert cli.main(["bench", str(tmp_path), "--compare", "--jobs", "2",
                         "--out-dir", out_dir]) == 0
        out = capsys.readouterr().out
        assert out.startswith("metric\thull\taabb")
        assert os.path.exists(os.path.join(out_dir, "bench_report.tsv"))
        assert os.path.exists(os.path.join(out_dir, "bench_report.records"))


class TestGenerateCommand:
    def test_round_trip_through_cli(self, tmp_path, capsys):
        out = tmp_path / "wipe.jsonl"
        gt = tmp_path / "wipe.gt.json"
        assert cli.main(["generate", "Wipe", "--seed", "5",
                         "--out", str(out), "--gt-out", str(gt)]) == 0
        capsys.readouterr()
        assert cli.main(["describe", str(out), "--hand", "left"]) == 0
        text = capsys.readouterr().out
        assert "The left hand wipes the table by a sponge." in text
        doc = json.loads(gt.read_text())
        assert doc["name"] == "Wipe" and doc["relations"]

    def test_seed_determinism_bytewise(self, tmp_path, capsys):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for path in (a, b):
            assert cli.main(["generate", "Cut", "--seed", "11", "--noise", "0.005",
                             "--out", str(path)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_stdout_emission(self, capsys):
        assert cli.main(["generate", "Hold", "--seed", "2"]) == 0
        out = capsys.readouterr().out
        first = json.loads(out.splitlines()[0])
        assert "t" in first and "objects" in first


class TestConfigPlumbing:
    def test_config_file_and_flag_precedence(self, tmp_path, monkeypatch, capsys):
        cfg_file = tmp_path / "ms.cfg"
        cfg_file.write_text("theta_near = 0.5\n eps_touch = 0.002\n")
        monkeypatch.setenv("MANIPSEM_CONFIG", str(cfg_file))
        from manipsem.config import load_run_config
        cfg = load_run_config()
        assert cfg.relation.theta_near == 0.5
        assert cfg.geometry.eps_touch == 0.002
        cfg2 = load_run_config().with_overrides(eps_touch="0.004")
        assert cfg2.geometry.eps_touch == 0.004

    def test_unknown_config_key_rejected(self):
        from manipsem.config import RunConfig
        with pytest.raises(KeyError):
            RunConfig().with_overrides(wibble=3)

    def test_set_flag(self, nested_trace, capsys):
        assert cli.main(["relations", nested_trace, "--set", "theta_near=0.9"]) == 0


class TestPipelineDocument:
    def test_document_structure(self, screw_trace):
        from manipsem.events import load_trace
        analysis = analyze_trace(load_trace(screw_trace))
        doc = describe_document(analysis, hands=("left", "right"))
        assert doc.count("For the left hand:") == 1
        assert doc.count("For the right hand:") == 1
        tops = [k for k, _ in describe_hand(analysis, "left", "max")]
        assert tops == [3]

    def test_absent_hand_reports_idle(self, nested_trace):
        from manipsem.events import load_trace
        analysis = analyze_trace(load_trace(nested_trace))
        pairs = describe_hand(analysis, "left")
        assert pairs[0][1].texts() == ["Idle."]
