import io
import json
import subprocess
import sys

import pytest

from corpusops.cli import main


def run_cli(args, stdin_text="", monkeypatch=None, capsys=None):
    """Drive main() with patched stdio; returns (exit_code, stdout, stderr)."""
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin_text))
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def records(*objs):
    return "".join(json.dumps(o) + "\n" for o in objs)


def parse_lines(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


class TestDedupExactCli:
    def test_drops_duplicates_and_reports_stats(self, monkeypatch, capsys):
        stdin = records(
            {"id": "a", "text": "same text here"},
            {"id": "b", "text": "Same  TEXT here!"},
            {"id": "c", "text": "something else"},
        )
        code, out, err = run_cli(
            ["dedup-exact", "--capacity", "100", "--fpr", "0.001"],
            stdin, monkeypatch, capsys,
        )
        assert code == 0
        kept = parse_lines(out)
        assert [d["id"] for d in kept] == ["a", "c"]
        assert json.loads(err.splitlines()[-1]) == {"seen": 3, "dropped": 1}


class TestDedupNearCli:
    def test_cluster_report_and_kept_stream(self, tmp_path, monkeypatch, capsys):
        base = " ".join(f"tok{i}" for i in range(60))
        near = " ".join(f"tok{i}" for i in range(60)) + " extra"
        other = " ".join(f"zzz{i}" for i in range(60))
        stdin = records(
            {"id": "a", "text": base, "curated": True},
            {"id": "b", "text": near},
            {"id": "c", "text": other},
        )
        clusters_path = tmp_path / "clusters.jsonl"
        code, out, err = run_cli(
            ["dedup-near", "--seed", "5", "--clusters", str(clusters_path)],
            stdin, monkeypatch, capsys,
        )
        assert code == 0
        kept = parse_lines(out)
        assert [d["id"] for d in kept] == ["a", "c"]
        assert kept[0]["dup_count"] == 2  # cluster size recorded
        report = [json.loads(l) for l in clusters_path.read_text().splitlines()]
        assert report == [{"representative": "a", "members": ["a", "b"], "size": 2}]


class TestMixCli:
    def test_manifest_records_and_quota(self, tmp_path, monkeypatch, capsys):
        stats = tmp_path / "groups.jsonl"
        stats.write_text(
            records(
                {"group": "cc-unique", "tokens": 1000, "bucket": "1", "source_class": "CommonCrawl"},
                {"group": "cc-dup2_5", "tokens": 500, "bucket": "2-5", "source_class": "CommonCrawl"},
            )
        )
        code, out, err = run_cli(
            ["mix", "--stats", str(stats), "--target-tokens", "10"],
            "", monkeypatch, capsys,
        )
        assert code == 0
        rows = parse_lines(out)
        assert [r["proportion"] for r in rows] == [0.4, 0.6]
        assert [r["quota_tokens"] for r in rows] == [4, 6]
        assert "cc-unique" in err  # human-readable table on stderr


class TestTransformCli:
    def test_fim_round_trip_tokens_present(self, monkeypatch, capsys):
        stdin = records({"id": "f", "text": "def f():\n    return 42\n"})
        code, out, _ = run_cli(
            ["transform", "fim", "--seed", "9"], stdin, monkeypatch, capsys
        )
        assert code == 0
        text = parse_lines(out)[0]["text"]
        for token in ("<|fim_prefix|>", "<|fim_middle|>", "<|fim_suffix|>"):
            assert text.count(token) == 1

    def test_fim_deterministic(self, monkeypatch, capsys):
        stdin = records({"id": "f", "text": "abcdefgh"})
        _, out1, _ = run_cli(["transform", "fim", "--seed", "7"], stdin, monkeypatch, capsys)
        _, out2, _ = run_cli(["transform", "fim", "--seed", "7"], stdin, monkeypatch, capsys)
        assert out1 == out2

    def test_fim_skips_records_containing_reserved_tokens(self, monkeypatch, capsys):
        stdin = records(
            {"id": "bad", "text": "x<|fim_middle|>y"},
            {"id": "good", "text": "plain code"},
        )
        code, out, err = run_cli(["transform", "fim"], stdin, monkeypatch, capsys)
        assert code == 0
        assert [d["id"] for d in parse_lines(out)] == ["good"]
        assert "bad" in err

    def test_topo_orders_dependencies_first(self, monkeypatch, capsys):
        stdin = records(
            {
                "repo": "demo",
                "files": [
                    {"path": "main.py", "text": "import util\n"},
                    {"path": "util.py", "text": "X = 1\n"},
                ],
            }
        )
        code, out, _ = run_cli(["transform", "topo"], stdin, monkeypatch, capsys)
        assert code == 0
        text = parse_lines(out)[0]["text"]
        assert text.index("# util.py") < text.index("# main.py")

    def test_qa_appends_pairs(self, monkeypatch, capsys):
        stdin = records(
            {"id": "d", "text": "Body.", "qa": [{"q": "Q1?", "a": "A1."}]}
        )
        code, out, _ = run_cli(["transform", "qa"], stdin, monkeypatch, capsys)
        assert code == 0
        row = parse_lines(out)[0]
        assert row["text"] == "Body.\n\nQ: Q1?\nA: A1.\n"
        assert "qa" not in row


class TestPackCli:
    def test_whitespace_counting_and_stats_record(self, monkeypatch, capsys):
        stdin = records(
            {"id": "a", "text": "w1 w2 w3 w4 w5"},
            {"id": "b", "text": "w1 w2 w3"},
            {"id": "c", "text": "w1 w2 w3 w4"},
            {"id": "d", "text": "w1 w2"},
        )
        code, out, _ = run_cli(
            ["pack", "--capacity", "8", "--max-open", "2"],
            stdin, monkeypatch, capsys,
        )
        assert code == 0
        rows = parse_lines(out)
        sequences, stats = rows[:-1], rows[-1]
        assert [s["padding"] for s in sequences] == [0, 2]
        assert sequences[0]["entries"] == [{"id": "a", "len": 5}, {"id": "b", "len": 3}]
        assert stats["padding_ratio"] == 2 / 16
        assert stats["truncation_ratio"] == 0.0

    def test_field_counting(self, monkeypatch, capsys):
        stdin = records({"id": "a", "text": "ignored", "n_tokens": 7})
        code, out, _ = run_cli(
            ["pack", "--capacity", "8", "--count-with", "field:n_tokens"],
            stdin, monkeypatch, capsys,
        )
        rows = parse_lines(out)
        assert rows[0]["entries"] == [{"id": "a", "len": 7}]


class TestMonitorCli:
    def test_webhook_from_environment(self, monkeypatch, capsys):
        # Endpoint may come from CORPUSOPS_WEBHOOK instead of --webhook;
        # an unreachable one is logged, never fatal.
        monkeypatch.setenv("CORPUSOPS_WEBHOOK", "http://127.0.0.1:1/unreachable")
        stdin = records(*({"step": i, "loss": 5.0} for i in range(10)))
        code, out, _ = run_cli(
            [
                "monitor", "--total-steps", "100",
                "--alert", "3,2.0,3.0", "--restart", "5,2.5,4.0",
                "--interval", "10",
            ],
            stdin, monkeypatch, capsys,
        )
        assert code == 0
        assert any(e["tier"] == 2 for e in parse_lines(out))

    def test_events_with_rollback(self, monkeypatch, capsys):
        values = [1.0] * 20 + [5.0] * 8 + [1.0] * 10
        stdin = records(*({"step": 1030 + i, "loss": v} for i, v in enumerate(values)))
        code, out, _ = run_cli(
            [
                "monitor", "--total-steps", "2000",
                "--alert", "3,2.0,3.0", "--restart", "5,2.5,4.0",
                "--interval", "500",
            ],
            stdin, monkeypatch, capsys,
        )
        assert code == 0
        events = parse_lines(out)
        level_two = [e for e in events if e["tier"] == 2]
        assert len(level_two) == 1
        assert level_two[0]["step"] == 1054
        assert level_two[0]["rollback_step"] == 1000


class TestPlanCli:
    def test_plan_record(self, monkeypatch, capsys):
        code, out, _ = run_cli(
            [
                "plan", "--batch-tokens", "9.8e6", "--lr", "1.5e-4",
                "--tokens", "12.25e12", "--wd", "0.05",
            ],
            "", monkeypatch, capsys,
        )
        assert code == 0
        row = parse_lines(out)[0]
        assert row["steps"] == 1250000
        assert row["tau_epoch"] == pytest.approx(0.10666666666666667)

    def test_tau_with_tpp_scaling(self, monkeypatch, capsys):
        code, out, _ = run_cli(
            [
                "plan", "--batch-tokens", "1e6", "--lr", "1e-4", "--tokens", "1e12",
                "--tau", "0.2", "--tpp-ref", "20", "--tpp-target", "175",
            ],
            "", monkeypatch, capsys,
        )
        row = parse_lines(out)[0]
        assert row["tau_epoch"] == pytest.approx(0.06761234037828133, rel=1e-9)

    def test_schedule_table_ends_on_floor(self, monkeypatch, capsys):
        code, out, _ = run_cli(
            [
                "plan", "--batch-tokens", "1e6", "--lr", "1.5e-4", "--tokens", "1e12",
                "--wd", "0.05", "--schedule", "cosine_to_floor,1.5e-4,1.5e-6,100,1000",
            ],
            "", monkeypatch, capsys,
        )
        rows = parse_lines(out)
        assert rows[-1] == {"step": 1000, "lr": 1.5e-6}

    def test_wd_and_tau_together_rejected(self, monkeypatch, capsys):
        with pytest.raises(SystemExit):
            run_cli(
                ["plan", "--batch-tokens", "1", "--lr", "1", "--tokens", "10",
                 "--wd", "0.1", "--tau", "0.1"],
                "", monkeypatch, capsys,
            )


class TestEvalstatsCli:
    def test_passk(self, monkeypatch, capsys):
        code, out, _ = run_cli(
            ["evalstats", "passk", "--n", "4", "--c", "2", "--k", "2"],
            "", monkeypatch, capsys,
        )
        assert code == 0
        assert float(out.strip()) == pytest.approx(5 / 6)

    def test_mem(self, tmp_path, monkeypatch, capsys):
        pairs = tmp_path / "pairs.jsonl"
        pairs.write_text(
            records(
                {"reference": "The answer is 4.", "generated": "The answer is 4."},
                {"reference": "No clue.", "generated": "Something else."},
            )
        )
        code, out, _ = run_cli(
            ["evalstats", "mem", "--pairs", str(pairs)], "", monkeypatch, capsys
        )
        assert code == 0
        assert float(out.strip()) == 50.0


class TestErrorPaths:
    def test_malformed_lines_skip_and_report(self, monkeypatch, capsys):
        stdin = 'not json\n{"id":"a","text":"fine"}\n'
        code, out, err = run_cli(
            ["dedup-exact", "--capacity", "10"], stdin, monkeypatch, capsys
        )
        assert code == 0
        assert [d["id"] for d in parse_lines(out)] == ["a"]
        assert "line 1" in err

    def test_domain_errors_exit_2(self, monkeypatch, capsys):
        code, _, err = run_cli(
            ["evalstats", "passk", "--n", "2", "--c", "1", "--k", "5"],
            "", monkeypatch, capsys,
        )
        assert code == 2
        assert "error:" in err


def test_module_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "corpusops", "evalstats", "passk",
         "--n", "10", "--c", "0", "--k", "3"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0"
