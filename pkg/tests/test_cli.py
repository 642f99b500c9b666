import json
import sys
from pathlib import Path

import pytest

from dfbench.cli import main
from dfbench.corpus import read_manifest
from dfbench.submission import read_submission_csv, write_submission_csv

STUB_DETECTOR = r"""
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    sys.stdout.write(json.dumps({"id": req["id"], "score": 0.25 if "00000" in req["id"] else 0.75}) + "\n")
    sys.stdout.flush()
"""


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    reals = root / "reals"
    assert main(["make-reals", "--out", str(reals), "--count", "16", "--seed", "3", "--size", "48"]) == 0
    out = root / "corpus"
    assert (
        main(
            [
                "synth",
                "--reals",
                str(reals),
                "--out",
                str(out),
                "--seed",
                "5",
                "--scale",
                "0.004",
            ]
        )
        == 0
    )
    return out


class TestSynth:
    def test_writes_manifest_and_views(self, corpus):
        assert (corpus / "manifest.csv").exists()
        assert (corpus / "train.csv").exists()
        assert (corpus / "view_public_test.csv").exists()
        assert (corpus / "view_meta.csv").exists()

    def test_minimum_scale_builds_two_item_splits(self, corpus):
        records = read_manifest(corpus / "manifest.csv")
        by_split = {}
        for r in records:
            by_split[r.split] = by_split.get(r.split, 0) + 1
        assert by_split == {"train": 4, "val": 2, "public_test": 4, "private_test": 4}


class TestScoreCommand:
    def test_score_report(self, corpus, capsys, tmp_path):
        records = read_manifest(corpus / "manifest.csv")
        train = [r for r in records if r.split == "train"]
        rows = [(r.id, 0.9 if r.label == 1 else 0.1) for r in train]
        sub = tmp_path / "sub.csv"
        write_submission_csv(rows, sub)
        code = main(
            ["score", "--manifest", str(corpus / "train.csv"), "--submission", str(sub), "--by-group", "--ci", "150"]
        )
        captured = capsys.readouterr().out
        assert code == 0
        assert "auc: 1.000000" in captured
        assert "auc[self_blend]: 1.000000" in captured
        assert "ci95: 1.000000 1.000000" in captured

    def test_mismatched_submission_fails(self, corpus, tmp_path, capsys):
        sub = tmp_path / "bad.csv"
        write_submission_csv([("nope", 0.5)], sub)
        assert main(["score", "--manifest", str(corpus / "train.csv"), "--submission", str(sub)]) == 2


class TestViewCommand:
    def test_view_written_and_shuffled_deterministically(self, corpus, tmp_path):
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        main(["view", "--manifest", str(corpus / "train.csv"), "--out", str(out_a), "--seed", "9"])
        main(["view", "--manifest", str(corpus / "train.csv"), "--out", str(out_b), "--seed", "9"])
        assert out_a.read_bytes() == out_b.read_bytes()
        assert "label" not in out_a.read_text().splitlines()[0]


class TestFuseCommand:
    def make_inputs(self, tmp_path, columns):
        paths = []
        for k, col in enumerate(columns):
            path = tmp_path / f"m{k}.csv"
            write_submission_csv([(f"i{j}", v) for j, v in enumerate(col)], path)
            paths.append(str(path))
        return paths

    def test_weighted(self, tmp_path):
        paths = self.make_inputs(tmp_path, [[0.2, 0.4], [0.8, 0.6]])
        out = tmp_path / "fused.csv"
        assert main(["fuse", "--method", "weighted", "--weights", "0.35,0.65", "--inputs", *paths, "--out", str(out)]) == 0
        rows = dict(read_submission_csv(out))
        assert abs(rows["i0"] - 0.59) <= 1e-12

    def test_discretized(self, tmp_path):
        paths = self.make_inputs(tmp_path, [[0.93], [0.78], [0.67]])
        out = tmp_path / "fused.csv"
        assert main(["fuse", "--method", "discretized", "--weights", "1,2,2", "--inputs", *paths, "--out", str(out)]) == 0
        rows = dict(read_submission_csv(out))
        assert abs(rows["i0"] - 0.78) <= 1e-12

    def test_rank(self, tmp_path):
        paths = self.make_inputs(tmp_path, [[0.1, 0.9, 0.4]])
        out = tmp_path / "fused.csv"
        assert main(["fuse", "--method", "rank", "--inputs", *paths, "--out", str(out)]) == 0
        rows = dict(read_submission_csv(out))
        assert (rows["i0"], rows["i1"], rows["i2"]) == (0.0, 1.0, 0.5)

    def test_robust_tta(self, tmp_path):
        # two models x two views: model files m0,m1 are view 0; m2,m3 view 1
        paths = self.make_inputs(tmp_path, [[0.2], [0.4], [0.6], [0.8]])
        out = tmp_path / "fused.csv"
        assert (
            main(
                ["fuse", "--method", "robust-tta", "--weights", "0.5,0.5", "--views", "2", "--inputs", *paths, "--out", str(out)]
            )
            == 0
        )
        rows = dict(read_submission_csv(out))
        assert abs(rows["i0"] - 0.5) <= 1e-12

    def test_logit_mean(self, tmp_path):
        paths = self.make_inputs(tmp_path, [[2.0], [0.0]])
        out = tmp_path / "fused.csv"
        assert main(["fuse", "--method", "logit-mean", "--inputs", *paths, "--out", str(out)]) == 0
        rows = dict(read_submission_csv(out))
        assert abs(rows["i0"] - 1.0 / (1.0 + 2.718281828459045**-1.0)) <= 1e-9


class TestRunDetector:
    def test_streams_and_writes_submission(self, corpus, tmp_path):
        stub = tmp_path / "stub.py"
        stub.write_text(STUB_DETECTOR)
        out = tmp_path / "sub.csv"
        code = main(
            [
                "run-detector",
                "--manifest",
                str(corpus / "view_public_test.csv"),
                "--images-root",
                str(corpus),
                "--cmd",
                f"{sys.executable} {stub}",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = read_submission_csv(out)
        assert len(rows) == 4
        assert all(s in (0.25, 0.75) for _, s in rows)


class TestLeaderboardCommand:
    def test_prints_ranked_table(self, tmp_path, capsys):
        from datetime import datetime, timedelta, timezone

        from dfbench.service import BenchService, PhaseConfig, ServiceConfig, SubmissionStore
        from test_service import tiny_manifest

        tiny_manifest(tmp_path / "pub.csv", "public_test", [("p1", 1), ("p2", 0)])
        t0 = datetime(2026, 3, 20, tzinfo=timezone.utc)
        config = ServiceConfig(
            phases={
                "public_test": PhaseConfig(
                    name="public_test",
                    manifest=tmp_path / "pub.csv",
                    opens_at=t0,
                    closes_at=t0 + timedelta(hours=24),
                    quota=1,
                )
            }
        )
        service = BenchService(config, SubmissionStore(tmp_path / "data"), now_fn=lambda: t0 + timedelta(hours=1))
        service.ingest_submission("gamma", "public_test", [("p1", 0.9), ("p2", 0.1)])
        assert main(["leaderboard", "--data", str(tmp_path / "data")]) == 0
        out = capsys.readouterr().out
        assert "gamma" in out and "1.0000" in out
