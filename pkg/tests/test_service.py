import csv
import threading
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from dfbench.corpus.manifest import ManifestRecord, write_manifest
from dfbench.degrade.recipe import DegradationRecipe
from dfbench.service import (
    BenchService,
    ConfigError,
    DuplicateIdsError,
    ExtraIdsError,
    MissingIdsError,
    PhaseConfig,
    QuotaExceededError,
    ScoreRangeError,
    ServiceConfig,
    SubmissionStore,
    SubmissionsNotAcceptedError,
    TeamScores,
    UnknownPhaseError,
    WindowClosedError,
    rank_entries,
)

T0 = datetime(2026, 3, 20, 0, 0, 0, tzinfo=timezone.utc)

FIXTURE = Path(__file__).parent / "data" / "reference_leaderboard.csv"


def load_reference_rows() -> list[TeamScores]:
    rows = []
    with open(FIXTURE, newline="") as fh:
        for index, row in enumerate(csv.DictReader(fh)):
            rows.append(
                TeamScores(
                    team=row["team"],
                    public_auc=float(row["public_auc"]),
                    private_auc=float(row["private_auc"]) if row["private_auc"] else None,
                    order_key=f"t{index:03d}",
                )
            )
    return rows


def tiny_manifest(path: Path, split: str, ids_labels: list[tuple[str, int]]) -> None:
    recipe = DegradationRecipe((), seed=0)
    records = [
        ManifestRecord(
            id=i,
            path=f"images/{split}/{i}.png",
            label=l,
            split=split,
            fake_method="none" if l == 0 else "self_blend",
            recipe=recipe,
        )
        for i, l in ids_labels
    ]
    write_manifest(records, path)


@pytest.fixture
def service(tmp_path):
    # 4-item public split matching the metrics fixture; 4-item val and private
    tiny_manifest(tmp_path / "val.csv", "val", [("v1", 1), ("v2", 1), ("v3", 0), ("v4", 0)])
    tiny_manifest(tmp_path / "pub.csv", "public_test", [("p1", 1), ("p2", 1), ("p3", 0), ("p4", 0)])
    tiny_manifest(tmp_path / "priv.csv", "private_test", [("q1", 1), ("q2", 1), ("q3", 0), ("q4", 0)])
    config = ServiceConfig(
        phases={
            "validation": PhaseConfig(
                name="validation",
                manifest=tmp_path / "val.csv",
                opens_at=T0 - timedelta(days=20),
                closes_at=T0 + timedelta(days=20),
                quota=10,
            ),
            "public_test": PhaseConfig(
                name="public_test",
                manifest=tmp_path / "pub.csv",
                opens_at=T0,
                closes_at=T0 + timedelta(hours=24),
                quota=1,
            ),
            "private_test": PhaseConfig(name="private_test", manifest=tmp_path / "priv.csv"),
        },
        challenge_replica=True,
    )
    clock = {"now": T0 + timedelta(hours=1)}
    svc = BenchService(config, SubmissionStore(tmp_path / "data"), now_fn=lambda: clock["now"])
    svc._clock = clock
    return svc


PERFECT = [("p1", 1.0), ("p2", 0.9), ("p3", 0.1), ("p4", 0.0)]
FIXTURE_75 = [("p1", 0.9), ("p2", 0.4), ("p3", 0.6), ("p4", 0.1)]


class TestIngestValidation:
    def test_accepts_and_scores_perfect_submission(self, service):
        record = service.ingest_submission("team-a", "public_test", PERFECT)
        assert record.auc == 1.0
        assert record.receipt.startswith("pub-")

    def test_constant_scores_give_half(self, service):
        record = service.ingest_submission("team-a", "public_test", [(i, 0.5) for i in ("p1", "p2", "p3", "p4")])
        assert record.auc == 0.5

    def test_four_item_fixture_scores_three_quarters(self, service):
        record = service.ingest_submission("team-a", "public_test", FIXTURE_75)
        assert record.auc == 0.75

    def test_unknown_phase(self, service):
        with pytest.raises(UnknownPhaseError):
            service.ingest_submission("t", "warmup", PERFECT)

    def test_private_rejects_direct_submissions(self, service):
        with pytest.raises(SubmissionsNotAcceptedError):
            service.ingest_submission("t", "private_test", [("q1", 1.0), ("q2", 1.0), ("q3", 0.0), ("q4", 0.0)])

    def test_window_rejects_one_second_after_close(self, service):
        closes = service.config.phase("public_test").closes_at
        at_close = service.ingest_submission("edge", "public_test", PERFECT, now=closes)
        assert at_close.auc == 1.0
        with pytest.raises(WindowClosedError):
            service.ingest_submission("late", "public_test", PERFECT, now=closes + timedelta(seconds=1))

    def test_window_rejects_before_open(self, service):
        opens = service.config.phase("public_test").opens_at
        with pytest.raises(WindowClosedError):
            service.ingest_submission("early", "public_test", PERFECT, now=opens - timedelta(seconds=1))

    def test_quota_rejects_second_public_submission(self, service):
        service.ingest_submission("team-a", "public_test", PERFECT)
        with pytest.raises(QuotaExceededError):
            service.ingest_submission("team-a", "public_test", FIXTURE_75)

    def test_validation_quota_allows_several(self, service):
        for _ in range(3):
            service.ingest_submission("team-a", "validation", [("v1", 1.0), ("v2", 0.8), ("v3", 0.2), ("v4", 0.1)])
        assert service.store.count("team-a", "validation") == 3

    def test_missing_id_listed(self, service):
        with pytest.raises(MissingIdsError, match="p4"):
            service.ingest_submission("t", "public_test", PERFECT[:3])

    def test_extra_id_rejected(self, service):
        with pytest.raises(ExtraIdsError, match="zz"):
            service.ingest_submission("t", "public_test", PERFECT + [("zz", 0.5)])

    def test_duplicate_id_rejected(self, service):
        with pytest.raises(DuplicateIdsError):
            service.ingest_submission("t", "public_test", PERFECT + [("p1", 0.5)])

    def test_score_out_of_range_rejected(self, service):
        bad = [("p1", 1.2), ("p2", 0.9), ("p3", 0.1), ("p4", 0.0)]
        with pytest.raises(ScoreRangeError, match="p1"):
            service.ingest_submission("t", "public_test", bad)

    def test_rejected_submission_is_not_persisted(self, service):
        with pytest.raises(ScoreRangeError):
            service.ingest_submission("t", "public_test", [("p1", 2.0), ("p2", 0.9), ("p3", 0.1), ("p4", 0.0)])
        assert service.store.count("t", "public_test") == 0


class TestScoring:
    def test_rescoring_is_bit_identical(self, service):
        record = service.ingest_submission("team-a", "public_test", FIXTURE_75)
        again = service.score_submission(record.receipt)
        assert again == service.store.get(record.receipt).auc == 0.75

    def test_store_survives_reload(self, service, tmp_path):
        record = service.ingest_submission("team-a", "public_test", FIXTURE_75)
        reloaded = SubmissionStore(service.store.data_dir)
        assert reloaded.get(record.receipt).auc == 0.75
        assert reloaded.count("team-a", "public_test") == 1


class TestQuotaSafety:
    def test_concurrent_ingest_never_exceeds_quota(self, service):
        results = []

        def worker():
            try:
                service.ingest_submission("race-team", "public_test", PERFECT)
                results.append("ok")
            except QuotaExceededError:
                results.append("quota")

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert results.count("ok") == 1
        assert service.store.count("race-team", "public_test") == 1


class TestRanking:
    def test_reference_fixture_reproduces_published_order(self):
        entries = rank_entries(load_reference_rows())
        assert [e.team for e in entries] == [
            "ShallowReal",
            "INTSIG",
            "AntInternational",
            "HCMUS-Aqua",
            "acvlab",
            "Reagvis Lab",
            "Hit Virlab",
            "Anonymous",
            "Zeke",
            "TCD Vision",
            "PSU",
            "AI4Good",
            "Acube",
            "NTR",
        ]
        assert [e.rank for e in entries] == list(range(1, 15))

    def test_public_best_team_ranks_third_by_private_precedence(self):
        entries = rank_entries(load_reference_rows())
        by_team = {e.team: e for e in entries}
        best_public = max(entries, key=lambda e: e.public_auc)
        assert best_public.team == "AntInternational"
        assert by_team["AntInternational"].rank == 3

    def test_private_scores_rank_above_all_public_only_teams(self):
        entries = rank_entries(load_reference_rows())
        private_ranks = [e.rank for e in entries if e.private_auc is not None]
        public_only_ranks = [e.rank for e in entries if e.private_auc is None]
        assert max(private_ranks) < min(public_only_ranks)

    def test_single_team_gets_rank_one(self):
        entries = rank_entries([TeamScores(team="solo", public_auc=0.7, order_key="t0")])
        assert entries[0].rank == 1

    def test_tie_breaks_by_earliest_submission(self):
        rows = [
            TeamScores(team="later", public_auc=0.8, order_key="2026-03-20T10:00:00+00:00"),
            TeamScores(team="earlier", public_auc=0.8, order_key="2026-03-20T09:00:00+00:00"),
        ]
        entries = rank_entries(rows)
        assert [e.team for e in entries] == ["earlier", "later"]


class TestLeaderboardFromStore:
    def test_leaderboard_orders_by_public_auc(self, service):
        service.ingest_submission("alpha", "public_test", FIXTURE_75)
        service.ingest_submission("beta", "public_test", PERFECT)
        entries = service.leaderboard()
        assert [e.team for e in entries] == ["beta", "alpha"]
        assert entries[0].public_auc == 1.0 and entries[1].public_auc == 0.75

    def test_deterministic_function_of_store(self, service):
        service.ingest_submission("alpha", "public_test", FIXTURE_75)
        assert service.leaderboard() == service.leaderboard()


class TestRescore:
    PRIV_GOOD = [("q1", 0.9), ("q2", 0.8), ("q3", 0.2), ("q4", 0.1)]  # AUC 1.0
    PRIV_BAD = [("q1", 0.1), ("q2", 0.2), ("q3", 0.8), ("q4", 0.9)]  # AUC 0.0

    def test_k_zero_changes_nothing(self, service):
        service.ingest_submission("alpha", "public_test", PERFECT)
        before = service.leaderboard()
        report = service.rescore_private(0, {})
        assert report.entries == before
        assert report.rescored == []

    def test_rescore_flips_order_when_private_disagrees(self, service):
        service.ingest_submission("alpha", "public_test", PERFECT)  # public 1.0
        service.ingest_submission("beta", "public_test", FIXTURE_75)  # public 0.75
        report = service.rescore_private(2, {"alpha": self.PRIV_BAD, "beta": self.PRIV_GOOD})
        assert [e.team for e in report.entries] == ["beta", "alpha"]
        assert report.entries[0].private_auc == 1.0
        assert ("alpha", 1, 2) in report.shifts and ("beta", 2, 1) in report.shifts

    def test_k_exceeding_team_count_is_clipped_with_warning(self, service):
        service.ingest_submission("alpha", "public_test", PERFECT)
        with pytest.warns(UserWarning, match="clipping"):
            report = service.rescore_private(7, {"alpha": self.PRIV_GOOD})
        assert report.rescored == ["alpha"]

    def test_exactly_k_private_scores_present(self, service):
        for team, rows in (("alpha", PERFECT), ("beta", FIXTURE_75)):
            service.ingest_submission(team, "public_test", rows)
        report = service.rescore_private(2, {"alpha": self.PRIV_GOOD, "beta": self.PRIV_BAD})
        assert sum(1 for e in report.entries if e.private_auc is not None) == 2

    def test_large_shift_is_flagged(self, service):
        # five teams, the public leader collapses privately past four others
        teams = ["t1", "t2", "t3", "t4", "t5"]
        spreads = [PERFECT, FIXTURE_75, [("p1", 0.8), ("p2", 0.5), ("p3", 0.55), ("p4", 0.2)],
                   [("p1", 0.6), ("p2", 0.5), ("p3", 0.55), ("p4", 0.45)],
                   [("p1", 0.5), ("p2", 0.45), ("p3", 0.55), ("p4", 0.52)]]
        for team, rows in zip(teams, spreads):
            service.ingest_submission(team, "public_test", rows)
        scores = {t: self.PRIV_GOOD for t in teams}
        scores["t1"] = self.PRIV_BAD
        report = service.rescore_private(5, scores)
        flagged_teams = {t for t, _, _ in report.flagged}
        assert "t1" in flagged_teams


class TestConfig:
    def test_replica_requires_24h_public_window(self, tmp_path):
        tiny_manifest(tmp_path / "pub.csv", "public_test", [("p1", 1), ("p2", 0)])
        with pytest.raises(ConfigError, match="24-hour"):
            ServiceConfig(
                phases={
                    "public_test": PhaseConfig(
                        name="public_test",
                        manifest=tmp_path / "pub.csv",
                        opens_at=T0,
                        closes_at=T0 + timedelta(hours=48),
                        quota=1,
                    )
                },
                challenge_replica=True,
            )

    def test_quota_must_be_positive(self, tmp_path):
        with pytest.raises(ConfigError, match="quota"):
            PhaseConfig(
                name="validation",
                manifest=tmp_path / "x.csv",
                opens_at=T0,
                closes_at=T0 + timedelta(days=1),
                quota=0,
            )

    def test_private_needs_no_window(self, tmp_path):
        PhaseConfig(name="private_test", manifest=tmp_path / "m.csv")
