"""Phase-aware scoring service: validation, quotas, hidden-label AUC,
leaderboard with public/private precedence, and operator re-scoring."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Mapping, Sequence

import numpy as np

from ..corpus.manifest import read_manifest
from ..metrics import auc_from_arrays
from .config import PhaseConfig, ServiceConfig
from .store import SubmissionRecord, SubmissionStore

RANK_SHIFT_FLAG = 3  # positions a team must move for the rescore report to flag it


class ServiceError(Exception):
    kind = "service-error"


class UnknownPhaseError(ServiceError):
    kind = "unknown-phase"


class SubmissionsNotAcceptedError(ServiceError):
    kind = "submissions-not-accepted"


class WindowClosedError(ServiceError):
    kind = "window-closed"


class QuotaExceededError(ServiceError):
    kind = "quota-exceeded"


class MissingIdsError(ServiceError):
    kind = "missing-ids"


class ExtraIdsError(ServiceError):
    kind = "extra-ids"


class DuplicateIdsError(ServiceError):
    kind = "duplicate-ids"


class ScoreRangeError(ServiceError):
    kind = "score-out-of-range"


@dataclass(frozen=True)
class LeaderboardEntry:
    team: str
    public_auc: float | None
    private_auc: float | None
    rank: int


@dataclass(frozen=True)
class TeamScores:
    """Raw per-team material the ranking is computed from."""

    team: str
    public_auc: float | None = None
    private_auc: float | None = None
    order_key: str = ""  # earliest submission time backing the ranking AUC


@dataclass(frozen=True)
class RescoreReport:
    entries: list[LeaderboardEntry]
    shifts: list[tuple[str, int, int]]  # (team, old_rank, new_rank)
    flagged: list[tuple[str, int, int]]  # shifts of >= RANK_SHIFT_FLAG positions
    rescored: list[str]


def rank_entries(rows: Sequence[TeamScores]) -> list[LeaderboardEntry]:
    """Order teams by the precedence rule.

    Private AUC outranks public: every team with a private score ranks above
    every team without one, and within each band the relevant AUC sorts
    descending. Ties break by earliest submission time, then team name.
    """

    def key(row: TeamScores):
        has_private = row.private_auc is not None
        ranking_auc = row.private_auc if has_private else row.public_auc
        if ranking_auc is None:
            raise ValueError(f"team {row.team!r} has no scored submissions to rank")
        return (0 if has_private else 1, -ranking_auc, row.order_key, row.team)

    ordered = sorted(rows, key=key)
    return [
        LeaderboardEntry(team=r.team, public_auc=r.public_auc, private_auc=r.private_auc, rank=i + 1)
        for i, r in enumerate(ordered)
    ]


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


def team_scores_from_records(records: Sequence[SubmissionRecord]) -> list[TeamScores]:
    """Fold scored submissions into per-team material for ranking.

    Takes each team's best AUC per phase; the timestamp of the submission
    backing the ranking AUC is kept as the deterministic tie-break key.
    """
    best: dict[str, dict[str, tuple[float, str]]] = {}
    for record in records:
        if record.auc is None or record.phase not in ("public_test", "private_test"):
            continue
        slot = best.setdefault(record.team, {})
        current = slot.get(record.phase)
        if current is None or record.auc > current[0]:
            slot[record.phase] = (record.auc, record.received_at)
    rows = []
    for team, slot in best.items():
        public = slot.get("public_test")
        private = slot.get("private_test")
        anchor = private if private is not None else public
        rows.append(
            TeamScores(
                team=team,
                public_auc=public[0] if public else None,
                private_auc=private[0] if private else None,
                order_key=anchor[1] if anchor else "",
            )
        )
    return rows


class BenchService:
    """The scoring server's logic, independent of any transport.

    ``now_fn`` injects the clock so submission-window behavior is
    deterministic under test.
    """

    def __init__(
        self,
        config: ServiceConfig,
        store: SubmissionStore,
        now_fn: Callable[[], datetime] | None = None,
    ) -> None:
        self.config = config
        self.store = store
        self.now_fn = now_fn or _utc_now
        self._labels: dict[str, dict[str, int]] = {}

    # -- hidden labels -----------------------------------------------------

    def phase_labels(self, phase: str) -> dict[str, int]:
        if phase not in self._labels:
            cfg = self._phase(phase)
            records = read_manifest(cfg.manifest)
            labels = {r.id: r.label for r in records if r.split == cfg.split}
            if not labels:
                raise ServiceError(f"manifest {cfg.manifest} has no rows for split {cfg.split!r}")
            self._labels[phase] = labels
        return self._labels[phase]

    def _phase(self, name: str) -> PhaseConfig:
        try:
            return self.config.phase(name)
        except KeyError:
            raise UnknownPhaseError(f"no such phase {name!r}") from None

    # -- ingestion ----------------------------------------------------------

    def _validate_rows(self, phase: str, rows: Sequence[tuple[str, float]]) -> None:
        ids = [i for i, _ in rows]
        seen: set[str] = set()
        dupes = sorted({i for i in ids if i in seen or seen.add(i)})
        if dupes:
            raise DuplicateIdsError(f"duplicate ids: {dupes[:10]}")
        bad = sorted(i for i, s in rows if not np.isfinite(s) or not 0.0 <= s <= 1.0)
        if bad:
            raise ScoreRangeError(f"scores outside [0, 1] for ids: {bad[:10]}")
        expected = set(self.phase_labels(phase))
        missing = sorted(expected - set(ids))
        if missing:
            raise MissingIdsError(f"missing {len(missing)} manifest ids, e.g. {missing[:10]}")
        extra = sorted(set(ids) - expected)
        if extra:
            raise ExtraIdsError(f"{len(extra)} ids not in the manifest, e.g. {extra[:10]}")

    def ingest_submission(
        self,
        team: str,
        phase: str,
        rows: Sequence[tuple[str, float]],
        now: datetime | None = None,
    ) -> SubmissionRecord:
        """Validate, persist, and score one participant submission."""
        if not team:
            raise ServiceError("team name must be nonempty")
        cfg = self._phase(phase)
        if not cfg.accepts_direct_submissions:
            raise SubmissionsNotAcceptedError(f"phase {phase} is scored by the operator only")
        stamp = now or self.now_fn()
        if stamp < cfg.opens_at:
            raise WindowClosedError(f"phase {phase} opens at {cfg.opens_at.isoformat()}")
        if stamp > cfg.closes_at:
            raise WindowClosedError(f"phase {phase} closed at {cfg.closes_at.isoformat()}")
        self._validate_rows(phase, rows)
        with self.store.lock:
            if cfg.quota is not None and self.store.count(team, phase) >= cfg.quota:
                raise QuotaExceededError(f"team {team!r} already used its {cfg.quota} submission(s) to {phase}")
            record = self.store.add_submission(team, phase, stamp.isoformat(), list(rows))
        self.score_submission(record.receipt)
        return self.store.get(record.receipt)

    # -- scoring ------------------------------------------------------------

    def score_submission(self, receipt: str) -> float:
        """Join stored rows against hidden labels and record the AUC.

        Re-scoring a receipt recomputes the same joined arrays and therefore
        yields a bit-identical value.
        """
        record = self.store.get(receipt)
        if record is None:
            raise ServiceError(f"unknown receipt {receipt!r}")
        labels_by_id = self.phase_labels(record.phase)
        rows = self.store.load_rows(receipt)
        scores = np.array([s for _, s in rows], dtype=np.float64)
        labels = np.array([labels_by_id[i] for i, _ in rows], dtype=np.int64)
        value = auc_from_arrays(scores, labels)
        self.store.record_score(receipt, value)
        return value

    # -- leaderboard ----------------------------------------------------------

    def leaderboard(self) -> list[LeaderboardEntry]:
        return rank_entries(team_scores_from_records(self.store.records()))

    # -- private re-scoring ----------------------------------------------------

    def rescore_private(
        self,
        top_k: int,
        scores_by_team: Mapping[str, Sequence[tuple[str, float]]],
        now: datetime | None = None,
    ) -> RescoreReport:
        """Score operator-regenerated submissions on the private phase.

        ``scores_by_team`` holds the rows each top team's detector produced
        against the private manifest. Ranks are recomputed under the
        precedence rule and shifts of >= 3 positions are flagged.
        """
        before = self.leaderboard()
        if top_k <= 0:
            return RescoreReport(entries=before, shifts=[], flagged=[], rescored=[])
        if top_k > len(before):
            warnings.warn(
                f"rescore_private: k={top_k} exceeds {len(before)} ranked teams; clipping",
                stacklevel=2,
            )
            top_k = len(before)
        targets = [e.team for e in before[:top_k]]
        absent = [t for t in targets if t not in scores_by_team]
        if absent:
            raise ServiceError(f"no private score rows supplied for top-k teams: {absent}")
        stamp = (now or self.now_fn()).isoformat()
        for team in targets:
            rows = list(scores_by_team[team])
            self._validate_rows("private_test", rows)
            with self.store.lock:
                record = self.store.add_submission(team, "private_test", stamp, rows, source="operator")
            self.score_submission(record.receipt)
        after = self.leaderboard()
        old_rank = {e.team: e.rank for e in before}
        shifts = [
            (e.team, old_rank[e.team], e.rank)
            for e in after
            if e.team in old_rank and e.rank != old_rank[e.team]
        ]
        flagged = [s for s in shifts if abs(s[1] - s[2]) >= RANK_SHIFT_FLAG]
        return RescoreReport(entries=after, shifts=shifts, flagged=flagged, rescored=targets)
