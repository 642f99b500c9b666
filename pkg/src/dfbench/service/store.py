"""Append-only submission store.

Persistence is a JSONL event log plus one CSV per submission under the data
directory; state is rebuilt by replaying the log. All mutations serialize
through a single lock, the commit point that keeps quota checks safe under
concurrent ingestion.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, replace
from pathlib import Path

from ..submission import read_submission_csv, write_submission_csv


@dataclass(frozen=True)
class SubmissionRecord:
    receipt: str
    team: str
    phase: str
    received_at: str
    rows_path: str
    source: str = "participant"
    auc: float | None = None


class SubmissionStore:
    def __init__(self, data_dir: str | Path) -> None:
        self.data_dir = Path(data_dir)
        (self.data_dir / "submissions").mkdir(parents=True, exist_ok=True)
        self.log_path = self.data_dir / "log.jsonl"
        self.lock = threading.RLock()
        self._records: dict[str, SubmissionRecord] = {}
        self._replay()

    def _replay(self) -> None:
        if not self.log_path.exists():
            return
        with open(self.log_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event["event"] == "submission":
                    record = SubmissionRecord(
                        receipt=event["receipt"],
                        team=event["team"],
                        phase=event["phase"],
                        received_at=event["received_at"],
                        rows_path=event["rows_path"],
                        source=event["source"],
                    )
                    self._records[record.receipt] = record
                elif event["event"] == "score":
                    receipt = event["receipt"]
                    self._records[receipt] = replace(self._records[receipt], auc=event["auc"])

    def _append_event(self, event: dict) -> None:
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, separators=(",", ":"), sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def count(self, team: str, phase: str, source: str = "participant") -> int:
        with self.lock:
            return sum(
                1 for r in self._records.values() if r.team == team and r.phase == phase and r.source == source
            )

    def get(self, receipt: str) -> SubmissionRecord | None:
        with self.lock:
            return self._records.get(receipt)

    def records(self) -> list[SubmissionRecord]:
        with self.lock:
            return sorted(self._records.values(), key=lambda r: (r.received_at, r.receipt))

    def add_submission(
        self,
        team: str,
        phase: str,
        received_at: str,
        rows: list[tuple[str, float]],
        source: str = "participant",
    ) -> SubmissionRecord:
        with self.lock:
            digest = hashlib.sha256(
                "|".join([team, phase, received_at] + [f"{i}:{s!r}" for i, s in rows]).encode("utf-8")
            ).hexdigest()[:12]
            receipt = f"{phase[:3]}-{digest}"
            bump = 0
            while receipt in self._records:
                bump += 1
                receipt = f"{phase[:3]}-{digest}-{bump}"
            rows_rel = f"submissions/{receipt}.csv"
            tmp = self.data_dir / (rows_rel + ".tmp")
            write_submission_csv(rows, tmp)
            os.replace(tmp, self.data_dir / rows_rel)
            record = SubmissionRecord(
                receipt=receipt,
                team=team,
                phase=phase,
                received_at=received_at,
                rows_path=rows_rel,
                source=source,
            )
            self._append_event(
                {
                    "event": "submission",
                    "receipt": receipt,
                    "team": team,
                    "phase": phase,
                    "received_at": received_at,
                    "rows_path": rows_rel,
                    "source": source,
                }
            )
            self._records[receipt] = record
            return record

    def load_rows(self, receipt: str) -> list[tuple[str, float]]:
        record = self._records[receipt]
        return read_submission_csv(self.data_dir / record.rows_path)

    def record_score(self, receipt: str, auc: float) -> SubmissionRecord:
        with self.lock:
            self._append_event({"event": "score", "receipt": receipt, "auc": auc})
            self._records[receipt] = replace(self._records[receipt], auc=auc)
            return self._records[receipt]
