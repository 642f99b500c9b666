"""Submission CSV interchange: header ``id,score``, UTF-8, LF newlines."""

from __future__ import annotations

import csv
import io
from pathlib import Path

SUBMISSION_COLUMNS = ["id", "score"]


class SubmissionFormatError(ValueError):
    """The submission text is not a well-formed id,score CSV."""


def parse_submission_csv(text: str) -> list[tuple[str, float]]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SubmissionFormatError("empty submission") from None
    if header != SUBMISSION_COLUMNS:
        raise SubmissionFormatError(f"expected header {SUBMISSION_COLUMNS}, got {header}")
    rows: list[tuple[str, float]] = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2 or not row[0]:
            raise SubmissionFormatError(f"line {line_no}: expected id,score, got {row}")
        try:
            score = float(row[1])
        except ValueError:
            raise SubmissionFormatError(f"line {line_no}: score {row[1]!r} is not a number") from None
        rows.append((row[0], score))
    if not rows:
        raise SubmissionFormatError("submission has a header but no rows")
    return rows


def read_submission_csv(path: str | Path) -> list[tuple[str, float]]:
    return parse_submission_csv(Path(path).read_text(encoding="utf-8"))


def write_submission_csv(rows: list[tuple[str, float]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUBMISSION_COLUMNS)
        for item_id, score in rows:
            writer.writerow([item_id, repr(float(score))])
