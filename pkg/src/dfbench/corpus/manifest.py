"""Corpus manifest records, CSV interchange, and label-stripped views.

Manifest CSV columns: ``id,path,label,split,fake_method,recipe,face_box``,
UTF-8 with LF newlines; the recipe column embeds the recipe's JSON form.
The participant view removes the label and fake_method columns and shuffles
row order under a recorded seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

from ..degrade.profile import PHASES
from ..degrade.recipe import DegradationRecipe
from ..rng import RngStream

MANIFEST_COLUMNS = ["id", "path", "label", "split", "fake_method", "recipe", "face_box"]
VIEW_COLUMNS = ["id", "path", "split", "recipe", "face_box"]

REAL_METHOD = "none"


@dataclass(frozen=True)
class ManifestRecord:
    """One corpus item: location, hidden label, and full provenance."""

    id: str
    path: str
    label: int
    split: str
    fake_method: str
    recipe: DegradationRecipe
    face_box: tuple[int, int, int, int] | None = None

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 (real) or 1 (fake), got {self.label}")
        if (self.label == 0) != (self.fake_method == REAL_METHOD):
            raise ValueError(
                f"label {self.label} inconsistent with fake_method {self.fake_method!r}"
                f" (label 0 iff fake_method == {REAL_METHOD!r})"
            )
        if self.split not in PHASES:
            raise ValueError(f"unknown split {self.split!r}")
        if self.face_box is not None:
            object.__setattr__(self, "face_box", tuple(int(v) for v in self.face_box))


def _box_to_text(box: tuple[int, int, int, int] | None) -> str:
    return "" if box is None else ",".join(str(v) for v in box)


def _box_from_text(text: str) -> tuple[int, int, int, int] | None:
    if not text:
        return None
    parts = tuple(int(v) for v in text.split(","))
    if len(parts) != 4:
        raise ValueError(f"face_box must have four coordinates, got {text!r}")
    return parts


def write_manifest(records: list[ManifestRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_COLUMNS)
        for r in records:
            writer.writerow(
                [r.id, r.path, r.label, r.split, r.fake_method, r.recipe.to_json(), _box_to_text(r.face_box)]
            )


def read_manifest(path: str | Path) -> list[ManifestRecord]:
    records = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != MANIFEST_COLUMNS:
            raise ValueError(f"unexpected manifest header {reader.fieldnames} in {path}")
        for row in reader:
            records.append(
                ManifestRecord(
                    id=row["id"],
                    path=row["path"],
                    label=int(row["label"]),
                    split=row["split"],
                    fake_method=row["fake_method"],
                    recipe=DegradationRecipe.from_json(row["recipe"]),
                    face_box=_box_from_text(row["face_box"]),
                )
            )
    return records


def participant_view(records: list[ManifestRecord], seed: int) -> list[dict[str, str]]:
    """Label-stripped rows in an order shuffled under the recorded seed.

    Ids are preserved, so scoring joins back losslessly; only ``label`` and
    ``fake_method`` are removed.
    """
    gen = RngStream(seed, "participant-view").generator()
    order = gen.permutation(len(records))
    return [
        {
            "id": records[i].id,
            "path": records[i].path,
            "split": records[i].split,
            "recipe": records[i].recipe.to_json(),
            "face_box": _box_to_text(records[i].face_box),
        }
        for i in order
    ]


def write_view(rows: list[dict[str, str]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=VIEW_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def read_view(path: str | Path) -> list[dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != VIEW_COLUMNS:
            raise ValueError(f"unexpected view header {reader.fieldnames} in {path}")
        return list(reader)


def strip_face_box(record: ManifestRecord) -> ManifestRecord:
    return replace(record, face_box=None)
