"""Desk-scale challenge-corpus construction.

Given a pool of real source images, builds the four phase splits: reals are
copied, fakes are synthesized by self-blending, and every item is degraded
by a recipe sampled from its phase profile. The manifest records each item's
recipe so the stored degraded image can be reproduced bit-exactly from the
stored clean image. Source images never appear in more than one split.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from ..degrade.profile import DegradationProfile, sample_recipe, validate_ladder
from ..degrade.recipe import DegradationRecipe, apply_recipe
from ..degrade.steps import DegradationStep
from ..image import ImageBuffer, round_half_away
from ..rng import RngStream
from .manifest import REAL_METHOD, ManifestRecord, participant_view, write_manifest, write_view
from .pseudofake import DegenerateMaskError, PseudoFakeParams, default_face_box, synth_pseudo_fake

FAKE_METHOD = "self_blend"
MAX_FAKE_ATTEMPTS = 20

# Challenge-replica split sizes at full scale.
CHALLENGE_TOTALS = {"train": 1000, "val": 100, "public_test": 1000, "private_test": 1000}


class CapacityError(ValueError):
    """Not enough distinct source images to fill the requested splits."""


@dataclass(frozen=True)
class SplitSpec:
    """Size and class balance of one split."""

    split: str
    total: int
    real_fraction: float = 0.5

    def __post_init__(self) -> None:
        if self.total < 1:
            raise ValueError(f"split total must be >= 1, got {self.total}")
        if not 0.0 <= self.real_fraction <= 1.0:
            raise ValueError(f"real_fraction must lie in [0, 1], got {self.real_fraction}")

    @property
    def n_real(self) -> int:
        return int(self.total * self.real_fraction)

    @property
    def n_fake(self) -> int:
        return self.total - self.n_real


def challenge_specs(scale: float = 1.0) -> list[SplitSpec]:
    """Replica split sizes (1000/100/1000/1000), optionally scaled down."""
    if not 0.0 < scale <= 1.0:
        raise ValueError(f"scale must lie in (0, 1], got {scale}")
    return [
        SplitSpec(split=name, total=max(2, int(round_half_away(total * scale))))
        for name, total in CHALLENGE_TOTALS.items()
    ]


@dataclass(frozen=True)
class BuildResult:
    out_dir: Path
    records: list[ManifestRecord]
    manifest_path: Path
    train_path: Path | None
    view_paths: dict[str, Path]
    view_seeds: dict[str, int]


def _inject_face_box(recipe: DegradationRecipe, face_box: tuple[int, int, int, int]) -> DegradationRecipe:
    """Give sampled text distractors the item's face box as exclusion zone."""
    steps = []
    changed = False
    for step in recipe.steps:
        if step.kind == "text_distractor" and "exclusion_box" not in step.params:
            params = dict(step.params)
            params["exclusion_box"] = list(face_box)
            steps.append(DegradationStep(step.kind, params))
            changed = True
        else:
            steps.append(step)
    if not changed:
        return recipe
    return DegradationRecipe(tuple(steps), recipe.seed)


def _make_fake(src: ImageBuffer, params: PseudoFakeParams, item_stream: RngStream, face_box) -> ImageBuffer:
    for attempt in range(MAX_FAKE_ATTEMPTS):
        try:
            return synth_pseudo_fake(src, params, item_stream.child(f"fake-{attempt}"), face_box)
        except DegenerateMaskError:
            continue
    raise DegenerateMaskError(f"no usable pseudo-fake after {MAX_FAKE_ATTEMPTS} attempts")


def build_corpus(
    reals: Sequence[str | Path],
    specs: Sequence[SplitSpec],
    profiles: Mapping[str, DegradationProfile],
    seed: int,
    out_dir: str | Path,
    pseudo_params: PseudoFakeParams | None = None,
) -> BuildResult:
    """Build the image tree and manifest for the requested splits.

    Writes, under ``out_dir``: ``clean/<split>/`` pre-degradation images,
    ``images/<split>/`` degraded images (the manifest paths), the full
    labeled ``manifest.csv``, a labeled ``train.csv``, label-stripped
    ``view_<split>.csv`` files for the non-train splits, ``view_meta.csv``
    recording the shuffle seeds, and ``build_log.csv`` mapping items to their
    source images.
    """
    validate_ladder(profiles)
    params = pseudo_params if pseudo_params is not None else PseudoFakeParams()
    out_dir = Path(out_dir)

    sources = sorted(Path(p) for p in reals)
    stems = [p.stem for p in sources]
    if len(set(stems)) != len(stems):
        raise ValueError("source image filenames must be unique")
    need = sum(s.total for s in specs)
    if len(sources) < need:
        raise CapacityError(
            f"need {need} distinct source images for {[s.split for s in specs]}, "
            f"got {len(sources)} (short by {need - len(sources)})"
        )
    for spec in specs:
        if spec.split not in profiles:
            raise ValueError(f"no profile for split {spec.split!r}")

    order = RngStream(seed, "source-assignment").generator().permutation(len(sources))
    assigned = [sources[i] for i in order]

    records: list[ManifestRecord] = []
    source_of: dict[str, Path] = {}
    cursor = 0
    for spec in specs:
        chunk = assigned[cursor : cursor + spec.total]
        cursor += spec.total
        (out_dir / "clean" / spec.split).mkdir(parents=True, exist_ok=True)
        (out_dir / "images" / spec.split).mkdir(parents=True, exist_ok=True)
        for index, source in enumerate(chunk):
            is_real = index < spec.n_real
            item_id = f"{spec.split}-{index:05d}"
            item_stream = RngStream(seed, f"{spec.split}/{item_id}")
            src = ImageBuffer.load(source)
            face_box = default_face_box(src.width, src.height)
            if is_real:
                clean = src
                method = REAL_METHOD
            else:
                clean = _make_fake(src, params, item_stream, face_box)
                method = FAKE_METHOD
            recipe = sample_recipe(profiles[spec.split], item_stream.child("recipe"))
            recipe = _inject_face_box(recipe, face_box)
            degraded = apply_recipe(clean, recipe)

            clean_rel = f"clean/{spec.split}/{item_id}.png"
            image_rel = f"images/{spec.split}/{item_id}.png"
            clean.save(out_dir / clean_rel)
            degraded.save(out_dir / image_rel)
            records.append(
                ManifestRecord(
                    id=item_id,
                    path=image_rel,
                    label=0 if is_real else 1,
                    split=spec.split,
                    fake_method=method,
                    recipe=recipe,
                    face_box=face_box,
                )
            )
            source_of[item_id] = source

    manifest_path = out_dir / "manifest.csv"
    write_manifest(records, manifest_path)

    with open(out_dir / "build_log.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "source", "clean_path"])
        for r in records:
            writer.writerow([r.id, str(source_of[r.id]), f"clean/{r.split}/{r.id}.png"])

    train_records = [r for r in records if r.split == "train"]
    train_path = None
    if train_records:
        train_path = out_dir / "train.csv"
        write_manifest(train_records, train_path)

    view_paths: dict[str, Path] = {}
    view_seeds: dict[str, int] = {}
    for spec in specs:
        if spec.split == "train":
            continue
        split_records = [r for r in records if r.split == spec.split]
        view_seed = int(RngStream(seed, f"view-seed/{spec.split}").generator().integers(0, 2**63))
        rows = participant_view(split_records, view_seed)
        view_path = out_dir / f"view_{spec.split}.csv"
        write_view(rows, view_path)
        view_paths[spec.split] = view_path
        view_seeds[spec.split] = view_seed

    with open(out_dir / "view_meta.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["split", "shuffle_seed"])
        for split in sorted(view_seeds):
            writer.writerow([split, view_seeds[split]])

    return BuildResult(
        out_dir=out_dir,
        records=records,
        manifest_path=manifest_path,
        train_path=train_path,
        view_paths=view_paths,
        view_seeds=view_seeds,
    )


def replay_record(out_dir: str | Path, record: ManifestRecord) -> ImageBuffer:
    """Re-apply a manifest recipe to the stored clean image."""
    clean = ImageBuffer.load(Path(out_dir) / "clean" / record.split / f"{record.id}.png")
    return apply_recipe(clean, record.recipe)


def strip_labels_for_phase(records: Sequence[ManifestRecord], split: str) -> list[ManifestRecord]:
    return [replace(r) for r in records if r.split == split]
