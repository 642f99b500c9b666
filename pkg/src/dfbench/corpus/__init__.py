"""Challenge-corpus synthesis: pseudo-fakes, split builds, manifests."""

from .build import (
    CHALLENGE_TOTALS,
    FAKE_METHOD,
    BuildResult,
    CapacityError,
    SplitSpec,
    build_corpus,
    challenge_specs,
    replay_record,
)
from .manifest import (
    MANIFEST_COLUMNS,
    REAL_METHOD,
    VIEW_COLUMNS,
    ManifestRecord,
    participant_view,
    read_manifest,
    read_view,
    write_manifest,
    write_view,
)
from .pseudofake import DegenerateMaskError, PseudoFakeParams, default_face_box, synth_pseudo_fake
from .synthetic import make_synthetic_reals, synthetic_real

__all__ = [
    "CHALLENGE_TOTALS",
    "FAKE_METHOD",
    "REAL_METHOD",
    "MANIFEST_COLUMNS",
    "VIEW_COLUMNS",
    "BuildResult",
    "CapacityError",
    "DegenerateMaskError",
    "ManifestRecord",
    "PseudoFakeParams",
    "SplitSpec",
    "build_corpus",
    "challenge_specs",
    "default_face_box",
    "make_synthetic_reals",
    "participant_view",
    "read_manifest",
    "read_view",
    "replay_record",
    "synth_pseudo_fake",
    "synthetic_real",
    "write_manifest",
    "write_view",
]
