"""Service configuration: phases, windows, quotas, hidden manifests."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import yaml

SERVICE_PHASES = ("validation", "public_test", "private_test")

# Which corpus split each scoring phase draws its hidden labels from.
PHASE_SPLITS = {"validation": "val", "public_test": "public_test", "private_test": "private_test"}


class ConfigError(ValueError):
    pass


def parse_utc(text: str) -> datetime:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    stamp = datetime.fromisoformat(text)
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


@dataclass(frozen=True)
class PhaseConfig:
    """One scoring phase. ``private_test`` never accepts direct submissions;
    its window fields are ignored."""

    name: str
    manifest: Path
    opens_at: datetime | None = None
    closes_at: datetime | None = None
    quota: int | None = None

    def __post_init__(self) -> None:
        if self.name not in SERVICE_PHASES:
            raise ConfigError(f"unknown phase {self.name!r} (expected one of {SERVICE_PHASES})")
        if self.accepts_direct_submissions:
            if self.opens_at is None or self.closes_at is None:
                raise ConfigError(f"phase {self.name}: opens_at and closes_at are required")
            if self.closes_at <= self.opens_at:
                raise ConfigError(f"phase {self.name}: closes_at must be after opens_at")
        if self.quota is not None and self.quota < 1:
            raise ConfigError(f"phase {self.name}: quota must be >= 1, got {self.quota}")

    @property
    def accepts_direct_submissions(self) -> bool:
        return self.name != "private_test"

    @property
    def split(self) -> str:
        return PHASE_SPLITS[self.name]


@dataclass(frozen=True)
class ServiceConfig:
    phases: dict[str, PhaseConfig]
    challenge_replica: bool = False

    def __post_init__(self) -> None:
        for key, phase in self.phases.items():
            if key != phase.name:
                raise ConfigError(f"phase keyed {key!r} declares name {phase.name!r}")
        if self.challenge_replica:
            public = self.phases.get("public_test")
            if public is None:
                raise ConfigError("challenge replica config requires a public_test phase")
            if public.closes_at - public.opens_at != timedelta(hours=24):
                raise ConfigError("challenge replica config requires a 24-hour public_test window")
            if public.quota != 1:
                raise ConfigError("challenge replica config requires public_test quota 1")

    def phase(self, name: str) -> PhaseConfig:
        return self.phases[name]


def load_config(path: str | Path) -> ServiceConfig:
    """Load a YAML config; relative manifest paths resolve against the file."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        payload = yaml.safe_load(fh)
    if not isinstance(payload, dict) or "phases" not in payload:
        raise ConfigError(f"{path}: expected a mapping with a 'phases' key")
    unknown = set(payload) - {"phases", "challenge_replica"}
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    phases: dict[str, PhaseConfig] = {}
    for name, spec in payload["phases"].items():
        allowed = {"opens_at", "closes_at", "quota", "manifest"}
        extra = set(spec) - allowed
        if extra:
            raise ConfigError(f"{path}: phase {name}: unknown keys {sorted(extra)}")
        if "manifest" not in spec:
            raise ConfigError(f"{path}: phase {name}: manifest is required")
        manifest = Path(spec["manifest"])
        if not manifest.is_absolute():
            manifest = (path.parent / manifest).resolve()
        phases[name] = PhaseConfig(
            name=name,
            manifest=manifest,
            opens_at=parse_utc(spec["opens_at"]) if "opens_at" in spec else None,
            closes_at=parse_utc(spec["closes_at"]) if "closes_at" in spec else None,
            quota=spec.get("quota"),
        )
    return ServiceConfig(phases=phases, challenge_replica=bool(payload.get("challenge_replica", False)))
