"""Per-phase degradation distributions and recipe sampling.

A profile lists, for one corpus phase, which degradation kinds may occur,
each kind's selection probability, and the parameter ranges to draw from.
Profiles live in human-editable YAML; the parser rejects unknown kinds and
parameters. Across phases the kind sets form a difficulty ladder: validation
extends training, the public test extends validation, and the private test
adds exactly two further kinds.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from ..rng import RngStream
from .recipe import DegradationRecipe
from .steps import PARAM_SPECS, DegradationStep, _Choice, _Float, _Int
from .steps import InvalidParameterError

PHASES = ("train", "val", "public_test", "private_test")

# Kinds each phase must add on top of the previous phase's kinds.
LADDER_ADDITIONS = {
    "val": frozenset({"speckle_noise", "poisson_noise"}),
    "public_test": frozenset({"salt_pepper", "grayscale", "self_overlay"}),
}
PRIVATE_EXTRA_KINDS = 2


class InvalidProfileError(ValueError):
    """A profile is empty, malformed, or breaks the phase ladder."""


@dataclass(frozen=True)
class ProfileEntry:
    """One samplable kind: selection probability plus parameter ranges.

    Numeric parameters use inclusive ``[lo, hi]`` ranges; enumerated
    parameters (resize interpolation, distractor text) use a list of choices.
    """

    kind: str
    probability: float
    params: dict[str, Any]

    def __post_init__(self) -> None:
        if self.kind not in PARAM_SPECS:
            raise InvalidProfileError(f"unknown degradation kind {self.kind!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise InvalidProfileError(f"{self.kind}: selection probability {self.probability} outside [0, 1]")
        object.__setattr__(self, "params", _validate_ranges(self.kind, self.params))


def _validate_ranges(kind: str, params: Mapping[str, Any]) -> dict[str, Any]:
    spec = PARAM_SPECS[kind]
    sampleable = set(spec)
    if kind == "text_distractor":
        sampleable |= {"text"}
    unknown = set(params) - sampleable
    if unknown:
        raise InvalidProfileError(f"{kind}: unknown parameters {sorted(unknown)}")
    missing = set(spec) - set(params)
    if missing:
        raise InvalidProfileError(f"{kind}: missing parameter ranges {sorted(missing)}")
    out: dict[str, Any] = {}
    for name, value in params.items():
        if name == "text":
            if not isinstance(value, list) or not value or not all(isinstance(t, str) and t for t in value):
                raise InvalidProfileError("text_distractor.text must be a nonempty list of nonempty strings")
            out[name] = list(value)
            continue
        rule = spec[name]
        if isinstance(rule, _Choice):
            if not isinstance(value, list) or not value or not set(value) <= set(rule.options):
                raise InvalidProfileError(f"{kind}.{name} choices {value!r} must be a nonempty subset of {rule.options}")
            out[name] = list(value)
        else:
            try:
                lo, hi = (float(v) for v in value)
            except (TypeError, ValueError):
                raise InvalidProfileError(f"{kind}.{name} range must be [lo, hi], got {value!r}") from None
            if lo > hi:
                raise InvalidProfileError(f"{kind}.{name} range [{lo}, {hi}] is inverted")
            legal_lo, legal_hi = rule.lo, rule.hi
            if lo < legal_lo or hi > legal_hi or (isinstance(rule, _Float) and rule.lo_open and lo == legal_lo):
                raise InvalidProfileError(
                    f"{kind}.{name} range [{lo}, {hi}] exceeds the legal range [{legal_lo}, {legal_hi}]"
                )
            out[name] = [int(lo), int(hi)] if isinstance(rule, _Int) else [lo, hi]
    return out


@dataclass(frozen=True)
class DegradationProfile:
    """The sampling distribution over degradations for one phase."""

    phase: str
    entries: tuple[ProfileEntry, ...]
    max_steps: int

    def __post_init__(self) -> None:
        if self.phase not in PHASES:
            raise InvalidProfileError(f"unknown phase {self.phase!r} (expected one of {PHASES})")
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.max_steps < 1:
            raise InvalidProfileError(f"max_steps must be >= 1, got {self.max_steps}")

    def kinds(self) -> frozenset[str]:
        return frozenset(e.kind for e in self.entries)


def _sample_param(kind: str, name: str, value: Any, gen: np.random.Generator) -> Any:
    if name == "text" or isinstance(PARAM_SPECS[kind][name], _Choice):
        return value[int(gen.integers(0, len(value)))]
    rule = PARAM_SPECS[kind][name]
    lo, hi = value
    if isinstance(rule, _Int):
        return int(gen.integers(lo, hi + 1))
    return float(gen.uniform(lo, hi))


def sample_recipe(profile: DegradationProfile, rng: RngStream) -> DegradationRecipe:
    """Draw one concrete recipe from a profile.

    Each entry is included independently with its selection probability,
    parameters are drawn uniformly from their ranges, the step order is
    shuffled, and at most ``max_steps`` steps are kept. The recipe records a
    fresh seed so its application can be replayed bit-exactly.
    """
    if not profile.entries:
        raise InvalidProfileError(f"profile for phase {profile.phase!r} has no entries")
    gen = rng.generator()
    recipe_seed = int(gen.integers(0, 2**63))
    steps: list[DegradationStep] = []
    for entry in profile.entries:
        if gen.random() >= entry.probability:
            continue
        params = {name: _sample_param(entry.kind, name, entry.params[name], gen) for name in sorted(entry.params)}
        steps.append(DegradationStep(entry.kind, params))
    order = gen.permutation(len(steps))
    steps = [steps[i] for i in order][: profile.max_steps]
    return DegradationRecipe(tuple(steps), recipe_seed)


def validate_ladder(profiles: Mapping[str, DegradationProfile]) -> None:
    """Enforce the cross-phase difficulty ladder on a full profile set."""
    missing = set(PHASES) - set(profiles)
    if missing:
        raise InvalidProfileError(f"profile set is missing phases {sorted(missing)}")
    for phase, profile in profiles.items():
        if profile.phase != phase:
            raise InvalidProfileError(f"profile keyed {phase!r} declares phase {profile.phase!r}")
    train = profiles["train"].kinds()
    val = profiles["val"].kinds()
    public = profiles["public_test"].kinds()
    private = profiles["private_test"].kinds()
    if not val >= train | LADDER_ADDITIONS["val"]:
        raise InvalidProfileError("val profile must cover all train kinds plus speckle_noise and poisson_noise")
    if not public >= val | LADDER_ADDITIONS["public_test"]:
        raise InvalidProfileError("public_test profile must cover all val kinds plus salt_pepper, grayscale, self_overlay")
    if not private >= public:
        raise InvalidProfileError("private_test profile must cover all public_test kinds")
    extra = private - public
    if len(extra) != PRIVATE_EXTRA_KINDS:
        raise InvalidProfileError(
            f"private_test must add exactly {PRIVATE_EXTRA_KINDS} kinds beyond public_test, adds {sorted(extra)}"
        )


def _profile_from_dict(phase: str, payload: Mapping[str, Any]) -> DegradationProfile:
    unknown = set(payload) - {"max_steps", "entries"}
    if unknown:
        raise InvalidProfileError(f"{phase}: unknown profile keys {sorted(unknown)}")
    entries = []
    for item in payload.get("entries", []):
        extra = set(item) - {"kind", "probability", "params"}
        if extra:
            raise InvalidProfileError(f"{phase}: unknown entry keys {sorted(extra)}")
        try:
            entries.append(
                ProfileEntry(
                    kind=item["kind"],
                    probability=float(item["probability"]),
                    params=dict(item.get("params", {})),
                )
            )
        except KeyError as exc:
            raise InvalidProfileError(f"{phase}: entry is missing {exc}") from None
    return DegradationProfile(phase=phase, entries=tuple(entries), max_steps=int(payload.get("max_steps", 1)))


def load_profiles(path: str | Path) -> dict[str, DegradationProfile]:
    """Parse a YAML profile file mapping phase names to profiles."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = yaml.safe_load(fh)
    return parse_profiles(payload)


def parse_profiles(payload: Any) -> dict[str, DegradationProfile]:
    if not isinstance(payload, Mapping) or not payload:
        raise InvalidProfileError("profile file must map phase names to profiles")
    unknown = set(payload) - set(PHASES)
    if unknown:
        raise InvalidProfileError(f"unknown phases {sorted(unknown)} (expected {PHASES})")
    return {phase: _profile_from_dict(phase, spec) for phase, spec in payload.items()}


def save_profiles(profiles: Mapping[str, DegradationProfile], path: str | Path) -> None:
    payload = {
        phase: {
            "max_steps": p.max_steps,
            "entries": [
                {"kind": e.kind, "probability": e.probability, "params": e.params} for e in p.entries
            ],
        }
        for phase, p in profiles.items()
    }
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(payload, fh, sort_keys=False)


def default_profiles() -> dict[str, DegradationProfile]:
    """The documented default phase profiles shipped with the package."""
    ref = importlib.resources.files("dfbench").joinpath("data/default_profiles.yaml")
    payload = yaml.safe_load(ref.read_text(encoding="utf-8"))
    profiles = parse_profiles(payload)
    validate_ladder(profiles)
    return profiles
