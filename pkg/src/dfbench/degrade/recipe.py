"""Concrete degradation pipelines and their replayable serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..image import ImageBuffer
from ..rng import RngStream
from .steps import DegradationStep, apply_step


@dataclass(frozen=True)
class DegradationRecipe:
    """An ordered list of steps plus the seed that replays them bit-exactly."""

    steps: tuple[DegradationStep, ...]
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"recipe seed must be a 64-bit unsigned integer, got {self.seed}")

    def to_json(self) -> str:
        """Serialize with stable field order; round-trips to an equal value."""
        payload = {
            "seed": self.seed,
            "steps": [{"kind": s.kind, "params": {k: s.params[k] for k in sorted(s.params)}} for s in self.steps],
        }
        return json.dumps(payload, separators=(",", ":"), sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "DegradationRecipe":
        payload = json.loads(text)
        steps = tuple(DegradationStep(s["kind"], dict(s.get("params", {}))) for s in payload["steps"])
        return cls(steps=steps, seed=int(payload["seed"]))


def apply_recipe(img: ImageBuffer, recipe: DegradationRecipe) -> ImageBuffer:
    """Apply steps in order, each with a stream derived from (seed, index).

    Per-step streams are independent of scheduling, so output is bit-identical
    across runs and across degrees of parallelism.
    """
    out = img
    for index, step in enumerate(recipe.steps):
        out = apply_step(out, step, RngStream(recipe.seed, f"step-{index}"))
    return out
