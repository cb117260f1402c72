"""Synthetic messy-text dataset generator.

Each line is a comma-joined `tag:score` list followed by space-separated
feature values: class-0 rows carry an "indoor" tag, class-1 rows "outdoor".
Features are linearly separable by construction: a fixed unit direction
(alternating signs, the same for every seed so that independently generated
train and test files share one separator) carries sign(class) *
(margin/2 + u), while the remaining components are isotropic noise with no
projection onto that direction. Generation is fully determined by the seed.
"""

from __future__ import annotations

import math
import random
from pathlib import Path

from .errors import SourceIOError

_FILLER_TAGS = ("animal", "pet", "white", "black", "tree", "water", "person", "sky")
_CLASS_TAGS = {0: "indoor", 1: "outdoor"}


def _separating_direction(d: int) -> "list[float]":
    unit = 1.0 / math.sqrt(d)
    return [unit if j % 2 == 0 else -unit for j in range(d)]


def generate_dataset(n: int, d: int, margin: float, seed: int, path) -> None:
    """Write `n` messy lines of `d` features to `path`."""
    rng = random.Random(seed)
    direction = _separating_direction(d)

    lines = []
    for i in range(n):
        label = i % 2
        sign = 1.0 if label == 1 else -1.0
        noise = [rng.uniform(-1.0, 1.0) for _ in range(d)]
        dot = sum(a * b for a, b in zip(noise, direction))
        offset = sign * (margin / 2.0 + rng.uniform(0.0, 1.0))
        features = [z - dot * u + offset * u for z, u in zip(noise, direction)]

        tags = [(_CLASS_TAGS[label], rng.uniform(0.5, 1.0))]
        for _ in range(3):
            tags.append((rng.choice(_FILLER_TAGS), rng.uniform(0.0, 1.0)))
        tag_text = ",".join(f"{name}:{score:.4f}" for name, score in tags)
        feature_text = " ".join(f"{v:.3f}" for v in features)
        lines.append(f"{tag_text} {feature_text}")

    try:
        Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    except OSError as err:
        raise SourceIOError(f"cannot write dataset to {path}: {err}") from err
