"""Bundled example origamis."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import OrigamiError
from .origami import Origami, build_origami, from_json

NAMES = ("torus", "l-shape", "wollmilchsau", "random-5-seed1", "random-6-seed2")


def random_transitive_origami(rng: np.random.Generator, n: int, label: str = "") -> Origami:
    """Uniform pair of permutations, redrawn until ``<h, v>`` is transitive."""
    while True:
        h = rng.permutation(n).tolist()
        v = rng.permutation(n).tolist()
        try:
            return build_origami(h, v, label)
        except OrigamiError:
            continue


def load(name: str) -> Origami:
    path = resources.files("origamikz") / "corpus" / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled origami named {name!r}")
    return from_json(json.loads(path.read_text()))


def bundled_corpus() -> list:
    return [load(n) for n in NAMES]


def resolve(spec: str) -> Origami:
    """A path to a JSON file or the name of a bundled example."""
    p = Path(spec)
    if p.is_file():
        return from_json(json.loads(p.read_text()))
    if spec in NAMES:
        return load(spec)
    raise FileNotFoundError(f"{spec!r} is neither a file nor a bundled example")
