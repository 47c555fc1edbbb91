"""Three-class synthetic dataset construction, driven end to end by the
primary CLI: synth -> encode -> network -> image (plus the word maps the
deletion sweeps perturb).

Classes with distinct generative rules:
  periodic  - a repeating melodic motif (structured, self-similar),
  random    - uniformly random tones on the same beat grid,
  pink      - Voss-McCartney pink noise (broadband, no tonal structure).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from eenlab.cli import een

# fixed link weights for dataset rendering; the lab does not search
NETWORK_ARGS = ("--w1", 1.0, "--w2", 1.0, "--w3", 1.0, "--w4", 1.0,
                "--theta", 60.0)


def periodic_events(duration: float, beat: float = 0.4) -> list[dict]:
    motif = [0, 4, 7, 12, 7, 4, 2, 5]
    amps = [0.5, 0.18, 0.32, 0.14, 0.42, 0.24]
    bases = [0, 5, -3, 2]
    events = []
    t, bar = 0.0, 0
    while t + beat <= duration:
        base = 40 + bases[bar % len(bases)]
        for i, step in enumerate(motif):
            if t + beat > duration:
                break
            events.append(dict(scale_idx=base + step, start=round(t, 6),
                               duration=beat * 0.95,
                               amplitude=amps[(bar + i) % len(amps)]))
            t += beat
        bar += 1
    return events


def random_events(duration: float, seed: int, beat: float = 0.4) -> list[dict]:
    rng = np.random.default_rng(seed)
    events = []
    t = 0.0
    while t + beat <= duration:
        events.append(dict(scale_idx=int(rng.integers(28, 70)),
                           start=round(t, 6), duration=beat * 0.95,
                           amplitude=float(rng.uniform(0.15, 0.55))))
        t += beat
    return events


def build_class_corpus(name: str, out: Path, duration: float, seed: int) -> dict:
    """synth -> encode -> network -> image for one class; returns paths."""
    out.mkdir(parents=True, exist_ok=True)
    wav = out / f"{name}.wav"
    if name == "periodic":
        events = periodic_events(duration)
    elif name == "random":
        events = random_events(duration, seed)
    elif name == "pink":
        events = None
    else:
        raise ValueError(f"unknown class {name}")
    if events is None:
        een("synth", "pink", "--duration", duration, "--seed", seed, "-o", wav)
    else:
        ev_json = out / f"{name}_events.json"
        ev_json.write_text(json.dumps(events))
        een("synth", "tones", "--events", ev_json, "--duration", duration,
            "-o", wav)
    grid = out / f"{name}_grid.csv"
    words = out / f"{name}_words.csv"
    image = out / f"{name}_image.csv"
    een("encode", wav, "-o", grid)
    een("network", grid, "-o", words, *NETWORK_ARGS)
    een("image", words, "-o", image)
    return {"wav": str(wav), "grid": str(grid), "words": str(words),
            "image": str(image)}


def build_three_class_dataset(out: Path, duration: float = 100.0,
                              seed: int = 0) -> dict[str, dict]:
    """All three classes; returns {class: {wav, grid, words, image}}."""
    return {
        name: build_class_corpus(name, Path(out), duration, seed + i)
        for i, name in enumerate(("periodic", "random", "pink"))
    }
