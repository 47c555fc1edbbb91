#!/usr/bin/env python3
"""Generate the synthetic study corpora as WAV files.

Writes a structured melody, Morse code of random English-like text, and
white/pink noise, each at several durations, into --out (default corpora/).
"""

import argparse
from pathlib import Path

import numpy as np

from een.ingest import EncodeConfig
from een.synth import ToneEvent, gen_morse, gen_noise, gen_tone_corpus, write_wav

WORDS = [
    "THE", "QUICK", "BROWN", "FOX", "JUMPS", "OVER", "LAZY", "DOG", "AND",
    "RUNS", "INTO", "GREEN", "FIELD", "WHILE", "BIRDS", "SING", "ABOVE",
    "RIVER", "STONE", "PATH",
]


def melody_events(duration, motif=(0, 4, 7, 12, 7, 4, 2, 5), beat=0.4):
    amps = [0.5, 0.18, 0.32, 0.14, 0.42, 0.24]
    bases = [0, 5, -3, 2]
    events = []
    t, bar = 0.0, 0
    while t + beat <= duration:
        base = 40 + bases[bar % len(bases)]
        for i, step in enumerate(motif):
            if t + beat > duration:
                break
            events.append(ToneEvent(base + step, t, beat * 0.95,
                                    amps[(bar + i) % len(amps)]))
            if i % 4 == 0:
                events.append(ToneEvent(base + step - 12, t, beat * 0.95,
                                        amps[(bar + i + 3) % len(amps)] * 0.8))
            t += beat
        bar += 1
    return events


def random_text(seed, n_words):
    rng = np.random.default_rng(seed)
    return " ".join(WORDS[int(i)] for i in rng.integers(0, len(WORDS), n_words))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="corpora")
    ap.add_argument("--rate", type=int, default=44100)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = EncodeConfig()

    for dur in (30.0, 60.0):
        buf = gen_tone_corpus(melody_events(dur), cfg, args.rate, duration=dur)
        write_wav(buf, out / f"melody_{int(dur)}s.wav")
        print(f"wrote melody_{int(dur)}s.wav ({buf.duration:.1f}s)")

    morse = gen_morse(random_text(args.seed, 20), 12.0, 600.0, args.rate)
    write_wav(morse, out / "morse.wav")
    print(f"wrote morse.wav ({morse.duration:.1f}s)")

    for kind in ("white", "pink"):
        buf = gen_noise(kind, 60.0, args.seed, args.rate)
        write_wav(buf, out / f"{kind}_60s.wav")
        print(f"wrote {kind}_60s.wav")


if __name__ == "__main__":
    main()
