#!/usr/bin/env python3
"""Compare how well tonal and non-tonal corpora organize under the sweep.

Encodes each input WAV, runs the full default weight grid, and prints the
best fit quality and vocabulary size per corpus.  Structured tones should
out-organize Morse code, which lives on a single carrier scale.

Usage: python scripts/morse_vs_tones.py corpora/melody_60s.wav corpora/morse.wav
"""

import argparse

from een.errors import NoQualifyingCombo
from een.ingest import encode_file
from een.selforg import default_grid_spec, self_organize


def sweep(path, jobs):
    grid = encode_file(path)
    spec = default_grid_spec(grid)
    try:
        best, results = self_organize(grid, spec, jobs=jobs)
    except NoQualifyingCombo as exc:
        best, results = None, exc.results
    top = max(results, key=lambda r: r.r2)
    return grid, best, top, len(results)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("wavs", nargs="+")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    print(f"{'corpus':<28} {'pixels':>7} {'combos':>7} {'max r2':>8} "
          f"{'winner r2':>10} {'word types':>11}")
    for path in args.wavs:
        grid, best, top, n = sweep(path, args.jobs)
        win_r2 = f"{best.r2:.4f}" if best else "none"
        win_wt = f"{best.word_types}" if best else "-"
        print(f"{path:<28} {grid.n_pixels:>7} {n:>7} {top.r2:>8.4f} "
              f"{win_r2:>10} {win_wt:>11}")


if __name__ == "__main__":
    main()
