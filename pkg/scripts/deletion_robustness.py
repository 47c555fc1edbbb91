#!/usr/bin/env python3
"""Word-deletion robustness of the rank-frequency structure.

Takes a words CSV, removes increasing fractions of words with a fixed
seed, and reports how the power-law fit and vocabulary respond.  Prints
name,value-style CSV rows (loss_rate, word_types, r2, entropy of the
word distribution in nats).
"""

import argparse
import math

from een.errors import InsufficientData
from een.metrics import random_deletion, shannon_entropy
from een.network import read_words
from een.words import rank_table, zipf_fit


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("words", help="een-words CSV from `een network` or `een run`")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--steps", type=int, default=10)
    args = ap.parse_args()

    wm = read_words(args.words)
    print("loss_rate,n_words,word_types,r2,entropy_nats")
    for i in range(args.steps):
        rate = i / args.steps
        sub = random_deletion(wm, rate, args.seed)
        if not sub.cc:
            break
        rt = rank_table(sub)
        total = sum(e.frequency for e in rt.entries)
        probs = [e.frequency / total for e in rt.entries]
        ent = shannon_entropy(probs)
        try:
            r2 = zipf_fit(rt, drop_top=1).r2
        except InsufficientData:
            r2 = math.nan
        print(f"{rate},{len(sub.cc)},{len(rt)},{r2},{ent}")


if __name__ == "__main__":
    main()
