#!/usr/bin/env python3
"""Build the static relation-scene corpus used by the model benchmark.

Writes trace + ground-truth sidecar pairs, then optionally runs the
hull-vs-box comparison on them.

    python scripts/make_corpus.py out/corpus --count 500 --seed 42 --bench
"""

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from manipsem.bench import compare_models, write_corpus_entry
from manipsem.synth import make_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir")
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--bench", action="store_true",
                    help="run the model comparison after writing")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()

    t0 = time.perf_counter()
    items = make_corpus(args.count, seed=args.seed)
    for k, (trace, rels) in enumerate(items):
        write_corpus_entry(args.out_dir, f"scene_{k:04d}", trace, rels)
    print(f"{len(items)} scenes -> {args.out_dir} in {time.perf_counter()-t0:.1f}s")

    if args.bench:
        t0 = time.perf_counter()
        rep = compare_models(items, jobs=args.jobs)
        print(rep.to_table())
        print(f"evaluated in {time.perf_counter()-t0:.1f}s")


if __name__ == "__main__":
    main()
