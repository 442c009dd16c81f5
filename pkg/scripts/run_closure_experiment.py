#!/usr/bin/env python3
"""Recognition-closure experiment over all scenarios and seeds.

For every scenario, generates traces, extracts atomic actions, and checks
that recognition recovers the scenario name; optionally with point noise
and matching tolerance overrides.

    python scripts/run_closure_experiment.py --seeds 20 --noise 0.01
"""

import argparse
import os
import sys
import time
from collections import Counter

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from manipsem.config import RunConfig
from manipsem.events import extract_atomic_actions
from manipsem.library import default_library, recognize
from manipsem.synth import SCENARIOS, ScenarioSpec, generate_synthetic_trace

NOISY_OVERRIDES = dict(eps_touch=0.03, delta_move=0.005, delta_rel=0.01,
                       distinguish_in_su="false")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--noise", type=float, default=0.0)
    args = ap.parse_args()

    cfg = RunConfig()
    if args.noise > 0:
        cfg = cfg.with_overrides(**NOISY_OVERRIDES)
    lib = default_library()
    hits = Counter()
    t0 = time.perf_counter()
    for name in SCENARIOS:
        for seed in range(args.seeds):
            gen = generate_synthetic_trace(ScenarioSpec(name, seed=seed,
                                                        noise=args.noise))
            acts = extract_atomic_actions(gen.trace, cfg).for_hand(gen.hand)
            names = [r.name for r in recognize(acts, lib)]
            hits[name] += names == [name]
        print(f"{name:9s} {hits[name]}/{args.seeds}")
    total = sum(hits.values())
    n = len(SCENARIOS) * args.seeds
    print(f"recovered {total}/{n} = {total/n:.1%} in {time.perf_counter()-t0:.0f}s")


if __name__ == "__main__":
    main()
