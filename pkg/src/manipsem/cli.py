"""Command-line interface.

Subcommands: relations, describe, bench, parse, generate.  Global flags
--config/--seed/--format apply to all of them; MANIPSEM_CONFIG names a
config file when --config is absent.  Data goes to stdout, diagnostics to
stderr.  Exit codes: 2 trace parse error, 3 schema/monotonicity error,
4 unavailable description level, 5 empty corpus, 6 token string rejected.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bench as bench_mod
from . import events, grammar, synth
from .config import RunConfig, load_run_config
from .geometry import aabb_gap
from .library import default_library, load_mapping_library
from .pipeline import TIER_HEADINGS, analyze_trace, describe_document, describe_hand
from .realizer import LevelUnavailable, default_templates, load_template_set
from .relations import ObjectState, classify_dsr, classify_ssr

EXIT_PARSE = 2
EXIT_SCHEMA = 3
EXIT_LEVEL = 4
EXIT_EMPTY_CORPUS = 5
EXIT_NOPARSE = 6


def _build_config(args) -> RunConfig:
    cfg = load_run_config(args.config)
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    return cfg


def _resources(cfg: RunConfig):
    lib = load_mapping_library(cfg.library_path) if cfg.library_path else default_library()
    ts = load_template_set(cfg.template_path) if cfg.template_path else default_templates()
    return lib, ts


def cmd_relations(args) -> int:
    cfg = _build_config(args)
    trace = events.load_trace(args.trace)
    cache = events._GeometryCache(cfg)
    window = cfg.relation.window
    states_hist = []
    rows = []
    for f_idx, frame in enumerate(trace.frames):
        states = {o.id: cache.state(o) for o in frame.objects}
        states_hist.append({k: v.centroid() for k, v in states.items()})
        ids = sorted(states)
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                ssr_ab = classify_ssr(states[a], states[b], cfg.relation, cfg.geometry)
                ssr_ba = classify_ssr(states[b], states[a], cfg.relation, cfg.geometry)
                dsr = ""
                if f_idx + 1 > window:
                    ta = np.array([h[a] for h in states_hist[-(window + 1):] if a in h])
                    tb = np.array([h[b] for h in states_hist[-(window + 1):] if b in h])
                    if len(ta) == len(tb) and len(ta) >= 2:
                        touching = aabb_gap(states[a].aabb, states[b].aabb) <= cfg.geometry.eps_touch
                        dsr = classify_dsr(ta, tb, touching, cfg.relation).value
                rows.append((f_idx, a, b, ssr_ab.value, ssr_ba.value, dsr))
    if args.format == "records":
        for f, a, b, ab, ba, dsr in rows:
            print(json.dumps({"frame": f, "a": a, "b": b, "ssr_ab": ab,
                              "ssr_ba": ba, "dsr": dsr or None}))
    else:
        print("frame\ta\tb\tssr(a,b)\tssr(b,a)\tdsr")
        for row in rows:
            print("\t".join(str(v) for v in row))
    return 0


def cmd_describe(args) -> int:
    cfg = _build_config(args)
    lib, ts = _resources(cfg)
    trace = events.load_trace(args.trace)
    analysis = analyze_trace(trace, cfg, lib, ts)
    hands = ("left", "right") if args.hand == "both" else (args.hand,)
    level = None if args.all_levels else (args.level if args.level else None)
    if args.level:
        for hand in hands:
            ha = analysis.hands.get(hand)
            if ha and ha.episodes:
                for ep in ha.episodes:
                    if args.level not in ep.levels():
                        print(f"level {args.level} unavailable for the {hand} hand; "
                              f"available: {sorted(ep.levels())}", file=sys.stderr)
                        return EXIT_LEVEL
    if args.format == "records":
        for hand in hands:
            for k, desc in describe_hand(analysis, hand, level):
                for text, (lo, hi) in desc.sentences:
                    print(json.dumps({"hand": hand, "level": k,
                                      "frames": [lo, hi], "sentence": text}))
    else:
        print(describe_document(analysis, hands, level))
    return 0


def cmd_bench(args) -> int:
    cfg = _build_config(args)
    try:
        corpus = bench_mod.load_corpus_dir(args.corpus)
    except FileNotFoundError:
        print(f"corpus directory not found: {args.corpus}", file=sys.stderr)
        return EXIT_EMPTY_CORPUS
    if not corpus:
        print("corpus directory holds no traces", file=sys.stderr)
        return EXIT_EMPTY_CORPUS
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    report = bench_mod.compare_models(corpus, cfg, jobs=jobs)
    out_dir = args.out_dir or args.corpus
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "bench_report.tsv"), "w", encoding="utf-8") as fh:
        fh.write(report.to_table())
    with open(os.path.join(out_dir, "bench_report.records"), "w", encoding="utf-8") as fh:
        fh.write(report.to_records())
    if args.format == "records":
        sys.stdout.write(report.to_records())
    else:
        sys.stdout.write(report.to_table())
    print(f"reports written to {out_dir}", file=sys.stderr)
    return 0


def cmd_parse(args) -> int:
    with open(args.tokens, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    try:
        tree = grammar.parse(tokens)
    except grammar.NoParse as exc:
        print(f"no parse: furthest progress at token offset {exc.position}",
              file=sys.stderr)
        return EXIT_NOPARSE
    if args.format == "records":
        def walk(node):
            if node.is_leaf:
                return {"token": node.token}
            return {"symbol": node.symbol, "children": [walk(c) for c in node.children]}
        print(json.dumps(walk(tree)))
    else:
        print(tree.render())
    return 0


def cmd_generate(args) -> int:
    cfg = _build_config(args)
    if args.corpus_out:
        items = synth.make_corpus(args.count, seed=args.seed)
        for k, (trace, rels) in enumerate(items):
            bench_mod.write_corpus_entry(args.corpus_out, f"scene_{k:04d}", trace, rels)
        print(f"{len(items)} scenes written to {args.corpus_out}", file=sys.stderr)
        return 0
    spec = synth.ScenarioSpec(args.scenario, seed=args.seed, noise=args.noise,
                              frames=args.frames,
                              points_per_edge=args.points_per_edge)
    gen = synth.generate_synthetic_trace(spec, cfg=cfg)
    if args.out:
        events.dump_trace(gen.trace, args.out)
        if args.gt_out:
            doc = {"name": gen.name, "hand": gen.hand,
                   "bindings": gen.bindings,
                   "actions": [str(a) for a in gen.actions],
                   "relations": [{"frame": g.frame, "a": g.a, "b": g.b,
                                  "label": g.label.value} for g in gen.relations]}
            with open(args.gt_out, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=1)
        print(f"trace written to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(events.dumps_trace(gen.trace))
    return 0


def _global_flags(parser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None

    def dflt(v):
        return argparse.SUPPRESS if suppress else v

    parser.add_argument("--config", default=dflt(None),
                        help="config file (key = value); falls back to $MANIPSEM_CONFIG")
    parser.add_argument("--seed", type=int, default=dflt(0),
                        help="seed for generation commands")
    parser.add_argument("--format", choices=("text", "records"), default=dflt("text"),
                        help="output format: human text or one record per line")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE", default=dflt(None),
                        help="override a config value (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="manipsem",
                                description="Spatial-relation semantics and "
                                            "descriptions for manipulation traces")
    _global_flags(p, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("relations", help="per-frame spatial relation table",
                        parents=[common])
    sp.add_argument("trace")
    sp.set_defaults(func=cmd_relations)

    sp = sub.add_parser("describe", help="multi-granularity descriptions", parents=[common])
    sp.add_argument("trace")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--level", type=int)
    g.add_argument("--all-levels", action="store_true")
    sp.add_argument("--hand", choices=("left", "right", "both"), default="both")
    sp.set_defaults(func=cmd_describe)

    sp = sub.add_parser("bench", help="hull-vs-box accuracy on a labeled corpus", parents=[common])
    sp.add_argument("corpus")
    sp.add_argument("--compare", action="store_true",
                    help="compare both object models (always on)")
    sp.add_argument("--jobs", type=int, default=0, help="parallel workers")
    sp.add_argument("--out-dir")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("parse", help="parse an action token file", parents=[common])
    sp.add_argument("tokens")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("generate", help="generate synthetic traces or a corpus", parents=[common])
    sp.add_argument("scenario", nargs="?", default="Screw")
    sp.add_argument("--noise", type=float, default=0.0)
    sp.add_argument("--frames", type=int)
    sp.add_argument("--points-per-edge", type=int, default=3)
    sp.add_argument("--out")
    sp.add_argument("--gt-out")
    sp.add_argument("--corpus-out", help="write a static relation corpus here instead")
    sp.add_argument("--count", type=int, default=500)
    sp.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except events.ParseError as exc:
        print(f"trace parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (events.SchemaError, events.MonotonicityError) as exc:
        print(f"trace schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except LevelUnavailable as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_LEVEL
    except synth.UnknownScenario as exc:
        print(f"unknown scenario: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
