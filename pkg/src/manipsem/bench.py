"""Hull-vs-box model comparison over labeled traces.

Relations are evaluated every ten frames per ordered pair, once with the
full hull classifier and once in the legacy box mode, against constructed
ground truth.  The report carries per-model accuracy, confusion counts,
and flags saying which containment-style labels each model managed to
produce at all: the box model cannot express them.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from concurrent.futures import ProcessPoolExecutor

from .config import RunConfig
from .events import SceneTrace, load_trace
from .relations import ObjectState, PATTERN_LABELS, SsrLabel, classify_ssr
from .synth import GroundTruthRelation

MODES = ("hull", "aabb")
SPECIAL_LABELS = (SsrLabel.Cr, SsrLabel.Wi, SsrLabel.Pwi, SsrLabel.Co, SsrLabel.Pco)


@dataclass
class AccuracyReport:
    total: int = 0
    correct: dict = field(default_factory=lambda: {m: 0 for m in MODES})
    confusion: dict = field(default_factory=lambda: {m: Counter() for m in MODES})
    emitted: dict = field(default_factory=lambda: {m: Counter() for m in MODES})

    def accuracy(self, mode: str) -> float:
        return self.correct[mode] / self.total if self.total else 0.0

    def distinguishability(self, mode: str) -> dict:
        """Can the model produce each containment-style label (and did it,
        correctly, at least once)."""
        out = {}
        for lab in SPECIAL_LABELS:
            out[lab.value] = self.confusion[mode][(lab.value, lab.value)] > 0
        return out

    def merge(self, other: "AccuracyReport") -> "AccuracyReport":
        self.total += other.total
        for m in MODES:
            self.correct[m] += other.correct[m]
            self.confusion[m].update(other.confusion[m])
            self.emitted[m].update(other.emitted[m])
        return self

    def to_table(self) -> str:
        lines = ["metric\thull\taabb"]
        lines.append(f"cases\t{self.total}\t{self.total}")
        lines.append(f"correct\t{self.correct['hull']}\t{self.correct['aabb']}")
        lines.append(f"accuracy\t{self.accuracy('hull'):.4f}\t{self.accuracy('aabb'):.4f}")
        dh, da = self.distinguishability("hull"), self.distinguishability("aabb")
        for lab in SPECIAL_LABELS:
            lines.append(f"distinguishes_{lab.value}\t{dh[lab.value]}\t{da[lab.value]}")
        return "\n".join(lines) + "\n"

    def to_records(self) -> str:
        recs = [{"kind": "summary", "mode": m, "cases": self.total,
                 "correct": self.correct[m], "accuracy": self.accuracy(m),
                 "distinguishes": self.distinguishability(m)} for m in MODES]
        for m in MODES:
            for (gt, pred), n in sorted(self.confusion[m].items()):
                recs.append({"kind": "confusion", "mode": m, "truth": gt,
                             "predicted": pred, "count": n})
        return "\n".join(json.dumps(r) for r in recs) + "\n"


def evaluate_trace(trace: SceneTrace, relations, cfg: RunConfig | None = None) -> AccuracyReport:
    """Score both models on one trace against its relation ground truth."""
    cfg = cfg or RunConfig()
    rep = AccuracyReport()
    by_frame: dict[int, list[GroundTruthRelation]] = {}
    for gt in relations:
        by_frame.setdefault(gt.frame, []).append(gt)
    for f_idx, rows in sorted(by_frame.items()):
        if f_idx >= len(trace.frames):
            continue
        frame = trace.frames[f_idx]
        states = {}
        for obj in frame.objects:
            from .geometry import box_hull
            if obj.points is None:
                hull = box_hull(*obj.box)
                states[obj.id] = ObjectState.from_hull(hull)
            else:
                states[obj.id] = ObjectState.from_cloud(obj.points, cfg.geometry)
        for gt in rows:
            if gt.a not in states or gt.b not in states:
                continue
            rep.total += 1
            for mode in MODES:
                pred = classify_ssr(states[gt.a], states[gt.b], cfg.relation,
                                    cfg.geometry, mode=mode)
                rep.confusion[mode][(gt.label.value, pred.value)] += 1
                if pred in PATTERN_LABELS:
                    rep.emitted[mode][pred.value] += 1
                if pred is gt.label:
                    rep.correct[mode] += 1
    return rep


def compare_models(items, cfg: RunConfig | None = None, jobs: int = 1) -> AccuracyReport:
    """Aggregate hull-vs-box accuracy over (trace, ground truth) pairs.

    ``items`` holds (SceneTrace, [GroundTruthRelation]) tuples or objects
    with .trace and .relations attributes.
    """
    pairs = []
    for item in items:
        if hasattr(item, "trace"):
            pairs.append((item.trace, item.relations))
        else:
            pairs.append((item[0], item[1]))
    if not pairs:
        raise ValueError("empty corpus")
    report = AccuracyReport()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_eval_star, [(t, r, cfg) for t, r in pairs],
                                 chunksize=max(1, len(pairs) // (4 * jobs))):
                report.merge(part)
    else:
        for trace, rels in pairs:
            report.merge(evaluate_trace(trace, rels, cfg))
    return report


def _eval_star(args):
    return evaluate_trace(*args)


def load_corpus_dir(path: str):
    """(trace, relations) pairs from a directory of trace + .gt.json files."""
    out = []
    for name in sorted(os.listdir(path)):
        if not name.endswith(".jsonl"):
            continue
        trace = load_trace(os.path.join(path, name))
        gt_path = os.path.join(path, name[:-len(".jsonl")] + ".gt.json")
        rels = []
        if os.path.exists(gt_path):
            with open(gt_path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
            for row in doc.get("relations", []):
                rels.append(GroundTruthRelation(int(row["frame"]), row["a"],
                                                row["b"], SsrLabel(row["label"])))
        out.append((trace, rels))
    return out


def write_corpus_entry(dirpath: str, stem: str, trace: SceneTrace, relations,
                       name: str | None = None) -> None:
    from .events import dump_trace
    os.makedirs(dirpath, exist_ok=True)
    dump_trace(trace, os.path.join(dirpath, stem + ".jsonl"))
    doc = {"relations": [{"frame": g.frame, "a": g.a, "b": g.b, "label": g.label.value}
                         for g in relations]}
    if name:
        doc["name"] = name
    with open(os.path.join(dirpath, stem + ".gt.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
