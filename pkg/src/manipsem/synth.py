"""Synthetic scene generation with exact ground truth.

Scenario scripts move axis-aligned box bodies through contact episodes that
realize the shipped action mappings: the expected atomic-action stream is
the mapping's expansion with known repetition counts, and noise-free
extraction must reproduce it exactly.  Spatial-relation ground truth comes
from interval arithmetic on the box descriptions, a route independent of
the hull pipeline.

Frame budgeting matters: motion windows are sized so sustained phases emit
a fixed number of co-motion actions under the default thresholds (window
10, debounce 3), while transitional zones stay shorter than one window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .actions import GROUND, AtomicAction
from .config import RelationConfig, RunConfig
from .events import Frame, ObjectInstance, SceneTrace
from .library import MappingLibrary, decompose, default_library
from .relations import SsrLabel, ssr_dual

SCENARIOS = ("Idle", "Approach", "Retreat", "Lift", "Place", "Hold", "Stir",
             "Pour", "Cut", "Drink", "Wipe", "Hammer", "Saw", "Screw")

V_VERT = 0.025     # m/frame vertical travel
V_WORK = 0.008     # m/frame sustained work motion
EVAL_STRIDE = 10   # ground-truth relations every ten frames


class UnknownScenario(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    seed: int = 0
    noise: float = 0.0
    frames: int | None = None       # optional padding to a minimum length
    points_per_edge: int = 3

    def __post_init__(self):
        if self.name not in SCENARIOS:
            raise UnknownScenario(self.name)


@dataclass(frozen=True)
class GroundTruthRelation:
    frame: int
    a: str
    b: str
    label: SsrLabel


@dataclass
class GeneratedTrace:
    trace: SceneTrace
    relations: list[GroundTruthRelation]
    actions: list[AtomicAction]
    name: str
    bindings: dict
    hand: str


@dataclass
class Body:
    id: str
    label: str
    role: str
    size: np.ndarray
    open_top: bool = False
    solid: bool = True

    def box(self, center):
        half = self.size / 2.0
        return center - half, center + half


def box_shell_cloud(size, per_edge: int = 3, open_top: bool = False,
                    solid: bool = True) -> np.ndarray:
    """Surface lattice of a box centered at the origin."""
    half = np.asarray(size, dtype=np.float64) / 2.0
    ts = np.linspace(0.0, 1.0, per_edge)
    pts = []
    for i in ts:
        for j in ts:
            for k in ts:
                interior = 0 < i < 1 and 0 < j < 1 and 0 < k < 1
                if interior:
                    continue
                if open_top and j == 1.0 and 0 < i < 1 and 0 < k < 1:
                    continue
                pts.append((np.array([i, j, k]) * 2.0 - 1.0) * half)
    if solid:
        pts.append(np.zeros(3))
    return np.array(pts)


class Script:
    """A rigid-body world animated frame by frame."""

    def __init__(self, rng: np.random.Generator, noise: float, per_edge: int):
        self.rng = rng
        self.noise = noise
        self.per_edge = per_edge
        self.bodies: dict[str, Body] = {}
        self.clouds: dict[str, np.ndarray] = {}
        self.pos: dict[str, np.ndarray] = {}
        self.track: list[dict[str, np.ndarray]] = []
        self.ground_box = None
        self.ground_id = None

    def add_ground(self, half_extent=0.9, oid="table", label="table"):
        self.ground_box = (np.array([-half_extent, -0.05, -half_extent]),
                           np.array([half_extent, 0.0, half_extent]))
        self.ground_id = oid
        self.ground_label = label

    def add(self, oid, label, role, size, center, open_top=False, solid=True):
        body = Body(oid, label, role, np.asarray(size, dtype=np.float64),
                    open_top, solid)
        self.bodies[oid] = body
        self.clouds[oid] = box_shell_cloud(body.size, self.per_edge, open_top, solid)
        self.pos[oid] = np.asarray(center, dtype=np.float64).copy()

    def snapshot(self):
        self.track.append({k: v.copy() for k, v in self.pos.items()})

    def hold(self, n: int):
        for _ in range(n):
            self.snapshot()

    def move(self, deltas: dict, n: int):
        deltas = {k: np.asarray(v, dtype=np.float64) for k, v in deltas.items()}
        for step in range(1, n + 1):
            for oid, d in deltas.items():
                self.pos[oid] = self.pos[oid] + d / n
            self.snapshot()

    def orbit(self, ids, n: int, radius: float = 0.016, step: float = 0.5):
        """Small horizontal circular drift keeping mean speed near V_WORK."""
        for k in range(n):
            d = np.array([math.cos(step * k), 0.0, math.sin(step * k)])
            d = d * radius * step
            for oid in ids:
                self.pos[oid] = self.pos[oid] + d
            self.snapshot()

    def shake(self, ids, n: int, axis=2, amp: float = 0.015):
        """Back-and-forth strokes along one axis."""
        direction = 1.0
        for k in range(n):
            d = np.zeros(3)
            d[axis] = direction * amp
            for oid in ids:
                self.pos[oid] = self.pos[oid] + d
            self.snapshot()
            if k % 2 == 1:
                direction = -direction

    def build_trace(self, trace_id: str, min_frames: int | None = None) -> SceneTrace:
        if min_frames is not None and len(self.track) < min_frames:
            last = self.track[-1]
            while len(self.track) < min_frames:
                self.track.append({k: v.copy() for k, v in last.items()})
        frames = []
        dt = 1.0 / 30.0
        for f_idx, positions in enumerate(self.track):
            objects = []
            if self.ground_box is not None:
                objects.append(ObjectInstance(self.ground_id, self.ground_label,
                                              "ground", None,
                                              (tuple(self.ground_box[0]),
                                               tuple(self.ground_box[1]))))
            for oid, body in self.bodies.items():
                pts = self.clouds[oid] + positions[oid]
                if self.noise > 0:
                    pts = pts + self.rng.uniform(-self.noise, self.noise, pts.shape)
                objects.append(ObjectInstance(oid, body.label, body.role, pts, None))
            frames.append(Frame(f_idx * dt, tuple(objects)))
        return SceneTrace(tuple(frames), trace_id, 30.0)


# ---------------------------------------------------------------------------
# Analytic relation ground truth from box descriptions
# ---------------------------------------------------------------------------

def _intervals(lo, hi):
    return tuple(zip(lo, hi))


def _inside(inner, outer, margin):
    return all(il >= ol + margin and ih <= oh - margin
               for (il, ih), (ol, oh) in zip(inner, outer))


def _gap(a, b):
    g = 0.0
    for (al, ah), (bl, bh) in zip(a, b):
        d = max(bl - ah, al - bh, 0.0)
        g += d * d
    return math.sqrt(g)


def _pen_depth(a, b):
    depth = math.inf
    for (al, ah), (bl, bh) in zip(a, b):
        overlap = min(ah, bh) - max(al, bl)
        if overlap <= 0:
            return 0.0
        depth = min(depth, overlap)
    return depth


def _xz_overlap(a, b, margin):
    for axis in (0, 2):
        (al, ah), (bl, bh) = a[axis], b[axis]
        if min(ah, bh) - max(al, bl) <= margin:
            return False
    return True


def analytic_box_ssr(box_a, box_b, meta_a: Body, meta_b: Body,
                     cfg: RelationConfig, eps_touch: float) -> SsrLabel:
    """Relation of box a to box b from interval arithmetic alone."""
    a = _intervals(*box_a)
    b = _intervals(*box_b)
    wall = eps_touch

    def through_opening(inner, outer):
        # rod standing in an open-topped container and poking out the top
        return (_xz_overlap(inner, outer, 0.0)
                and all(inner[ax][0] >= outer[ax][0] + 1e-9
                        and inner[ax][1] <= outer[ax][1] - 1e-9 for ax in (0, 2))
                and inner[1][1] > outer[1][1] + eps_touch
                and inner[1][0] < outer[1][1] - eps_touch
                and inner[1][0] >= outer[1][0] - 1e-9)

    if _inside(a, b, eps_touch):
        near_wall = min(
            min(abs(av - bv) for av in pair_a for bv in pair_b)
            for pair_a, pair_b in zip(a, b)
        ) <= wall
        return SsrLabel.In if near_wall else SsrLabel.Wi
    if _inside(b, a, eps_touch):
        near_wall = min(
            min(abs(av - bv) for av in pair_a for bv in pair_b)
            for pair_a, pair_b in zip(b, a)
        ) <= wall
        return SsrLabel.Su if near_wall else SsrLabel.Co
    if meta_b.open_top and through_opening(a, b):
        return SsrLabel.Pwi
    if meta_a.open_top and through_opening(b, a):
        return SsrLabel.Pco
    pen = _pen_depth(a, b)
    gap = _gap(a, b)
    if pen > eps_touch:
        return SsrLabel.Cr
    if gap <= eps_touch:
        above = a[1][0] >= b[1][1] - eps_touch and _xz_overlap(a, b, 1e-3)
        below = b[1][0] >= a[1][1] - eps_touch and _xz_overlap(a, b, 1e-3)
        ca = (a[1][0] + a[1][1]) / 2
        cb = (b[1][0] + b[1][1]) / 2
        if above and ca > cb:
            return SsrLabel.To
        if below and cb > ca:
            return SsrLabel.Bo
        return SsrLabel.ArT
    if a[1][0] > b[1][1] and _xz_overlap(a, b, 1e-3):
        return SsrLabel.Ab
    if b[1][0] > a[1][1] and _xz_overlap(a, b, 1e-3):
        return SsrLabel.Be
    if gap <= cfg.theta_near:
        return SsrLabel.Ar
    return SsrLabel.NoRelation


def _ground_body(sc: Script) -> Body:
    return Body(sc.ground_id, sc.ground_label, "ground",
                sc.ground_box[1] - sc.ground_box[0])


def script_relations(sc: Script, cfg: RunConfig) -> list[GroundTruthRelation]:
    out = []
    ids = list(sc.bodies)
    gb = _ground_body(sc)
    for f_idx in range(0, len(sc.track), EVAL_STRIDE):
        positions = sc.track[f_idx]
        entries = [(oid, sc.bodies[oid], sc.bodies[oid].box(positions[oid]))
                   for oid in ids]
        if sc.ground_box is not None:
            entries.append((sc.ground_id, gb, sc.ground_box))
        for i, (ida, ba, boxa) in enumerate(entries):
            for idb, bb, boxb in entries[i + 1:]:
                lab = analytic_box_ssr(boxa, boxb, ba, bb,
                                       cfg.relation, cfg.geometry.eps_touch)
                out.append(GroundTruthRelation(f_idx, ida, idb, lab))
                out.append(GroundTruthRelation(f_idx, idb, ida, ssr_dual(lab)))
    return out


# ---------------------------------------------------------------------------
# Scenario scripts
# ---------------------------------------------------------------------------

def _jitter(rng, amp=0.01):
    return rng.uniform(-amp, amp)


def _hand_over(sc, hand_id, tool_id, clearance=0.15, grip_dx=0.0):
    tool = sc.bodies[tool_id]
    hand = sc.bodies[hand_id]
    top = sc.pos[tool_id][1] + tool.size[1] / 2
    sc.pos[hand_id] = np.array([sc.pos[tool_id][0] + grip_dx,
                                top + clearance + hand.size[1] / 2,
                                sc.pos[tool_id][2]])


def _grip(sc, hand_id, tool_id, hold=12):
    """Descend onto the tool top, confirm contact, settle."""
    tool = sc.bodies[tool_id]
    hand = sc.bodies[hand_id]
    target_y = sc.pos[tool_id][1] + tool.size[1] / 2 + hand.size[1] / 2
    drop = sc.pos[hand_id][1] - target_y
    sc.move({hand_id: (0.0, -drop, 0.0)}, max(2, int(round(drop / V_VERT))))
    sc.hold(hold)


def _lift(sc, ids, height=0.15, frames=6):
    sc.move({i: (0.0, height, 0.0) for i in ids}, frames)


def _carry(sc, ids, dx, dz=0.0, frames=11):
    sc.move({i: (dx, 0.0, dz) for i in ids}, frames)


def _lower_to(sc, ids, primary, target_top, frames=None):
    body = sc.bodies[primary]
    target_y = target_top + body.size[1] / 2
    drop = sc.pos[primary][1] - target_y
    n = frames or max(2, int(round(drop / V_VERT)))
    sc.move({i: (0.0, -drop, 0.0) for i in ids}, n)


def _release(sc, hand_id, rise=0.15, frames=6, settle=6):
    sc.move({hand_id: (0.0, rise, 0.0)}, frames)
    sc.hold(settle)


def _scenario_world(rng, noise, per_edge):
    sc = Script(rng, noise, per_edge)
    sc.add_ground()
    return sc


def _tool_action_script(spec, rng, work):
    """Shared skeleton: pick a tool up, work on a target, put it back.

    ``work`` configures the target body and the work phase; it fills in the
    repetition counts for the expected expansion.
    """
    sc = _scenario_world(rng, spec.noise, spec.points_per_edge)
    tool_size, tool_label = work["tool_size"], work["tool_label"]
    tx = -0.25 + _jitter(rng)
    tz = _jitter(rng)
    sc.add("tool1", tool_label, "object", tool_size,
           (tx, tool_size[1] / 2, tz))
    work["add_target"](sc, rng)
    sc.add("hand_l", "left hand", "hand_left", (0.08, 0.08, 0.08), (0, 0, 0))
    _hand_over(sc, "hand_l", "tool1", grip_dx=work.get("grip_dx", 0.0))
    sc.hold(6)
    _grip(sc, "hand_l", "tool1")                       # T tool
    pair = ["hand_l", "tool1"]
    _lift(sc, pair, height=work.get("lift_height", 0.15))   # U ground (+3)
    target_pos = work["target_pos"](sc)
    dx = target_pos[0] - sc.pos["tool1"][0]
    dz = target_pos[2] - sc.pos["tool1"][2]
    _carry(sc, pair, dx, dz)                           # Mt air x1
    work["engage"](sc, pair)                           # approach + work + disengage
    back_x = tx - sc.pos["tool1"][0]
    back_z = tz - sc.pos["tool1"][2]
    _lift(sc, pair, height=work.get("exit_rise", 0.12),
          frames=work.get("exit_frames", 5))
    _carry(sc, pair, back_x, back_z, frames=9)         # Mt air x1
    _lower_to(sc, pair, "tool1", 0.0)                  # T ground
    sc.hold(6)
    _release(sc, "hand_l")                             # U tool
    return sc


def generate_synthetic_trace(spec: ScenarioSpec,
                             lib: MappingLibrary | None = None,
                             cfg: RunConfig | None = None) -> GeneratedTrace:
    """Build one scenario trace plus its exact ground truth."""
    lib = lib or default_library()
    cfg = cfg or RunConfig()
    rng = np.random.default_rng(spec.seed)
    builder = _BUILDERS.get(spec.name)
    if builder is None:
        raise UnknownScenario(spec.name)
    sc, bindings, repeats, hand = builder(spec, rng)
    trace = sc.build_trace(f"{spec.name.lower()}-{spec.seed}", spec.frames)
    labels = {**{oid: b.label for oid, b in sc.bodies.items()}}
    if sc.ground_id:
        labels[sc.ground_id] = sc.ground_label
    expected = decompose(spec.name, bindings, lib, hand=hand, repeats=repeats)
    relations = script_relations(sc, cfg)
    return GeneratedTrace(trace, relations, expected, spec.name, bindings, hand)


# -- individual scenarios ----------------------------------------------------

def _scn_idle(spec, rng):
    sc = _scenario_world(rng, spec.noise, spec.points_per_edge)
    sc.add("block1", "box", "object", (0.1, 0.1, 0.1),
           (0.3 + _jitter(rng), 0.05, _jitter(rng)))
    sc.add("hand_l", "left hand", "hand_left", (0.08, 0.08, 0.08),
           (-0.4 + _jitter(rng), 0.35, _jitter(rng)))
    sc.hold(20)
    sc.move({"hand_l": (0.05, 0.0, 0.0)}, 20)
    sc.hold(20)
    return sc, {}, 1, "left"


def _scn_approach(spec, rng):
    sc = _scenario_world(rng, spec.noise, spec.points_per_edge)
    size = (0.1, 0.16, 0.1)
    bx = 0.1 + _jitter(rng)
    sc.add("block1", "box", "object", size, (bx, 0.08, _jitter(rng)))
    sc.add("hand_l", "left hand", "hand_left", (0.08, 0.08, 0.08),
           (bx - 0.35, 0.12, sc.pos["block1"][2]))
    sc.hold(6)
    gap = (sc.pos["block1"][0] - size[0] / 2) - (sc.pos["hand_l"][0] + 0.04)
    sc.move({"hand_l": (gap, 0.0, 0.0)}, 10)       # side contact -> T (ArT)
    sc.hold(14)
    return sc, {"?object": "block1", "?place": GROUND}, 1, "left"


def _scn_retreat(spec, rng):
    sc = _scenario_world(rng, spec.noise, spec.points_per_edge)
    size = (0.1, 0.16, 0.1)
    bx = 0.1 + _jitter(rng)
    sc.add("block1", "box", "object", size, (bx, 0.08, _jitter(rng)))
    sc.add("hand_l", "left hand", "hand_left", (0.08, 0.08, 0.08),
           (bx - size[0] / 2 - 0.04, 0.12, sc.pos["block1"][2]))
    sc.hold(4)                                      # contact from frame 0 -> T
    sc.move({"hand_l": (-0.15, 0.0, 0.0)}, 10)      # withdraw -> U (Ar)
    sc.hold(8)
    return sc, {"?object": "block1", "?place": GROUND}, 1, "left"


def _scn_hold(spec, rng):
    sc = _scenario_world(rng, spec.noise, spec.points_per_edge)
    sc.add("block1", "box", "object", (0.1, 0.16, 0.1),
           (0.1 + _jitter(rng), 0.08, _jitter(rng)))
    sc.add("hand_l", "left hand", "hand_left", (0.08, 0.08, 0.08), (0, 0, 0))
    _hand_over(sc, "hand_l", "block1")
    sc.hold(6)
    _grip(sc, "hand_l", "block1", hold=20)
    return sc, {"?object": "block1", "?place": GROUND}, 1, "left"


def _scn_lift(spec, rng):
    sc = _scenario_world(rng, spec.noise, spec.points_per_edge)
    sc.add("block1", "box", "object", (0.1, 0.16, 0.1),
           (0.1 + _jitter(rng), 0.08, _jitter(rng)))
    sc.add("hand_l", "left hand", "hand_left", (0.08, 0.08, 0.08), (0, 0, 0))
    _hand_over(sc, "hand_l", "block1")
    sc.hold(6)
    _grip(sc, "hand_l", "block1")
    _lift(sc, ["hand_l", "block1"], height=0.25, frames=10)
    sc.move({"hand_l": (0.06, 0.0, 0.0), "block1": (0.06, 0.0, 0.0)}, 8)
    return sc, {"?object": "block1", "?place": GROUND}, {2: 1}, "left"


def _scn_place(spec, rng):
    sc = _scenario_world(rng, spec.noise, spec.points_per_edge)
    bx = -0.25 + _jitter(rng)
    sc.add("block1", "box", "object", (0.1, 0.16, 0.1), (bx, 0.08, _jitter(rng)))
    sc.add("hand_l", "left hand", "hand_left", (0.08, 0.08, 0.08), (0, 0, 0))
    _hand_over(sc, "hand_l", "block1")
    sc.hold(6)
    _grip(sc, "hand_l", "block1")
    pair = ["hand_l", "block1"]
    _lift(sc, pair)
    _carry(sc, pair, 0.44, 0.0)
    _lower_to(sc, pair, "block1", 0.0)
    sc.hold(6)
    _release(sc, "hand_l")
    return sc, {"?object": "block1", "?place": GROUND, "?target": GROUND}, {2: 2}, "left"


def _scn_wipe(spec, rng):
    sc = _scenario_world(rng, spec.noise, spec.points_per_edge)
    sx = -0.1 + _jitter(rng)
    sc.add("tool1", "sponge", "object", (0.08, 0.08, 0.08), (sx, 0.04, _jitter(rng)))
    sc.add("hand_l", "left hand", "hand_left", (0.08, 0.08, 0.08), (0, 0, 0))
    _hand_over(sc, "hand_l", "tool1")
    sc.hold(6)
    _grip(sc, "hand_l", "tool1")
    sc.shake(["hand_l", "tool1"], 22, axis=0, amp=0.015)   # Fmt on ground x2
    sc.hold(3)
    _release(sc, "hand_l")
    return sc, {"?tool": "tool1", "?place": GROUND}, {1: 2}, "left"


def _make_block_target(label, size, x=0.19, y_half=True):
    def add(sc, rng):
        x_pos = x + _jitter(rng)
        sc.add("target1", label, "object", size,
               (x_pos, size[1] / 2, _jitter(rng)))
    return add


def _scn_screw(spec, rng):
    work = {
        "tool_size": (0.03, 0.1, 0.03), "tool_label": "screwdriver",
        "add_target": _make_block_target("hard disk", (0.12, 0.1, 0.12)),
        "target_pos": lambda sc: sc.pos["target1"],
    }

    def engage(sc, pair):
        top = sc.pos["target1"][1] + sc.bodies["target1"].size[1] / 2
        _lower_to(sc, pair, "tool1", top, frames=3)    # T target (To)
        sc.shake(pair, 22, axis=0, amp=0.01)           # Fmt x2
        _lift(sc, pair, height=0.1, frames=4)          # U target (Ab)

    work["engage"] = engage
    sc = _tool_action_script(spec, rng, work)
    binds = {"?tool": "tool1", "?object": "target1",
             "?place": GROUND, "?target": GROUND}
    return sc, binds, {2: 1, 4: 2, 6: 2}, "left"


def _scn_hammer(spec, rng):
    work = {
        "tool_size": (0.05, 0.07, 0.05), "tool_label": "hammer",
        "add_target": _make_block_target("nail", (0.04, 0.1, 0.04)),
        "target_pos": lambda sc: sc.pos["target1"],
    }

    def engage(sc, pair):
        top = sc.pos["target1"][1] + sc.bodies["target1"].size[1] / 2
        _lower_to(sc, pair, "tool1", top, frames=3)    # first strike: T
        for strike in range(4):
            sc.hold(3)
            _lift(sc, pair, height=0.12, frames=4)     # U (Ab)
            if strike < 3:
                _lower_to(sc, pair, "tool1", top, frames=4)  # T again
        sc.hold(1)

    work["engage"] = engage
    work["exit_rise"] = 0.06
    work["exit_frames"] = 3
    sc = _tool_action_script(spec, rng, work)
    binds = {"?tool": "tool1", "?object": "target1",
             "?place": GROUND, "?target": GROUND}
    return sc, binds, {2: 1, 11: 2}, "left"


def _scn_saw(spec, rng):
    work = {
        "tool_size": (0.14, 0.05, 0.05), "tool_label": "saw",
        "grip_dx": -0.045,
        "add_target": _make_block_target("board", (0.14, 0.16, 0.12)),
        "target_pos": lambda sc: sc.pos["target1"] + np.array(
            [-(sc.bodies["target1"].size[0] + sc.bodies["tool1"].size[0]) / 2, 0.0, 0.0]),
    }

    def engage(sc, pair):
        # drop to the upper part of the side face, then slide into contact
        stroke_y = sc.pos["target1"][1] + 0.02
        drop = sc.pos["tool1"][1] - stroke_y
        sc.move({i: (0.0, -drop, 0.0) for i in pair}, max(2, int(round(drop / V_VERT))))
        sc.hold(8)                                      # T target (ArT)
        sc.shake(pair, 16, axis=2, amp=0.015)           # Fmt (ArT) x2
        sc.move({i: (-0.12, 0.0, 0.0) for i in pair}, 8)  # U target (Ar)
        sc.hold(2)

    work["engage"] = engage
    sc = _tool_action_script(spec, rng, work)
    binds = {"?tool": "tool1", "?object": "target1",
             "?place": GROUND, "?target": GROUND}
    return sc, binds, {2: 1, 4: 2, 6: 3}, "left"


def _scn_cut(spec, rng):
    work = {
        "tool_size": (0.02, 0.14, 0.06), "tool_label": "knife",
        "add_target": _make_block_target("apple", (0.1, 0.14, 0.1), x=0.215),
        "target_pos": lambda sc: sc.pos["target1"] + np.array([0.025, 0.0, 0.0]),
    }

    def engage(sc, pair):
        top = sc.pos["target1"][1] + sc.bodies["target1"].size[1] / 2
        _lower_to(sc, pair, "tool1", top, frames=3)     # T target (To)
        sc.hold(2)
        sc.move({i: (0.0, -0.05, 0.0) for i in pair}, 2)  # plunge -> U (Pwi)
        sc.shake(pair, 24, axis=2, amp=0.01)              # Mt (Pwi) x2
        _lift(sc, pair, height=0.12, frames=3)

    work["engage"] = engage
    work["exit_rise"] = 0.04
    work["exit_frames"] = 2
    sc = _tool_action_script(spec, rng, work)
    binds = {"?tool": "tool1", "?object": "target1",
             "?place": GROUND, "?target": GROUND}
    return sc, binds, {2: 1, 5: 2, 6: 1}, "left"


def _scn_stir(spec, rng):
    work = {
        "tool_size": (0.03, 0.08, 0.03), "tool_label": "spoon",
        "add_target": lambda sc, rng_: sc.add(
            "target1", "bowl", "object", (0.2, 0.22, 0.2),
            (0.19 + _jitter(rng_), 0.11, _jitter(rng_)),
            open_top=True, solid=False),
        "target_pos": lambda sc: sc.pos["target1"],
        "lift_height": 0.32,
    }

    def engage(sc, pair):
        rim = sc.pos["target1"][1] + sc.bodies["target1"].size[1] / 2
        inner_y = rim - 0.03 - sc.bodies["tool1"].size[1] / 2
        drop = sc.pos["tool1"][1] - inner_y
        sc.move({i: (0.0, -drop, 0.0) for i in pair}, 3)  # sink inside (Wi)
        sc.orbit(pair, 24)                                 # Mt (Wi) x2
        rise = rim + 0.08 - sc.pos["tool1"][1]
        sc.move({i: (0.0, rise, 0.0) for i in pair}, 2)

    work["engage"] = engage
    work["exit_rise"] = 0.06
    work["exit_frames"] = 3
    sc = _tool_action_script(spec, rng, work)
    binds = {"?tool": "tool1", "?object": "target1",
             "?place": GROUND, "?target": GROUND}
    return sc, binds, {2: 1, 3: 2, 4: 2}, "left"


def _scn_pour(spec, rng):
    work = {
        "tool_size": (0.06, 0.1, 0.06), "tool_label": "cup",
        "add_target": lambda sc, rng_: sc.add(
            "target1", "bowl", "object", (0.2, 0.16, 0.2),
            (0.19 + _jitter(rng_), 0.08, _jitter(rng_)),
            open_top=True, solid=False),
        "target_pos": lambda sc: sc.pos["target1"] + np.array([0.0, 0.0, 0.0]),
        "lift_height": 0.3,
    }

    def engage(sc, pair):
        rim = sc.pos["target1"][1] + sc.bodies["target1"].size[1] / 2
        hover_y = rim + 0.08 + sc.bodies["tool1"].size[1] / 2
        dy = hover_y - sc.pos["tool1"][1]
        sc.move({i: (0.0, dy, 0.0) for i in pair}, 2)
        sc.orbit(pair, 14)                                 # Mt (Ab target) x2
        sc.move({i: (0.0, 0.05, 0.0) for i in pair}, 2)

    work["engage"] = engage
    work["exit_rise"] = 0.05
    work["exit_frames"] = 2
    sc = _tool_action_script(spec, rng, work)
    binds = {"?tool": "tool1", "?object": "target1",
             "?place": GROUND, "?target": GROUND}
    return sc, binds, {2: 1, 3: 2, 4: 2}, "left"


def _scn_drink(spec, rng):
    work = {
        "tool_size": (0.08, 0.1, 0.06), "tool_label": "cup",
        "grip_dx": -0.05,
        "add_target": lambda sc, rng_: sc.add(
            "target1", "mouth", "object", (0.06, 0.06, 0.06),
            (0.3 + _jitter(rng_), 0.42, _jitter(rng_))),
        "target_pos": lambda sc: sc.pos["target1"] + np.array(
            [-(sc.bodies["target1"].size[0] + sc.bodies["tool1"].size[0]) / 2 - 0.12,
             0.0, 0.0]),
    }

    def engage(sc, pair):
        # rise to mouth height well to the side, then slide into side contact
        dy = sc.pos["target1"][1] - sc.pos["tool1"][1]
        sc.move({i: (0.0, dy, 0.0) for i in pair}, 8)
        gap = (sc.pos["target1"][0]
               - (sc.bodies["target1"].size[0] + sc.bodies["tool1"].size[0]) / 2
               - sc.pos["tool1"][0])
        sc.move({i: (gap, 0.0, 0.0) for i in pair}, 4)   # T mouth (ArT, Air)
        sc.hold(4)
        sc.move({i: (-0.15, 0.0, 0.0) for i in pair}, 10)  # U mouth (Ar, Air)
        dy_down = sc.pos["tool1"][1] - 0.25
        sc.move({i: (0.0, -dy_down, 0.0) for i in pair}, 6)

    work["engage"] = engage
    work["exit_rise"] = 0.0
    work["exit_frames"] = 2
    sc = _tool_action_script(spec, rng, work)
    binds = {"?tool": "tool1", "?object": "target1", "?place": GROUND}
    return sc, binds, {2: 2, 5: 3}, "left"


_BUILDERS = {
    "Idle": _scn_idle,
    "Approach": _scn_approach,
    "Retreat": _scn_retreat,
    "Hold": _scn_hold,
    "Lift": _scn_lift,
    "Place": _scn_place,
    "Wipe": _scn_wipe,
    "Screw": _scn_screw,
    "Hammer": _scn_hammer,
    "Saw": _scn_saw,
    "Cut": _scn_cut,
    "Stir": _scn_stir,
    "Pour": _scn_pour,
    "Drink": _scn_drink,
}


# ---------------------------------------------------------------------------
# Static relation scenes for the model-comparison corpus
# ---------------------------------------------------------------------------

SCENE_KINDS = ("Ab", "To", "Ar", "ArT", "In", "Wi", "Pwi", "Cr", "NoRelation")
SCENE_FRAMES = 11   # static; evaluated every ten frames


def make_relation_scene(kind: str, rng: np.random.Generator,
                        per_edge: int = 4, noise: float = 0.0):
    """One static two-object scene realizing ``kind`` for the ordered pair
    (a, b); the reverse pair carries the dual label.  Returns
    (SceneTrace, [GroundTruthRelation])."""
    if kind not in SCENE_KINDS:
        raise UnknownScenario(kind)
    sc = Script(rng, noise, per_edge)

    def rsize(lo=0.1, hi=0.3):
        return rng.uniform(lo, hi, 3)

    if kind == "Ab":
        sb = rsize()
        sa = sb * rng.uniform(0.4, 0.9)
        gap = rng.uniform(0.05, 0.25)
        sc.add("obj_a", "box a", "object", sa, (0, sb[1] + gap + sa[1] / 2, 0))
        sc.add("obj_b", "box b", "object", sb, (0, sb[1] / 2, 0))
        label = SsrLabel.Ab
    elif kind == "To":
        sb = rsize()
        sa = sb * rng.uniform(0.4, 0.9)
        sc.add("obj_a", "box a", "object", sa, (0, sb[1] + sa[1] / 2, 0))
        sc.add("obj_b", "box b", "object", sb, (0, sb[1] / 2, 0))
        label = SsrLabel.To
    elif kind == "Ar":
        sa, sb = rsize(), rsize()
        gap = rng.uniform(0.02, 0.12)
        sc.add("obj_a", "box a", "object", sa, (-(sa[0] / 2 + gap / 2), sa[1] / 2, 0))
        sc.add("obj_b", "box b", "object", sb, (sb[0] / 2 + gap / 2, sb[1] / 2, 0))
        label = SsrLabel.Ar
    elif kind == "ArT":
        sa, sb = rsize(), rsize()
        sc.add("obj_a", "box a", "object", sa, (-sa[0] / 2, sa[1] / 2, 0))
        sc.add("obj_b", "box b", "object", sb, (sb[0] / 2, sb[1] / 2, 0))
        label = SsrLabel.ArT
    elif kind in ("In", "Wi"):
        sb = rng.uniform(0.24, 0.4, 3)
        sa = sb * rng.uniform(0.25, 0.4)
        if kind == "In":
            wall = rng.uniform(0.0008, 0.004)
        else:
            wall = rng.uniform(0.03, 0.06)
        off_x = sb[0] / 2 - sa[0] / 2 - wall
        sc.add("obj_a", "box a", "object", sa,
               (off_x, sb[1] / 2 + rng.uniform(-0.02, 0.02), 0))
        sc.add("obj_b", "box b", "object", sb, (0, sb[1] / 2, 0), solid=False)
        label = SsrLabel.In if kind == "In" else SsrLabel.Wi
    elif kind == "Pwi":
        sb = rng.uniform(0.24, 0.4, 3)
        sa = np.array([sb[0] * 0.22, sb[1] * 1.6, sb[2] * 0.22])
        sc.add("obj_a", "rod", "object", sa, (0, sb[1] * 0.4 + sa[1] / 2, 0))
        sc.add("obj_b", "open box", "object", sb, (0, sb[1] / 2, 0),
               open_top=True, solid=False)
        label = SsrLabel.Pwi
    elif kind == "Cr":
        sa, sb = rsize(0.14, 0.3), rsize(0.14, 0.3)
        overlap = rng.uniform(0.45, 0.75) * min(sa[0], sb[0])
        sc.add("obj_a", "box a", "object", sa,
               (-(sa[0] / 2) + overlap / 2, max(sa[1], sb[1]) / 2, 0))
        sc.add("obj_b", "box b", "object", sb,
               (sb[0] / 2 - overlap / 2, max(sa[1], sb[1]) / 2, 0))
        label = SsrLabel.Cr
    else:
        sa, sb = rsize(), rsize()
        gap = rng.uniform(0.3, 0.8)
        sc.add("obj_a", "box a", "object", sa, (-(sa[0] / 2 + gap / 2), sa[1] / 2, 0))
        sc.add("obj_b", "box b", "object", sb, (sb[0] / 2 + gap / 2, sb[1] / 2, 0))
        label = SsrLabel.NoRelation

    sc.hold(SCENE_FRAMES)
    trace = sc.build_trace(f"scene-{kind.lower()}")
    gts = []
    for f_idx in range(0, SCENE_FRAMES, EVAL_STRIDE):
        gts.append(GroundTruthRelation(f_idx, "obj_a", "obj_b", label))
        gts.append(GroundTruthRelation(f_idx, "obj_b", "obj_a", ssr_dual(label)))
    return trace, gts


def make_corpus(count: int = 500, seed: int = 0):
    """Mixed static-scene corpus cycling all relation kinds."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        kind = SCENE_KINDS[k % len(SCENE_KINDS)]
        out.append(make_relation_scene(kind, rng))
    return out
