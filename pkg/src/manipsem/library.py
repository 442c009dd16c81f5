"""Library of action mappings: named patterns over atomic-action strings.

Each entry maps a complex action name (cut, stir, screw, ...) to a sequence
of quintuple templates.  Template fields may be variables (``?tool``,
``?object``, ``?place``, any ``?name``), the reserved spellings ``Ground``
/ ``Air`` / ``none``, or literal tokens.  A ``+`` suffix on a moving
primitive marks a step that absorbs a maximal run of identical actions.
Subjects are ``H`` (the acting hand) or ``Me(?var)`` (hand merged with the
carried object bound to ``?var``).

File format (UTF-8, ``#`` comments)::

    action Screw
    hands one
    H       T   ?tool   To  ?place   | pickup
    Me(?tool) U ?place  Ab  ?place   | pickup
    Me(?tool) Mt+ none  Ab  Air      | pickup
    ...
    end

Two-handed entries carry ``hands both`` with ``left:`` / ``right:``
section markers; their sub-patterns share one binding namespace.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field

from .actions import AIR, GROUND, NO_OBJECT, AtomicAction, Primitive, Subject, action_tokens
from .grammar import NoParse, PRIMITIVE_TERMINALS, RESERVED, parse
from .relations import SsrLabel

STANDARD_ACTIONS = ("Idle", "Approach", "Retreat", "Lift", "Place", "Hold",
                    "Stir", "Pour", "Cut", "Drink", "Wipe", "Hammer", "Saw", "Screw")


class LibraryError(Exception):
    pass


class PatternParseError(LibraryError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class NonCfgPattern(LibraryError):
    """Entry's expanded pattern is not derivable under the action grammar."""


class DuplicateName(LibraryError):
    pass


class UnknownAction(LibraryError):
    pass


class UnboundVariable(LibraryError):
    pass


@dataclass(frozen=True)
class StepTemplate:
    subject: str              # "H" or "Me"
    carried: str | None       # variable/token carried by a merged subject
    primitive: Primitive
    repeat: bool
    object_slot: str          # variable, Ground, none, or literal id
    relation: SsrLabel
    place_slot: str           # variable, Ground, Air, or literal id
    phase: str = "step"

    def fields(self):
        return (self.object_slot, self.place_slot)


@dataclass(frozen=True)
class LibraryEntry:
    name: str
    hands: str                               # "one" | "both"
    steps: tuple[StepTemplate, ...]          # one-hand pattern
    steps_by_hand: dict = field(default_factory=dict, hash=False, compare=False)

    @property
    def variables(self) -> tuple[str, ...]:
        seen: list[str] = []
        for step in self.all_steps():
            for v in (step.carried, step.object_slot, step.place_slot):
                if v and v.startswith("?") and v not in seen:
                    seen.append(v)
        return tuple(seen)

    def all_steps(self):
        if self.hands == "both":
            for steps in self.steps_by_hand.values():
                yield from steps
        else:
            yield from self.steps

    def phases(self) -> tuple[str, ...]:
        out: list[str] = []
        for step in self.steps:
            if not out or out[-1] != step.phase:
                out.append(step.phase)
        return tuple(out)


@dataclass(frozen=True)
class RecognizedAction:
    name: str
    bindings: dict
    span: tuple[int, int]       # [start, end] indices into the action list
    hand: str
    step_spans: tuple = ()      # per pattern step: [start, end] action indices
    step_phases: tuple = ()     # per pattern step: its phase name

    def __post_init__(self):
        object.__setattr__(self, "bindings", dict(self.bindings))


@dataclass(frozen=True)
class MappingLibrary:
    entries: tuple[LibraryEntry, ...]

    def __getitem__(self, name: str) -> LibraryEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise UnknownAction(name)

    def __contains__(self, name: str) -> bool:
        return any(e.name == name for e in self.entries)

    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries)


_RELATION_TOKENS = {l.value: l for l in SsrLabel if l is not SsrLabel.NoRelation}


def _parse_step(lineno: int, text: str) -> StepTemplate:
    body, _, phase = text.partition("|")
    phase = phase.strip() or "step"
    parts = body.split()
    if len(parts) != 5:
        raise PatternParseError(lineno, f"expected 5 template fields, got {len(parts)}")
    subj, prim, obj, rel, place = parts
    carried = None
    if subj == "H":
        subject = "H"
    elif subj.startswith("Me(") and subj.endswith(")"):
        subject = "Me"
        carried = subj[3:-1]
        if not carried:
            raise PatternParseError(lineno, "merged subject needs a carried slot")
    else:
        raise PatternParseError(lineno, f"bad subject {subj!r}")
    repeat = prim.endswith("+")
    prim_token = prim[:-1] if repeat else prim
    if prim_token not in PRIMITIVE_TERMINALS:
        raise PatternParseError(lineno, f"unknown primitive token {prim_token!r}")
    primitive = Primitive(prim_token)
    if repeat and primitive not in (Primitive.Mt, Primitive.Fmt):
        raise PatternParseError(lineno, "repetition marker only applies to Mt/Fmt steps")
    if rel not in _RELATION_TOKENS:
        raise PatternParseError(lineno, f"unknown relation token {rel!r}")
    for slot, kind in ((obj, "object"), (place, "place")):
        if slot.startswith("?"):
            continue
        if slot in RESERVED and slot != AIR:
            raise PatternParseError(lineno, f"reserved token {slot!r} in {kind} slot")
    if place == NO_OBJECT:
        raise PatternParseError(lineno, "place slot cannot be 'none'")
    return StepTemplate(subject, carried, primitive, repeat, obj,
                        _RELATION_TOKENS[rel], place, phase)


def parse_library_text(text: str, validate: bool = True) -> MappingLibrary:
    entries: list[LibraryEntry] = []
    name = None
    hands = "one"
    steps: list[StepTemplate] = []
    by_hand: dict[str, list[StepTemplate]] = {}
    current_hand = None
    start_line = 0

    def flush(lineno):
        nonlocal name, hands, steps, by_hand, current_hand
        if name is None:
            return
        if any(e.name == name for e in entries):
            raise DuplicateName(name)
        if hands == "both":
            entry = LibraryEntry(name, hands, tuple(by_hand.get("left", ())),
                                 {h: tuple(s) for h, s in by_hand.items()})
        else:
            entry = LibraryEntry(name, hands, tuple(steps))
        entries.append(entry)
        name, hands, steps, by_hand, current_hand = None, "one", [], {}, None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("action "):
            if name is not None:
                raise PatternParseError(lineno, f"entry {name!r} missing 'end'")
            name = line[len("action "):].strip()
            start_line = lineno
            if not name:
                raise PatternParseError(lineno, "missing action name")
            continue
        if name is None:
            raise PatternParseError(lineno, "step outside an action block")
        if line == "end":
            flush(lineno)
            continue
        if line.startswith("hands "):
            hands = line[len("hands "):].strip()
            if hands not in ("one", "both"):
                raise PatternParseError(lineno, f"hands must be one|both, got {hands!r}")
            continue
        if line in ("left:", "right:"):
            current_hand = line[:-1]
            by_hand.setdefault(current_hand, [])
            continue
        step = _parse_step(lineno, line)
        if hands == "both":
            if current_hand is None:
                raise PatternParseError(lineno, "two-handed entry needs left:/right: sections")
            by_hand[current_hand].append(step)
        else:
            steps.append(step)
    if name is not None:
        raise PatternParseError(start_line, f"entry {name!r} missing 'end'")

    lib = MappingLibrary(tuple(entries))
    if validate:
        for entry in lib.entries:
            _validate_entry(entry)
    return lib


def _placeholder_bindings(entry: LibraryEntry) -> dict:
    binds = {}
    for k, var in enumerate(entry.variables):
        binds[var] = GROUND if var == "?place" else f"obj{k + 1}"
    return binds


def _validate_entry(entry: LibraryEntry):
    if not tuple(entry.all_steps()):
        return  # an empty pattern denotes inactivity; nothing to derive
    try:
        if entry.hands == "both":
            binds = _placeholder_bindings(entry)
            for hand, steps in entry.steps_by_hand.items():
                actions = _instantiate(entry.name, steps, binds, hand, repeats=1)
                parse(action_tokens(actions))
        else:
            actions = decompose_entry(entry, _placeholder_bindings(entry), repeats=1)
            parse(action_tokens(actions))
    except NoParse as exc:
        raise NonCfgPattern(f"{entry.name}: {exc}") from exc
    except (UnboundVariable, ValueError) as exc:
        raise NonCfgPattern(f"{entry.name}: {exc}") from exc


def load_mapping_library(source, validate: bool = True) -> MappingLibrary:
    """Load a library from a path, text, or binary stream."""
    if hasattr(source, "read"):
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    return parse_library_text(text, validate=validate)


def default_library() -> MappingLibrary:
    text = importlib.resources.files("manipsem").joinpath("data/action_library.txt").read_text("utf-8")
    return parse_library_text(text)


def _resolve(slot: str, bindings: dict, name: str) -> str:
    if slot.startswith("?"):
        if slot not in bindings:
            raise UnboundVariable(f"{name}: {slot} not bound")
        return bindings[slot]
    return slot


def _instantiate(name, steps, bindings, hand, repeats) -> list[AtomicAction]:
    out: list[AtomicAction] = []
    frame = 0
    for k, step in enumerate(steps):
        count = 1
        if step.repeat:
            count = repeats if isinstance(repeats, int) else repeats.get(k, 1)
            if count < 1:
                raise ValueError("repetition count must be >= 1")
        obj = _resolve(step.object_slot, bindings, name)
        place = _resolve(step.place_slot, bindings, name)
        carried = _resolve(step.carried, bindings, name) if step.subject == "Me" else None
        subject = Subject(hand, carried)
        for _ in range(count):
            out.append(AtomicAction(subject, step.primitive,
                                    None if obj == NO_OBJECT else obj,
                                    step.relation, place, (frame, frame)))
            frame += 1
    return out


def decompose_entry(entry: LibraryEntry, bindings: dict, hand: str = "left",
                    repeats=1) -> list[AtomicAction]:
    if entry.hands == "both":
        raise LibraryError(f"{entry.name}: two-handed entries decompose per hand")
    return _instantiate(entry.name, entry.steps, bindings, hand, repeats)


def decompose(name: str, bindings: dict, lib: MappingLibrary, hand: str = "left",
              repeats=1) -> list[AtomicAction]:
    """Expand a named action into its atomic-action string."""
    entry = lib[name]
    return decompose_entry(entry, bindings, hand, repeats)


def _unify_slot(slot: str, value: str, bindings: dict) -> bool:
    if slot.startswith("?"):
        if slot in bindings:
            return bindings[slot] == value
        bindings[slot] = value
        return True
    return slot == value


def _match_step(step: StepTemplate, aa: AtomicAction, bindings: dict) -> bool:
    if aa.primitive is not step.primitive or aa.relation is not step.relation:
        return False
    if step.subject == "H":
        if aa.subject.is_merged:
            return False
    else:
        if not aa.subject.is_merged:
            return False
        if not _unify_slot(step.carried, aa.subject.carried, bindings):
            return False
    return (_unify_slot(step.object_slot, aa.object_token(), bindings)
            and _unify_slot(step.place_slot, aa.place, bindings))


def _match_entry(entry: LibraryEntry, actions, start: int):
    """Try to match entry's one-hand pattern at ``start``.

    Returns (end, bindings, step_spans) on success, None otherwise; a
    repeat step absorbs its maximal run of unifiable actions.
    """
    bindings: dict = {}
    pos = start
    spans = []
    for step in entry.steps:
        if pos >= len(actions) or not _match_step(step, actions[pos], bindings):
            return None
        begin = pos
        pos += 1
        if step.repeat:
            while pos < len(actions) and _match_step(step, actions[pos], dict(bindings)):
                _match_step(step, actions[pos], bindings)
                pos += 1
        spans.append((begin, pos - 1))
    return pos, bindings, tuple(spans)


def recognize(actions, lib: MappingLibrary, hand: str | None = None) -> list[RecognizedAction]:
    """Greedy longest-match recognition of one hand's action stream.

    Unmatched spans come back as ``Unknown`` segments.  An empty stream
    maps to the library's empty pattern (inactivity) when one exists.
    """
    actions = list(actions)
    if hand is None:
        hand = actions[0].subject.side if actions else "left"
    single = [e for e in lib.entries if e.hands == "one"]
    if not actions:
        for e in single:
            if not e.steps:
                return [RecognizedAction(e.name, {}, (0, -1), hand)]
        return []

    out: list[RecognizedAction] = []
    pos = 0
    unknown_start = None
    while pos < len(actions):
        best = None
        for entry in single:
            if not entry.steps:
                continue
            got = _match_entry(entry, actions, pos)
            if got is not None and (best is None or got[0] > best[0]):
                best = (got[0], entry, got[1], got[2])
        if best is None:
            if unknown_start is None:
                unknown_start = pos
            pos += 1
            continue
        if unknown_start is not None:
            out.append(RecognizedAction("Unknown", {}, (unknown_start, pos - 1), hand))
            unknown_start = None
        end, entry, bindings, spans = best
        out.append(RecognizedAction(entry.name, bindings, (pos, end - 1), hand,
                                    spans, tuple(s.phase for s in entry.steps)))
        pos = end
    if unknown_start is not None:
        out.append(RecognizedAction("Unknown", {}, (unknown_start, len(actions) - 1), hand))
    return out


def recognize_bimanual(actions_by_hand: dict, lib: MappingLibrary) -> list[RecognizedAction]:
    """Match two-handed entries: both sub-patterns must fire with unifiable
    bindings and overlapping spans; returns one joined recognition per hit."""
    out = []
    for entry in lib.entries:
        if entry.hands != "both":
            continue
        hits = {}
        for hand, steps in entry.steps_by_hand.items():
            probe = LibraryEntry(entry.name, "one", tuple(steps))
            stream = list(actions_by_hand.get(hand, ()))
            for start in range(len(stream)):
                got = _match_entry(probe, stream, start)
                if got is not None:
                    hits[hand] = (start, got[0] - 1, got[1])
                    break
        if len(hits) == len(entry.steps_by_hand):
            merged: dict = {}
            ok = True
            for _, (_, _, binds) in hits.items():
                for k, v in binds.items():
                    if merged.setdefault(k, v) != v:
                        ok = False
            spans = [(s, e) for s, e, _ in hits.values()]
            if ok:
                lo = min(s for s, _ in spans)
                hi = max(e for _, e in spans)
                out.append(RecognizedAction(entry.name, merged, (lo, hi), "both"))
    return out


# ---------------------------------------------------------------------------
# Valid atomic-action space
# ---------------------------------------------------------------------------
# The quintuple axes are finite once object ids collapse to roles; most
# combinations are physically meaningless.  The constraint rows below trim
# the raw product; the count is reported, not asserted against any fixed
# figure.

ROLE_OBJECTS = ("O1", "O2", "O3")

CONSTRAINTS = (
    ("contact primitives need a partner",
     lambda s, p, o, r, pl: not (p in ("T", "U") and o == NO_OBJECT)),
    ("rubbing needs a partner",
     lambda s, p, o, r, pl: not (p == "Fmt" and o == NO_OBJECT)),
    ("only co-motion may lack a partner",
     lambda s, p, o, r, pl: p == "Mt" or o != NO_OBJECT),
    ("no-object moves happen off support",
     lambda s, p, o, r, pl: not (o == NO_OBJECT and pl != AIR)),
    ("no-object moves reference the support plane from above",
     lambda s, p, o, r, pl: not (o == NO_OBJECT and r != "Ab")),
    ("new contact implies a contact relation",
     lambda s, p, o, r, pl: not (p == "T" and r in ("Ab", "Be", "Ar"))),
    ("co-motion of a bare hand is a grasp in disguise",
     lambda s, p, o, r, pl: not (p == "Mt" and s == "H")),
    ("ground interactions are vertical or containment-free",
     lambda s, p, o, r, pl: not (o == GROUND and r in ("Wi", "Pwi", "Cr", "Co", "Pco"))),
    ("contained objects cannot also be the place",
     lambda s, p, o, r, pl: o == NO_OBJECT or o != pl),
    ("a bare hand does not rub its partner's container",
     lambda s, p, o, r, pl: not (s == "H" and p == "Fmt" and o == GROUND)),
)


def atomic_action_space() -> list[tuple]:
    """Enumerate quintuples that satisfy every constraint row."""
    subjects = ("H", "Me")
    prims = ("T", "U", "Mt", "Fmt")
    objects = ROLE_OBJECTS + (GROUND, NO_OBJECT)
    relations = tuple(v for v in _RELATION_TOKENS if v not in ("In", "Su"))
    places = ROLE_OBJECTS + (GROUND, AIR)
    out = []
    for s in subjects:
        for p in prims:
            for o in objects:
                for r in relations:
                    for pl in places:
                        if all(rule(s, p, o, r, pl) for _, rule in CONSTRAINTS):
                            out.append((s, p, o, r, pl))
    return out


def atomic_action_count() -> int:
    return len(atomic_action_space())
