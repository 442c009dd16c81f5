"""Configuration records for tolerances, relation thresholds, and event extraction.

All numeric tolerances used anywhere in the pipeline live here, so a single
record can be loaded from a config file, overridden by CLI flags, and passed
down unchanged.  Units are meters and frames; the vertical axis is y.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace


@dataclass(frozen=True)
class GeometryConfig:
    """Tolerances for hull construction, point classification, and touch."""

    eps_geom: float = 1e-9    # plane-side slack for hull invariants
    eps_bnd: float = 1e-7     # boundary band for point classification
    eps_touch: float = 5e-3   # surface proximity / allowed shallow overlap for touch

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be >= 0")


@dataclass(frozen=True)
class RelationConfig:
    """Thresholds for static and dynamic spatial relation classification."""

    theta_near: float = 0.15    # max gap (m) for the Around relation
    delta_move: float = 2e-3    # min mean displacement (m/frame) to count as moving
    delta_rel: float = 1e-3     # relative-distance drift threshold (m/frame)
    window: int = 10            # evaluation window (frames)
    distinguish_in_su: bool = True  # upgrade snug containment to In/Su

    def __post_init__(self):
        if self.theta_near <= 0 or self.delta_move <= 0 or self.delta_rel <= 0:
            raise ValueError("relation thresholds must be strictly positive")
        if self.window < 2:
            raise ValueError("window must be >= 2")


@dataclass(frozen=True)
class EventConfig:
    """Debouncing and grasp-inference parameters for event extraction."""

    debounce: int = 3           # consecutive frames before a touch edge flips state
    grasp_min_frames: int = 10  # minimum contact age before a grasp can be inferred

    def __post_init__(self):
        if self.debounce < 1 or self.grasp_min_frames < 1:
            raise ValueError("event parameters must be >= 1")


@dataclass(frozen=True)
class RunConfig:
    """Bundle of all knobs plus CLI-level resource paths."""

    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    relation: RelationConfig = field(default_factory=RelationConfig)
    event: EventConfig = field(default_factory=EventConfig)
    library_path: str | None = None
    template_path: str | None = None

    def with_overrides(self, **kv) -> "RunConfig":
        """Apply flat key overrides such as eps_touch=0.01 or window=6."""
        geo, rel, ev = self.geometry, self.relation, self.event
        top = {}
        for key, value in kv.items():
            if value is None:
                continue
            if key in _GEO_KEYS:
                geo = replace(geo, **{key: float(value)})
            elif key in _REL_KEYS:
                if key == "window":
                    cast = int
                elif key == "distinguish_in_su":
                    def cast(v):
                        return str(v).strip().lower() in ("1", "true", "yes", "on")
                else:
                    cast = float
                rel = replace(rel, **{key: cast(value)})
            elif key in _EVT_KEYS:
                ev = replace(ev, **{key: int(value)})
            elif key in ("library_path", "template_path"):
                top[key] = str(value)
            else:
                raise KeyError(f"unknown config key: {key}")
        return replace(self, geometry=geo, relation=rel, event=ev, **top)


_GEO_KEYS = {f.name for f in fields(GeometryConfig)}
_REL_KEYS = {f.name for f in fields(RelationConfig)}
_EVT_KEYS = {f.name for f in fields(EventConfig)}

CONFIG_ENV_VAR = "MANIPSEM_CONFIG"


def parse_config_text(text: str) -> dict:
    """Parse the ``key = value`` config format. '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def load_run_config(path: str | None = None) -> RunConfig:
    """Build a RunConfig from a config file, the env fallback, or defaults."""
    cfg = RunConfig()
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = cfg.with_overrides(**parse_config_text(fh.read()))
    return cfg
