"""Manipulation-scene semantics: convex-hull spatial relations, atomic
actions, action-grammar recognition, and multi-granularity descriptions."""

__version__ = "0.1.0"
