"""Inverse-system calculus over finite sets.

Finite shape categories and posets, lazy graded index posets of infinite
height, tower diagrams with strictly increasing reindexing, Reedy-style
functorial factorizations into levelwise and special parts, and deterministic
lifting solvers, all over an explicit base category of finite sets.
"""

from __future__ import annotations

__version__ = "0.1.0"
