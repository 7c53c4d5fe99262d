"""Computations for the automorphisms phi_k of free groups and their inverses."""

from __future__ import annotations

__version__ = "0.1.0"
