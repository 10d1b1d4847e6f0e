"""Explicit resource caps.

All caps are configuration, not policy buried in loops: exceeding one raises
ResourceLimitError with the cap name.  Defaults are sized for desk-scale
algebras (base universes up to 6 elements).
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Limits:
    max_universe: int = 6           # largest base algebra accepted by loaders
    max_product_cells: int = 2_000_000   # table cells when materializing a product
    max_pol1: int = 1_000_000       # unary polynomial maps
    max_lattice: int = 10_000       # congruences in a lattice
    max_terms: int = 100_000        # distinct term tables per search
    max_closure_steps: int = 200_000_000  # operation evaluations per closure call


DEFAULT_LIMITS = Limits()
