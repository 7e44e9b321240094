"""Exact invariants of n-ary forms and natural invariants of differential operators."""

__version__ = "0.1.0"
