"""Dedekind sums, signature defects, and constraints on numerically
trivial automorphism groups of surfaces of general type."""

__version__ = "1.0"
