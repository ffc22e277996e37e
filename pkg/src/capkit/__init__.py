"""Capacity of nonnegative polynomials and the inequalities built on it."""

__version__ = "0.1.0"
