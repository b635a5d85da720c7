"""Exact finite-scale laboratory for strongly generic sets and Ellis groups."""

__version__ = "0.1.0"
