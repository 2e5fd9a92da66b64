"""Exact and rigorously enclosed recurrence quantities for lattice walks and weighted walk models."""

__version__ = "0.1.0"
