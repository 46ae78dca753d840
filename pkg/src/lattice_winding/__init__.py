"""Winding numbers of lattice random-walk loops and their Brownian comparisons."""

__version__ = "0.1.0"
