"""Integral points on elliptic curves: heights, lattice numerics, sieves, counting."""

__version__ = "0.1.0"
