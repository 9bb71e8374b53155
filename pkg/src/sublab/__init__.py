"""Numerical laboratory for delta-method, Voronoi and character-sum machinery on exactly computable coefficients."""

__version__ = "0.1.0"
