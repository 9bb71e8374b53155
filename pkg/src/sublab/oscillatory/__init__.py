"""Weights, special functions, GL(3)/GL(2) integral transforms and oscillatory integrals."""

from .weights import SmoothWeight, smooth_weight

__all__ = ["SmoothWeight", "smooth_weight"]
