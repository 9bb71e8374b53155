"""Vectorised panel Gauss-Legendre quadrature with adaptive bisection.

The integrand is always called on a 1-d array of nodes, so a whole sweep of
panels costs one numpy call.  Error estimates compare each panel against its
two halves; panels that fail are split again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class QuadratureError(RuntimeError):
    """Adaptive refinement ran out of budget; carries the achieved estimate."""

    def __init__(self, message: str, value: complex, error: float):
        super().__init__(f"{message} (value={value!r}, error estimate={error:.3e})")
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    panels: int


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(edges: np.ndarray, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite rule over consecutive panels."""
    x, w = gauss_legendre(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + b) * 0.5 + half * x
    weights = half * w
    return nodes.ravel(), weights.ravel()


def _panel_sums(f, a: np.ndarray, b: np.ndarray, order: int, with_abs: bool = False):
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    nodes = (a + b)[:, None] * 0.5 + half[:, None] * x
    vals = np.asarray(f(nodes.ravel())).reshape(nodes.shape)
    sums = (vals * w).sum(axis=1) * half
    if with_abs:
        return sums, (np.abs(vals) * w).sum(axis=1) * half
    return sums


def integrate(f, edges, *, order: int = 16, atol: float = 0.0, rtol: float = 1e-12,
              noise: float = 1e-12, max_panels: int = 200_000, strict: bool = True) -> QuadResult:
    """Adaptive composite Gauss-Legendre over the given initial panel edges.

    A panel is accepted once |whole - (left + right)| is below its share of
    the tolerance, or below noise * integral of |f| over the panel (the
    rounding floor of a fast phase); the refined pair is kept as its value.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    total = 0.0 + 0.0j
    err_total = 0.0
    coarse = _panel_sums(f, a, b, order)
    span = float(edges[-1] - edges[0]) or 1.0
    scale = None
    count = len(a)
    while len(a):
        mid = 0.5 * (a + b)
        left, la = _panel_sums(f, a, mid, order, True)
        right, ra = _panel_sums(f, mid, b, order, True)
        fine = left + right
        err = np.abs(fine - coarse)
        if scale is None:
            scale = float(np.abs(fine.sum()))
        tol = max(atol, rtol * max(scale, float(np.abs(total + fine.sum())))) * (b - a) / span
        ok = err <= np.maximum(tol, noise * (la + ra))
        total += fine[ok].sum()
        err_total += float(err[ok].sum())
        a = np.concatenate([a[~ok], mid[~ok]])
        b = np.concatenate([mid[~ok], b[~ok]])
        coarse = np.concatenate([left[~ok], right[~ok]])
        count += 2 * int((~ok).sum())
        if count > max_panels and len(a):
            rest = coarse.sum()
            err_total += float(np.abs(rest))
            if strict:
                raise QuadratureError("panel budget exhausted", complex(total + rest), err_total)
            total += rest
            break
    return QuadResult(complex(total), err_total, count)


def phase_breakpoints(phase, a: float, b: float, step: float = math.pi / 4,
                      samples: int = 4097, min_panels: int = 4) -> np.ndarray:
    """Panel edges so the phase moves by about `step` radians per panel."""
    t = np.linspace(a, b, samples)
    ph = np.asarray(phase(t), dtype=float)
    travel = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(ph)))])
    n = max(min_panels, int(math.ceil(travel[-1] / step)))
    targets = np.linspace(0.0, travel[-1], n + 1)
    if travel[-1] == 0.0:
        return np.linspace(a, b, n + 1)
    edges = np.interp(targets, travel, t)
    edges[0], edges[-1] = a, b
    return np.unique(edges)


def fixed(f, edges, order: int = 16) -> complex:
    """Non-adaptive composite rule (used where the panels are known to resolve f)."""
    nodes, weights = panel_rule(edges, order)
    return complex(np.dot(np.asarray(f(nodes)), weights))
