"""Compactly supported C-infinity weights built from exp(-1/t).

V lives on [1, 2], U is a plateau (0 below 1/2, 1 on [1, 2], 0 from 5/2),
and W generates a dyadic partition: sum_j W(x / 2^(j/2)) = 1 for x > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("V", "U", "W")


def _psi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def bump(t):
    """exp(-1/(1-t^2)) on (-1, 1), zero elsewhere."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def smooth_step(t):
    """0 for t <= 0, 1 for t >= 1, smooth in between."""
    a = _psi(t)
    b = _psi(1.0 - np.asarray(t, dtype=float))
    return a / (a + b)


def weight_V(x):
    return bump(2.0 * np.asarray(x, dtype=float) - 3.0)


def weight_U(y):
    y = np.asarray(y, dtype=float)
    return smooth_step(2.0 * y - 1.0) * smooth_step(5.0 - 2.0 * y)


def weight_W(x):
    x = np.asarray(x, dtype=float)
    s = np.full_like(x, -1.0)
    pos = x > 0
    s[pos] = 2.0 * np.log2(x[pos])
    # on the upper half use 1 - S(t) = S(1 - t) to avoid cancellation near x = 2
    upper = s >= 1.0
    return np.where(upper, smooth_step(2.0 - s) - smooth_step(1.0 - s), smooth_step(s) - smooth_step(s - 1.0))


_EVAL = {"V": weight_V, "U": weight_U, "W": weight_W}
SUPPORT = {"V": (1.0, 2.0), "U": (0.5, 2.5), "W": (1.0, 2.0)}


def smooth_weight(kind: str, x):
    try:
        fn = _EVAL[kind]
    except KeyError:
        raise ValueError(f"unknown weight kind {kind!r}; expected one of {KINDS}") from None
    out = fn(x)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SmoothWeight:
    """A weight kind rescaled to [scale*lo, scale*hi] and multiplied by amplitude."""

    kind: str = "V"
    scale: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = SUPPORT[self.kind]
        return lo * self.scale, hi * self.scale

    def __call__(self, x):
        return self.amplitude * _EVAL[self.kind](np.asarray(x, dtype=float) / self.scale)

    def mass(self, points: int = 4000) -> float:
        from .quadrature import fixed

        lo, hi = self.support
        return fixed(self, np.linspace(lo, hi, points // 16 + 1)).real


def derivative_constants(kind: str, jmax: int = 4, points: int = 20001) -> list[float]:
    """max |x^j f^(j)(x)| over the support, by repeated central differences."""
    lo, hi = SUPPORT[kind]
    x = np.linspace(lo, hi, points)
    h = x[1] - x[0]
    f = _EVAL[kind](x)
    out = [float(np.abs(f).max())]
    d = f
    for j in range(1, jmax + 1):
        d = np.gradient(d, h, edge_order=2)
        out.append(float(np.abs(x**j * d).max()))
    return out


def log_weight_mass() -> float:
    """Integral of W(x) dx / x; equals (1/2) log 2 for the half-octave partition."""
    return 0.5 * math.log(2.0)
