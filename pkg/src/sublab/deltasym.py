"""Real-space delta symbol on integers |n| <= 2M.

With a smooth w supported on (Q/2, Q] and sum_{d>=1} w(d) = 1
    delta(n) = sum_{q<=Q} c_q(n) Delta_q(n),
    Delta_q(u) = sum_{r>=1} (qr)^{-1} (w(qr) - w(|u|/(qr))),
which is an exact finite identity (it is sum_{d|n} w(d) - w(|n|/d) unfolded
through additive characters).  g(q, x) is the Fourier-side profile of
Delta_q after a smooth cutoff at |u| <= 4M, so that on |u| <= 2M
    Delta_q(u) = (qQ)^{-1} * integral g(q, x) e(ux/(qQ)) dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .modp import divisors, mobius
from .oscillatory.quadrature import QuadratureError, panel_rule
from .oscillatory.weights import bump, smooth_step


def ramanujan_sum(q: int, n: int) -> int:
    """c_q(n) = sum_{d | (q, n)} d mu(q/d)."""
    g = math.gcd(q, n) if n else q
    return sum(d * mobius(q // d) for d in divisors(g))


@dataclass(frozen=True)
class DeltaScheme:
    M: int
    Q: float = field(init=False)
    norm: float = field(init=False)

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        Q = 2.0 * math.sqrt(self.M)
        object.__setattr__(self, "Q", Q)
        d = np.arange(1, int(Q) + 1)
        object.__setattr__(self, "norm", float(self._raw_w(d).sum()))

    def _raw_w(self, t):
        Q = self.Q
        return bump(4.0 * np.asarray(t, dtype=float) / Q - 3.0)

    def w(self, t):
        """Normalised cutoff; zero outside (Q/2, Q)."""
        return self._raw_w(t) / self.norm

    def cutoff(self, u):
        """1 on |u| <= 2M, 0 on |u| >= 4M."""
        return smooth_step((4.0 * self.M - np.abs(np.asarray(u, dtype=float))) / (2.0 * self.M))

    @cached_property
    def _first_terms(self) -> dict[int, float]:
        out = {}
        for q in range(1, int(self.Q) + 1):
            r = np.arange(1, int(self.Q // q) + 1)
            out[q] = float(np.sum(self.w(q * r) / (q * r)))
        return out


def delta_kernel(scheme: DeltaScheme, q: int, u):
    """Delta_q(u), vectorised over real u."""
    if q < 1:
        raise ValueError("q must be >= 1")
    u = np.abs(np.asarray(u, dtype=float))
    first = scheme._first_terms.get(q, 0.0)
    # second term: w(|u|/(qr)) needs |u|/(qr) in (Q/2, Q), so r < 2|u|/(qQ)
    rmax = int(2.0 * float(np.max(u, initial=0.0)) / (q * scheme.Q)) + 1
    second = np.zeros_like(u)
    for r in range(1, rmax + 1):
        second += scheme.w(u / (q * r)) / (q * r)
    out = first - second
    return float(out) if out.ndim == 0 else out


def delta_eval(scheme: DeltaScheme, n: int) -> float:
    if abs(n) > 2 * scheme.M:
        raise ValueError(f"|n| = {abs(n)} outside the detected range 2M = {2 * scheme.M}")
    return float(sum(ramanujan_sum(q, n) * delta_kernel(scheme, q, n) for q in range(1, int(scheme.Q) + 1)))


# ---- Fourier-side diagnostics ---------------------------------------------


def _u_rule(scheme: DeltaScheme, q: int, x_max: float, order: int = 16):
    """Gauss-Legendre rule on [0, 4M] fine enough for e(u x/(qQ)) with |x| <= x_max."""
    span = 4.0 * scheme.M
    T = q * scheme.Q
    cycles = span * x_max / T
    panels = max(128, int(math.ceil((cycles * 4 + span * 4) / order)))
    # Delta_q stops being analytic at the ends of each bump copy, u = qrQ/2 and qrQ
    r = np.arange(1, int(2 * span / T) + 2)
    breaks = np.concatenate([r * T / 2, r * T, [2.0 * scheme.M], np.linspace(0.0, span, panels + 1)])
    edges = np.unique(breaks[(breaks >= 0) & (breaks <= span)])
    return panel_rule(edges, order)


def g_eval(scheme: DeltaScheme, q: int, x, x_max: float | None = None):
    """g(q, x) = integral Delta_q(u) cutoff(u) e(-ux/(qQ)) du (real and even in x)."""
    if not 1 <= q <= scheme.Q:
        raise ValueError("g is defined for 1 <= q <= Q")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xm = float(np.abs(x).max()) if x_max is None else x_max
    u, wts = _u_rule(scheme, q, max(xm, 1.0))
    f = delta_kernel(scheme, q, u) * scheme.cutoff(u) * wts
    T = q * scheme.Q
    out = np.empty(x.shape)
    for i in range(0, len(x), 256):
        xs = x[i : i + 256]
        out[i : i + 256] = 2.0 * np.cos(2.0 * np.pi * np.outer(xs, u) / T) @ f
    return out


def g_decay_range(scheme: DeltaScheme, q: int, rel: float = 1e-10, x_stop: float = 5000.0) -> float:
    """Smallest x past which |g(q, .)| stays below rel * |g(q, 0)| on a probe grid."""
    g0 = abs(g_eval(scheme, q, 0.0)[0])
    x = 25.0
    while x <= x_stop:
        probe = np.linspace(x, 2 * x, 400)
        if np.abs(g_eval(scheme, q, probe)).max() < rel * g0:
            return x
        x *= 1.5
    raise QuadratureError(f"g(q={q}, x) did not decay below {rel:g} by x={x_stop}", g0, float("nan"))


def g_inverse(scheme: DeltaScheme, q: int, u, order: int = 16):
    """(qQ)^{-1} integral g(q, x) e(ux/(qQ)) dx, truncated where g has decayed."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    X = g_decay_range(scheme, q)
    T = q * scheme.Q
    # g itself oscillates at rates up to 4M/(qQ) in x, the kernel at |u|/(qQ)
    cycles = X * (4.0 * scheme.M + float(np.abs(u).max())) / T
    panels = max(64, int(math.ceil((cycles * 4 + X) / order)))
    xs, wx = panel_rule(np.linspace(0.0, X, panels + 1), order)
    gx = g_eval(scheme, q, xs, x_max=X)
    # g even => integral over R is twice the cosine integral over [0, X]
    return 2.0 * np.cos(2.0 * np.pi * np.outer(u, xs) / T) @ (gx * wx) / T


def g_decay_exponent(scheme: DeltaScheme, q: int, x_lo: float = 2.0, x_hi: float | None = None) -> float:
    """Least-squares exponent A in |g| ~ x^{-A} over an envelope of local maxima."""
    if x_hi is None:
        x_hi = g_decay_range(scheme, q, rel=1e-9)
    x = np.geomspace(x_lo, x_hi, 600)
    env = np.abs(g_eval(scheme, q, x))
    floor = 1e-14 * abs(g_eval(scheme, q, 0.0)[0])
    keep = env > floor
    # running max from the right gives a monotone envelope
    env = np.maximum.accumulate(env[::-1])[::-1]
    A = -np.polyfit(np.log(x[keep]), np.log(env[keep]), 1)[0]
    return float(A)
