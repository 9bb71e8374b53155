"""Two-sided GL(2) Voronoi checks and GL(3) dual-side assembly.

GL(2), weight 12 cusp form Delta, lambda(n) = tau(n) / n^{11/2}:
    sum lambda(n) e(an/q) h(n) = (2 pi / q) sum lambda(n) e(-abar n/q) int h(x) J_11(4 pi sqrt(nx)/q) dx

GL(2), divisor function:
    sum d(n) e(an/q) h(n) = (1/q) int (log x + 2 gamma - 2 log q) h(x) dx
        + (1/q) sum d(n) int h(x) [-2 pi e(-abar n/q) Y_0 + 4 e(abar n/q) K_0](4 pi sqrt(nx)/q) dx
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arithfns import CoefficientTable, lambda_min
from .modp import kloosterman, mod_inverse
from .oscillatory.quadrature import panel_rule
from .oscillatory.special import EULER_GAMMA, bessel_j, bessel_k0, bessel_y0
from .oscillatory.weights import SmoothWeight, weight_V

TWO_PI = 2.0 * math.pi


class TruncationError(RuntimeError):
    pass


@dataclass(frozen=True)
class VoronoiInstance:
    kind: str  # "tau" or "d"
    a: int
    q: int
    X: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ("tau", "d"):
            raise ValueError("kind must be 'tau' or 'd'")
        if self.q < 1 or math.gcd(self.a, self.q) != 1:
            raise ValueError("need q >= 1 and gcd(a, q) = 1")
        if self.X <= 0:
            raise ValueError("X must be positive")

    @property
    def h(self) -> SmoothWeight:
        return SmoothWeight("V", self.X, self.amplitude)


def _coeffs(kind: str, n_max: int) -> np.ndarray:
    """lambda(n) as floats for n in [0, n_max]."""
    table = CoefficientTable("tau" if kind == "tau" else "d2", n_max)
    vals = table.values
    if kind == "tau":
        n = np.arange(n_max + 1, dtype=float)
        n[0] = 1.0
        # tau(n) / n^{11/2} without overflowing float on the way
        out = np.array([float(v) for v in vals]) / n**5.5
        out[0] = 0.0
        return out
    return vals.astype(float)


def _x_rule(inst: VoronoiInstance, n_max: int, order: int = 16):
    """Gauss-Legendre rule on [X, 2X] resolving the dual kernel up to n_max."""
    X, q = inst.X, inst.q
    cycles = 2.0 * math.sqrt(n_max) * (math.sqrt(2 * X) - math.sqrt(X)) / q
    panels = max(16, int(math.ceil((4 * cycles + 40) / order)))
    x, w = panel_rule(np.linspace(X, 2 * X, panels + 1), order)
    return x, w * inst.h(x)


def dual_length(inst: VoronoiInstance, margin: float = 3.0) -> int:
    """Transforms decay once the Bessel phase 4 pi sqrt(nx)/q makes ~150 cycles across [X, 2X]."""
    return int(margin * 22500.0 * inst.q**2 / inst.X) + 50


def lhs_sum(inst: VoronoiInstance) -> complex:
    lo, hi = int(math.floor(inst.X)), int(math.ceil(2 * inst.X))
    lam = _coeffs(inst.kind, hi)
    n = np.arange(max(lo, 1), hi + 1)
    return complex(np.sum(lam[n] * np.exp(TWO_PI * 1j * ((inst.a * n) % inst.q) / inst.q) * inst.h(n)))


def _dual_terms(inst: VoronoiInstance, n_max: int, chunk: int = 512) -> np.ndarray:
    """Per-n contributions of the dual side (without the main term)."""
    q = inst.q
    abar = mod_inverse(inst.a % q, q) if q > 1 else 0
    lam = _coeffs(inst.kind, n_max)
    xs, wh = _x_rule(inst, n_max)
    sx = np.sqrt(xs)
    terms = np.zeros(n_max + 1, dtype=complex)
    for start in range(1, n_max + 1, chunk):
        n = np.arange(start, min(start + chunk, n_max + 1))
        arg = (4.0 * math.pi / q) * np.outer(np.sqrt(n), sx)
        minus = np.exp(-TWO_PI * 1j * ((abar * n) % q) / q)
        plus = np.conj(minus)
        if inst.kind == "tau":
            kern = bessel_j(11, arg) @ wh
            terms[n] = (TWO_PI / q) * lam[n] * minus * kern
        else:
            ky = bessel_y0(arg) @ wh
            kk = np.zeros(len(n))
            live = arg[:, 0] < 700.0
            if live.any():
                kk[live] = bessel_k0(arg[live]) @ wh
            terms[n] = lam[n] / q * (-TWO_PI * minus * ky + 4.0 * plus * kk)
    return terms


def main_term(inst: VoronoiInstance) -> complex:
    if inst.kind == "tau":
        return 0j
    xs, wh = _x_rule(inst, 1)
    return complex(np.sum((np.log(xs) + 2 * EULER_GAMMA - 2 * math.log(inst.q)) * wh) / inst.q)


def gl2_voronoi_residual(inst: VoronoiInstance, tail_tol: float = 1e-6) -> tuple[complex, complex, float]:
    n_max = dual_length(inst)
    terms = _dual_terms(inst, n_max)
    total = terms.sum()
    cut = int(0.5 * n_max)
    tail = abs(terms[cut:].sum())
    lhs = lhs_sum(inst)
    scale = max(abs(lhs), abs(total))
    if tail > tail_tol * scale:
        raise TruncationError(f"dual tail {tail:.3e} exceeds {tail_tol:g} of {scale:.3e}")
    rhs = complex(total) + main_term(inst)
    return lhs, rhs, abs(lhs - rhs) / abs(lhs)


# ---- GL(3) ---------------------------------------------------------------------

_Z_ORDER = 16


def gl3_z_integral(params, m, sign: int = -1, x: float | None = None, chunk: int = 16) -> np.ndarray:
    """int V(z) e(lam x z + sign c3(m) z^{1/3}) dz for an array of m = n1^2 n2."""
    m = np.atleast_1d(np.asarray(m, dtype=float))
    x = params.x if x is None else x
    lam = params.lam * x
    c3 = np.array([params.c3(mm) for mm in m])
    cycles = abs(lam) + float(np.abs(c3).max()) / 3.0
    panels = max(32, int(math.ceil((6 * cycles + 40) / _Z_ORDER)))
    z, w = panel_rule(np.linspace(1.0, 2.0, panels + 1), _Z_ORDER)
    amp = weight_V(z) * w * np.exp(TWO_PI * 1j * lam * z)
    cz = np.cbrt(z)
    out = np.empty(len(m), dtype=complex)
    for i in range(0, len(m), chunk):
        out[i : i + chunk] = np.exp(TWO_PI * 1j * sign * np.outer(c3[i : i + chunk], cz)) @ amp
    return out


def gl3_truncation_scan(params, points: int = 161, rel: float = 1e-6, xs=None) -> dict:
    """Profile of the z-integral over n1^2 n2 in [M0/100, 100 M0] and its negligibility threshold.

    The profile is the sup over the x values in `xs` (default: the params' own x);
    the minus sign with x of either sign covers both signs of the cube-root term.
    """
    M0 = params.M0
    m = np.geomspace(M0 / 100.0, 100.0 * M0, points)
    xs = [params.x] if xs is None else list(xs)
    vals = np.max([np.abs(gl3_z_integral(params, m, sign=-1, x=x)) for x in xs], axis=0)
    peak = float(vals.max())
    ratio = vals / peak
    above = np.nonzero(ratio > rel)[0]
    if len(above) == 0:
        threshold = float(m[0])
    elif above[-1] == len(m) - 1:
        threshold = float("inf")
    else:
        threshold = float(m[above[-1] + 1])
    return {"m": m, "ratio": ratio, "peak": peak, "threshold": threshold, "M0": M0,
            "threshold_over_M0": threshold / M0}


@lru_cache(maxsize=65536)
def _kloosterman_cached(a: int, b: int, c: int) -> float:
    return kloosterman(a % c if c > 1 else 0, b % c if c > 1 else 0, c)


def gl3_voronoi_dual_sum(c: int, r: int, d: int, M0: float, kernel, table: CoefficientTable | None = None,
                         tail_tol: float | None = None) -> complex:
    """c sum_+- sum_{n1 | cr} sum_{n2: n1^2 n2 <= 4 M0} lambda(n1,n2)/(n1 n2) S(r dbar, +-n2; cr/n1) G_+-(n1^2 n2/(c^3 r)).

    kernel(sign, y_array) supplies G_+ (sign=+1) or G_- (sign=-1).
    """
    if math.gcd(d, c) != 1:
        raise ValueError("need gcd(d, c) = 1")
    dbar = mod_inverse(d % c, c) if c > 1 else 0
    limit = 4.0 * M0
    n_top = int(limit)
    if table is None:
        table = CoefficientTable("lambda_min", max(n_top, c * r, 1))
    total = 0j
    tail = 0j
    cr = c * r
    for n1 in (k for k in range(1, cr + 1) if cr % k == 0):
        top = int(limit // (n1 * n1))
        if top < 1:
            continue
        n2 = np.arange(1, top + 1)
        lam = table.lambda_min(n1, n2).astype(float) if n1 <= table.size else np.array([lambda_min(n1, int(k)) for k in n2], float)
        mod = cr // n1
        y = n1 * n1 * n2 / (c**3 * r)
        for sign in (1, -1):
            S = np.array([_kloosterman_cached(r * dbar, sign * int(k), mod) for k in n2])
            contrib = lam / (n1 * n2) * S * np.asarray(kernel(sign, y))
            total += contrib.sum()
            tail += contrib[n1 * n1 * n2 > 2.0 * M0].sum()
    total *= c
    tail *= c
    if tail_tol is not None and abs(tail) > tail_tol * max(abs(total), 1e-300):
        raise TruncationError(f"GL(3) dual tail {abs(tail):.3e} above {tail_tol:g} of total")
    return total
