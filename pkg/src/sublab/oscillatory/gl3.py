"""GL(3) Voronoi weight transforms G_0, G_1, G_+- by contour quadrature and by asymptotics.

Contour side: G_l(y) = (1/2pi) int (y)^{-s} gamma_l(s) g~(-s) dtau on Re s = sigma,
where g~(-s) = X^{-s} int F(v) e^{-sv} dv with F(v) = g(X e^v), obtained on a
uniform tau grid by one zero-padded FFT.  The tau integral is a trapezoid sum,
which is geometrically accurate because the integrand is analytic in a strip.

Asymptotic side: G_l(y) = int g(t) k_l(yt) dt/t with k_l the Mellin inverse of
gamma_l.  For large z, k_l is carried by G^{3,0}_{0,3}(8 pi^3 z e^{-+3 pi i/2} | 1+alpha)
whose expansion e^{-3 zeta} zeta^2 sum a_k zeta^{-k} has coefficients fixed by
the Meijer differential equation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .quadrature import integrate, phase_breakpoints
from .special import loggamma
from .weights import weight_V

LOG_PI = math.log(math.pi)


class ContourError(RuntimeError):
    pass


class RegimeError(ValueError):
    pass


@dataclass(frozen=True)
class TransformSpec:
    langlands: tuple[complex, complex, complex] = (0.0, 0.0, 0.0)
    nu: float = 0.0
    weight: int = 12

    def __post_init__(self):
        if len(self.langlands) != 3 or abs(sum(self.langlands)) > 1e-12:
            raise ValueError("need three Langlands parameters summing to 0")

    @property
    def is_eisenstein(self) -> bool:
        return all(a == 0 for a in self.langlands)

    def pole_bound(self) -> float:
        """Contours need sigma > -1 + max(-Re alpha_i)."""
        return -1.0 + max(-complex(a).real for a in self.langlands)


@dataclass(frozen=True)
class ChirpedBump:
    """g(t) = amplitude * V(t/X) e(chirp * t/X), supported on [X, 2X]."""

    X: float
    chirp: float = 0.0
    amplitude: complex = 1.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * weight_V(t / self.X) * np.exp(2j * math.pi * self.chirp * t / self.X)

    @property
    def support(self) -> tuple[float, float]:
        return self.X, 2.0 * self.X

    def phase(self, t):
        return 2.0 * math.pi * self.chirp * np.asarray(t, dtype=float) / self.X


def stationary_chirp(y: float, X: float, at: float = 1.5) -> float:
    """Chirp that makes e(chirp t/X) e(-3 (yt)^{1/3}) stationary at t = at * X."""
    return (y * X) ** (1.0 / 3.0) / at ** (2.0 / 3.0)


def log_gamma_factor(spec: TransformSpec, l: int, s):
    """log of gamma_l(s) = (pi^{-3s-3/2}/2) prod Gamma((1+s+a+l)/2) / Gamma((-s-a+l)/2)."""
    s = np.asarray(s, dtype=complex)
    out = (-3.0 * s - 1.5) * LOG_PI - math.log(2.0)
    for a in spec.langlands:
        out = out + loggamma((1.0 + s + a + l) / 2.0) - loggamma((-s - a + l) / 2.0)
    return out


def _fhat_grid(test_fn, sigma: float, T: float, h: float):
    """tau_k and F^(tau_k) = int F(v) e^{-sigma v} e^{-i tau_k v} dv for |tau_k| <= T."""
    lo, hi = test_fn.support
    X = lo
    vmax = math.log(hi / X)
    dv = math.pi / (1.25 * T)
    n = int(math.ceil(vmax / dv)) + 1
    v = np.arange(n) * dv
    f = test_fn(X * np.exp(v)) * np.exp(-sigma * v)
    size = 1 << int(math.ceil(math.log2(max(n, 2.0 * math.pi / (h * dv)))))
    spec = np.fft.fft(f, size) * dv
    k = np.fft.fftfreq(size, d=1.0 / size)
    tau = 2.0 * math.pi * k / (size * dv)
    keep = np.abs(tau) <= T
    order = np.argsort(tau[keep])
    return tau[keep][order], spec[keep][order], tau[1] - tau[0]


def g3_transform_contour(spec: TransformSpec, test_fn, y: float, sigma: float = -0.5,
                         h: float = 0.05, rel_floor: float = 1e-14, tau_limit: float = 4e5):
    """(G_+(y), G_-(y)) by Mellin-Barnes contour quadrature; returns dict with diagnostics."""
    if sigma <= spec.pole_bound() + 0.05:
        raise ContourError(f"sigma={sigma} too close to the pole constraint {spec.pole_bound():.3f}")
    X = test_fn.support[0]
    base = 2.0 * math.pi * 2.0 * abs(getattr(test_fn, "chirp", 0.0)) + 12.0 * (y * X) ** (1.0 / 3.0) + 60.0
    T = base
    while T <= tau_limit:
        tau, fh, step = _fhat_grid(test_fn, sigma, T, h)
        s = sigma + 1j * tau
        lead = -s * math.log(y * X)
        G = []
        worst = 0.0
        for l in (0, 1):
            integrand = np.exp(lead + log_gamma_factor(spec, l, s)) * fh
            mag = np.abs(integrand)
            edge = mag[np.abs(tau) >= 0.9 * T].max()
            worst = max(worst, edge / mag.max())
            G.append(complex(integrand.sum() * step / (2.0 * math.pi)))
        if worst <= rel_floor:
            g0, g1 = G
            return {"G0": g0, "G1": g1, "G+": g0 - 1j * g1, "G-": g0 + 1j * g1,
                    "tau_max": T, "step": step, "edge_ratio": worst}
        T *= 2.0
    raise ContourError(f"contour integrand not below {rel_floor:g} of its peak by |tau| = {tau_limit:g}")


# ---- asymptotic side ----------------------------------------------------------


def meijer_coefficients(b, count: int):
    """a_0 = 1, a_1, ... in G^{3,0}_{0,3}(w | b) ~ (2pi/sqrt3) e^{-3 zeta} zeta^rho sum a_k zeta^{-k}.

    Plugging F = sum a_k zeta^{rho-k} into prod_j (D - 3 zeta - 3 b_j) F + 27 zeta^3 F = 0
    (D = zeta d/dzeta, zeta = w^{1/3}) gives a three-term recurrence.
    Works over Fraction for rational b and over complex otherwise.
    """
    b = tuple(b)
    one = Fraction(1) if all(isinstance(x, (int, Fraction)) for x in b) else 1.0

    def apply(poly):
        # poly: {exponent: coeff}; returns (D - 3 zeta - 3 b_j) applied for each j
        for bj in b:
            new = {}
            for m, c in poly.items():
                new[m] = new.get(m, 0) + (m - 3 * bj) * c
                new[m + 1] = new.get(m + 1, 0) - 3 * c
            poly = new
        return poly

    def shifts(m):
        poly = apply({m: one})
        return [poly.get(m + j, 0) for j in range(3)]

    rho = (sum(b) - 1) * one
    assert shifts(rho)[2] == 0, "indicial root mismatch"
    a = [one]
    for n in range(1, count):
        c = shifts(rho - n)
        acc = shifts(rho - n + 1)[1] * a[n - 1]
        if n >= 2:
            acc += shifts(rho - n + 2)[0] * a[n - 2]
        a.append(-acc / c[2])
    return rho, a


def li_kernels(spec: TransformSpec, z, K: int):
    """K-term asymptotics of (k_0(z), k_1(z))."""
    b = tuple(Fraction(1) for _ in range(3)) if spec.is_eisenstein else tuple(1 + complex(a) for a in spec.langlands)
    rho, a = meijer_coefficients(b, K)
    rho = complex(rho)
    rho = rho.real if rho.imag == 0 else rho
    z = np.asarray(z, dtype=float)
    W13 = 2.0 * math.pi * np.cbrt(z)  # (8 pi^3 z)^{1/3}
    C = 2.0 * math.pi / math.sqrt(3.0)
    phis = {}
    for sgn in (1, -1):
        zeta = sgn * 1j * W13
        tot = np.zeros(z.shape, dtype=complex)
        for k, ak in enumerate(a):
            tot += complex(ak) * zeta ** (rho - k)
        # G^{3,0}_{0,3}(W e^{sgn 3 pi i/2}) ~ C e^{-3 zeta} zeta^rho sum a_k zeta^{-k}
        phis[sgn] = C * np.exp(-3.0 * zeta) * tot
    k0 = -1j / (16.0 * math.pi**3) * (phis[-1] - phis[1])
    k1 = 1.0 / (16.0 * math.pi**3) * (phis[-1] + phis[1])
    return k0, k1


def li_expansion(spec: TransformSpec, test_fn, y: float, K: int = 4):
    """(G_+, G_-) from the K-term expansion of the kernels (valid for yX large)."""
    if K < 1:
        raise ValueError("K must be >= 1")
    lo, hi = test_fn.support
    yX = y * lo
    if yX <= 1.0 or (K >= 3 and yX ** ((2.0 - K) / 3.0) >= 1.0):
        raise RegimeError(f"yX = {yX:g} outside the large-argument regime")
    chirp_phase = getattr(test_fn, "phase", lambda t: 0.0 * np.asarray(t))
    edges = phase_breakpoints(lambda t: chirp_phase(t) - 6.0 * math.pi * np.cbrt(y * t), lo, hi)
    out = []
    for l in (0, 1):
        f = lambda t, l=l: test_fn(t) * li_kernels(spec, y * t, K)[l] / t
        out.append(integrate(f, edges, order=12, rtol=1e-11).value)
    g0, g1 = out
    return {"G0": g0, "G1": g1, "G+": g0 - 1j * g1, "G-": g0 + 1j * g1}


def leading_envelope(y: float, t) -> np.ndarray:
    """|x| (pi^3 x t)^{-1/3} pi^{3/2}/2 * |d_1| with d_1 = -2/sqrt(3 pi): the K = 1 amplitude."""
    t = np.asarray(t, dtype=float)
    d1 = 2.0 / math.sqrt(3.0 * math.pi)
    return 0.5 * math.pi**1.5 * y * d1 / np.cbrt(math.pi**3 * y * t)


def relative_gap(a: dict, b: dict) -> float:
    num = math.hypot(abs(a["G+"] - b["G+"]), abs(a["G-"] - b["G-"]))
    den = math.hypot(abs(a["G+"]), abs(a["G-"]))
    return num / den
