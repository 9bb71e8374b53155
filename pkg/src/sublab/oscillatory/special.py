"""Bessel kernels J_n, Y_0, K_0 and the complex log-gamma, vectorised.

J_n and Y_0 use Miller's backward recurrence (normalised by
J_0 + 2 sum J_2k = 1 and the Neumann series for Y_0) below x = 30 and the
Hankel expansion above.  K_0 is a power series below 2 and a trapezoid rule
for integral_0^inf exp(-x cosh t) dt above, which converges geometrically.
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_SWITCH = 30.0
_RESCALE = 1e200


class ConvergenceError(ArithmeticError):
    pass


def _miller(x: np.ndarray, orders: tuple[int, ...]):
    """J_n(x) for 0 < x <= 30 and each n in orders, plus the Neumann sum for Y_0."""
    top = max(orders)
    start = 2 * ((int(max(float(x.max()), top)) + 44) // 2)
    nxt = np.zeros_like(x)
    cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)  # sum_{k>=1} J_2k
    neumann = np.zeros_like(x)  # sum_{k>=1} (-1)^k J_2k / k
    found = {n: np.zeros_like(x) for n in orders}
    for k in range(start, 0, -1):
        # cur holds J_k, nxt holds J_{k+1}
        if k in found:
            found[k] = cur.copy()
        if k % 2 == 0:
            norm += cur
            neumann += (-1) ** (k // 2) * cur / (k // 2)
        prev = (2.0 * k / x) * cur - nxt
        nxt, cur = cur, prev
        big = np.abs(cur) > _RESCALE
        if big.any():
            for arr in (nxt, cur, norm, neumann, *found.values()):
                arr[big] /= _RESCALE
    j0 = cur
    scale = j0 + 2.0 * norm
    found[0] = j0
    out = {n: found[n] / scale for n in found}
    y0 = (2.0 / math.pi) * (np.log(x / 2.0) + EULER_GAMMA) * (j0 / scale) - (4.0 / math.pi) * neumann / scale
    return out, y0


def _hankel(x: np.ndarray, nu: int):
    """(P, Q) of the large-argument expansion for integer order nu."""
    mu = 4.0 * nu * nu
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 80):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2:
            Q += (-1) ** (k // 2) * term
        else:
            P += (-1) ** (k // 2) * term
        if np.abs(term).max() < 1e-17:
            break
    else:
        raise ConvergenceError("Hankel expansion did not converge")
    return P, Q


def _asym_jy(x: np.ndarray, nu: int):
    P, Q = _hankel(x, nu)
    chi = x - (0.5 * nu + 0.25) * math.pi
    amp = np.sqrt(2.0 / (math.pi * x))
    c, s = np.cos(chi), np.sin(chi)
    return amp * (P * c - Q * s), amp * (P * s + Q * c)


def _split(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("Bessel kernels need x > 0")
    flat = x.ravel()
    return x.shape, flat, flat <= _SWITCH


def bessel_j(n: int, x):
    """J_n(x), integer n >= 0, x > 0 (for x > 30, n must stay below x)."""
    shape, flat, small = _split(x)
    out = np.empty_like(flat)
    if small.any():
        vals, _ = _miller(flat[small], (n,) if n else (1,))
        out[small] = vals[n]
    large = ~small
    if large.any():
        xl = flat[large]
        if n >= float(xl.min()):
            raise ValueError("forward recurrence needs n < x")
        j0, _ = _asym_jy(xl, 0)
        j1, _ = _asym_jy(xl, 1)
        if n == 0:
            out[large] = j0
        else:
            a, b = j0, j1
            for k in range(1, n):
                a, b = b, (2.0 * k / xl) * b - a
            out[large] = b
    return out.reshape(shape) if shape else float(out[0])


def bessel_y0(x):
    shape, flat, small = _split(x)
    out = np.empty_like(flat)
    if small.any():
        _, y0 = _miller(flat[small], (1,))
        out[small] = y0
    if (~small).any():
        out[~small] = _asym_jy(flat[~small], 0)[1]
    return out.reshape(shape) if shape else float(out[0])


def bessel_k0(x):
    shape, flat, _ = _split(x)
    out = np.empty_like(flat)
    small = flat <= 2.0
    if small.any():
        xs = flat[small]
        t = xs * xs / 4.0
        term = np.ones_like(xs)
        i0 = np.ones_like(xs)
        tail = np.zeros_like(xs)
        harmonic = 0.0
        for k in range(1, 40):
            term = term * t / (k * k)
            harmonic += 1.0 / k
            i0 += term
            tail += term * harmonic
        out[small] = -(np.log(xs / 2.0) + EULER_GAMMA) * i0 + tail
    big = ~small
    if big.any():
        xb = flat[big]
        for i in range(0, len(xb), 65536):
            chunk = xb[i : i + 65536]
            h = np.minimum(0.1, 0.5 / np.sqrt(chunk))
            tmax = np.arccosh(1.0 + 45.0 / chunk)
            steps = int(np.ceil((tmax / h).max())) + 1
            j = np.arange(steps + 1)
            tt = h[:, None] * j
            f = np.exp(-chunk[:, None] * (np.cosh(tt) - 1.0))
            s = h * (f.sum(axis=1) - 0.5 * f[:, 0])
            idx = np.nonzero(big)[0][i : i + 65536]
            out[idx] = s * np.exp(-chunk)
    return out.reshape(shape) if shape else float(out[0])


def bessel_kernel(kind: str, x):
    """Dispatch: "Y0", "K0", or "J<n>" (e.g. "J11" for weight 12)."""
    if kind == "Y0":
        return bessel_y0(x)
    if kind == "K0":
        return bessel_k0(x)
    if kind.startswith("J") and kind[1:].isdigit():
        return bessel_j(int(kind[1:]), x)
    raise ValueError(f"unknown Bessel kernel {kind!r}")


# ---- log-gamma --------------------------------------------------------------

# B_2k / (2k (2k-1)) for k = 1..10
_STIRLING = (
    1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188,
    -691.0 / 360360, 1.0 / 156, -3617.0 / 122400, 43867.0 / 244188, -174611.0 / 125400,
)


def loggamma(z):
    """A branch of log Gamma(z) for Re z > 0 (exp of it is exact Gamma).

    Shifts up to Re z >= 20 and applies Stirling's series.  The branch can
    differ from the principal one by multiples of 2 pi i.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0):
        raise ValueError("loggamma needs Re z > 0")
    shift = max(0, int(math.ceil(20.0 - float(z.real.min()))))
    acc = np.zeros_like(z)
    w = z.copy()
    for _ in range(shift):
        acc += np.log(w)
        w = w + 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(z)
    p = inv
    for c in _STIRLING:
        series += c * p
        p = p * inv2
    out = (w - 0.5) * np.log(w) - w + 0.5 * math.log(2.0 * math.pi) + series - acc
    return out if out.ndim else complex(out)


def log_sin(z):
    """log sin(z) without overflow for large |Im z| (some branch)."""
    z = np.asarray(z, dtype=complex)
    zz = np.atleast_1d(z)
    out = np.empty_like(zz)
    up = zz.imag >= 0
    # Im z >= 0: sin z = (i/2) e^{-iz} (1 - e^{2iz}); Im z < 0 is the mirror image
    zu, zd = zz[up], zz[~up]
    out[up] = -1j * zu + np.log(1.0 - np.exp(2j * zu)) + np.log(0.5j)
    out[~up] = 1j * zd + np.log(1.0 - np.exp(-2j * zd)) + np.log(-0.5j)
    return out.reshape(z.shape) if z.ndim else complex(out[0])


def log_cos(z):
    return log_sin(np.asarray(z, dtype=complex) + 0.5 * math.pi)
