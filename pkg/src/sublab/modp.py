"""Residue arithmetic, Dirichlet characters mod a prime, Gauss and Kloosterman sums.

Characters are tabulated once through a discrete-log table on the smallest
primitive root, so every later sum is a table lookup.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * math.pi


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for sp in small:
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in(lo: int, hi: int) -> list[int]:
    return [n for n in range(max(lo, 2), hi + 1) if is_prime(n)]


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorisation; fine for the moduli used here (< 2^40)."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for prime, e in factorize(n).items():
        divs = [d * prime**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def mod_inverse(a: int, c: int) -> int:
    """Return b in [0, c) with a*b = 1 mod c."""
    if c < 1:
        raise ValueError("modulus must be >= 1")
    if c == 1:
        return 0
    if math.gcd(a, c) != 1:
        raise ValueError(f"{a} is not invertible mod {c}")
    return pow(a, -1, c)


def unit_exp(a: float, c: float = 1) -> complex:
    """e(a/c) = exp(2 pi i a / c)."""
    if isinstance(a, int) and isinstance(c, int):
        a %= c
    return cmath.exp(1j * TWO_PI * a / c)


def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    qs = list(factorize(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise ValueError(f"no primitive root mod {p}")  # unreachable for prime p


@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime p together with its smallest primitive root."""

    p: int
    primitive_root: int = field(init=False)

    def __post_init__(self):
        if not (2 < self.p <= 2**31) or not is_prime(self.p):
            raise ValueError(f"{self.p} is not an odd prime <= 2^31")
        object.__setattr__(self, "primitive_root", _primitive_root(self.p))

    @cached_property
    def dlog(self) -> np.ndarray:
        """dlog[a] = j with g^j = a (mod p); dlog[0] = -1."""
        p, g = self.p, self.primitive_root
        table = np.full(p, -1, dtype=np.int64)
        x = 1
        for j in range(p - 1):
            table[x] = j
            x = x * g % p
        return table

    @cached_property
    def inverses(self) -> np.ndarray:
        """inverses[a] = a^{-1} mod p, with the convention inverses[0] = 0."""
        p, g = self.p, self.primitive_root
        powers = np.empty(p - 1, dtype=np.int64)
        x = 1
        for j in range(p - 1):
            powers[j] = x
            x = x * g % p
        inv = np.zeros(p, dtype=np.int64)
        inv[powers] = powers[(-np.arange(p - 1)) % (p - 1)]
        return inv


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """chi(g^j) = e(j k / (p-1)) for the smallest primitive root g."""

    modulus: PrimeModulus
    index: int
    values: np.ndarray = field(repr=False)

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def is_principal(self) -> bool:
        return self.index == 0

    @property
    def order(self) -> int:
        return (self.p - 1) // math.gcd(self.index, self.p - 1)

    @property
    def parity(self) -> int:
        """chi(-1), either +1 or -1."""
        return 1 if self.index % 2 == 0 else -1

    def __call__(self, a):
        return self.values[np.asarray(a) % self.p]

    def conj(self) -> "DirichletCharacter":
        return character(self.modulus, (-self.index) % (self.p - 1))


def character(modulus: PrimeModulus | int, index: int) -> DirichletCharacter:
    if isinstance(modulus, int):
        modulus = PrimeModulus(modulus)
    p = modulus.p
    if not 0 <= index <= p - 2:
        raise ValueError(f"character index {index} outside [0, {p - 2}]")
    dl = modulus.dlog
    vals = np.zeros(p, dtype=np.complex128)
    j = dl[1:]
    # exact values at the real points: index*j*2 mod (p-1) == 0
    phase = (index * j) % (p - 1)
    vals[1:] = np.exp(1j * TWO_PI * phase / (p - 1))
    vals[1:][phase == 0] = 1.0
    if (p - 1) % 2 == 0:
        vals[1:][2 * phase == p - 1] = -1.0
    vals.setflags(write=False)
    return DirichletCharacter(modulus, index, vals)


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_b chi(b) e(b/p). Principal characters give -1."""
    p = chi.p
    b = np.arange(p)
    return complex(np.sum(chi.values * np.exp(1j * TWO_PI * b / p)))


def kloosterman(a: int, b: int, c: int) -> float:
    """S(a, b; c) = sum over units x mod c of e((a x + b xbar)/c)."""
    if c < 1:
        raise ValueError("modulus must be >= 1")
    if c == 1:
        return 1.0
    xs = [x for x in range(1, c) if math.gcd(x, c) == 1]
    phases = np.array([(a * x + b * pow(x, -1, c)) % c for x in xs], dtype=np.float64)
    total = np.sum(np.exp(1j * TWO_PI * phases / c))
    if abs(total.imag) > 1e-9 * max(1.0, len(xs)):
        raise ArithmeticError(f"Kloosterman sum S({a},{b};{c}) not real: {total}")
    return float(total.real)


def kloosterman_table(p: int) -> np.ndarray:
    """S(a, b; p) for all a, b mod p, as a (p, p) array.

    Uses S(a, b; p) = S(1, ab; p) for p not dividing a.
    """
    inv = PrimeModulus(p).inverses
    x = np.arange(1, p)
    base = np.array([np.sum(np.cos(TWO_PI * ((x + m * inv[x]) % p) / p)) for m in range(p)])
    a = np.arange(p)[:, None]
    b = np.arange(p)[None, :]
    table = base[(a * b) % p].copy()
    # a = 0 row: Ramanujan sum c_p(b); symmetric column
    ram = np.where(np.arange(p) % p == 0, p - 1, -1).astype(float)
    table[0, :] = ram
    table[:, 0] = ram
    return table
