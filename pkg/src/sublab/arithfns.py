"""Exact coefficient tables: d_k, lambda_min (minimal GL(3) Eisenstein series), Ramanujan tau.

All tables are built from a smallest-prime-factor sieve and hold Python- or
numpy-integers; nothing here is floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .modp import divisors, factorize, mobius


def spf_sieve(n: int) -> np.ndarray:
    """Smallest prime factor of every integer in [0, n]; spf[0] = spf[1] = 0."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for i in range(2, math.isqrt(n) + 1):
        if spf[i] == 0:
            block = spf[i * i :: i]
            block[block == 0] = i
            spf[i] = i
    rest = np.nonzero(spf == 0)[0]
    rest = rest[rest >= 2]
    spf[rest] = rest
    return spf


def divisor_k_table(k: int, n: int) -> np.ndarray:
    """d_k(m) for m in [0, n] (entry 0 unused)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    # vectorised Dirichlet convolution: d_k = 1 * d_{k-1}
    prev = np.zeros(n + 1, dtype=np.int64)
    prev[1:] = 1
    for _ in range(k - 1):
        cur = np.zeros(n + 1, dtype=np.int64)
        for d in range(1, n + 1):
            cur[d::d] += prev[1 : n // d + 1]
        prev = cur
    return prev


def mobius_table(n: int) -> np.ndarray:
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    spf = spf_sieve(n)
    for p in np.nonzero(spf[2:] == np.arange(2, n + 1))[0] + 2:
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


@dataclass(frozen=True)
class CoefficientTable:
    """Exact coefficient table of one of the supported kinds up to index `size`.

    kind is one of "d2", "d3", "lambda_min", "tau".  For lambda_min the table
    is evaluated lazily per r (only d_3 and mu are stored).
    """

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("d2", "d3", "lambda_min", "tau"):
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if self.size < 1:
            raise ValueError("table size must be >= 1")

    @cached_property
    def values(self) -> np.ndarray:
        if self.kind == "d2":
            return divisor_k_table(2, self.size)
        if self.kind in ("d3", "lambda_min"):
            return divisor_k_table(3, self.size)
        return ramanujan_tau_table(self.size)

    @cached_property
    def mu(self) -> np.ndarray:
        return mobius_table(self.size)

    def _check(self, n):
        n = np.asarray(n)
        if n.size and (n.min() < 1 or n.max() > self.size):
            raise IndexError(f"index outside table range [1, {self.size}]")

    def __call__(self, n):
        """Coefficient at n (for lambda_min: lambda_min(1, n) = d_3(n))."""
        self._check(n)
        return self.values[n]

    def lambda_min(self, r: int, n):
        """lambda_min(r, n) = sum_{d | (r, n)} mu(d) d_3(r/d) d_3(n/d); vectorised in n."""
        if self.kind not in ("d3", "lambda_min"):
            raise TypeError("lambda_min needs a d3/lambda_min table")
        n = np.asarray(n, dtype=np.int64)
        self._check(n)
        self._check(r)
        d3, mu = self.values, self.mu
        out = np.zeros(n.shape, dtype=np.int64)
        for d in range(1, r + 1):
            if r % d or mu[d] == 0:
                continue
            hit = n % d == 0
            out[hit] += mu[d] * d3[r // d] * d3[n[hit] // d]
        return out if out.ndim else int(out)


def divisor_k(k: int, n: int, table: CoefficientTable | None = None) -> int:
    if k not in (2, 3):
        raise ValueError("only k in {2, 3} is supported")
    if table is None:
        table = CoefficientTable(f"d{k}", max(n, 1))
    elif table.kind not in (f"d{k}",) + (("lambda_min",) if k == 3 else ()):
        raise TypeError("table kind does not match k")
    return int(table(n))


def _d3_factored(n: int) -> int:
    return math.prod((a + 1) * (a + 2) // 2 for a in factorize(n).values())


def _lambda_min_factored(r: int, n: int) -> int:
    g = math.gcd(r, n)
    return sum(mobius(d) * _d3_factored(r // d) * _d3_factored(n // d) for d in divisors(g))


def lambda_min(r: int, n: int, table: CoefficientTable | None = None) -> int:
    """Without a table, evaluated by factorisation (suits isolated large arguments)."""
    if r < 1 or n < 1:
        raise ValueError("r, n must be >= 1")
    if table is None:
        return _lambda_min_factored(r, n)
    return int(table.lambda_min(r, n))


# --- Ramanujan tau -------------------------------------------------------

# product of distinct ~2^31 primes; 4 of them exceed 2 * max|tau(n)| for n <= 1e5
_TAU_PRIMES = (2147483647, 2147483629, 2147483587, 2147483579, 2147483563)


def _eta_cubed_sparse(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi: prod (1-q^m)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}."""
    pos, coef = [], []
    k = 0
    while k * (k + 1) // 2 <= n:
        pos.append(k * (k + 1) // 2)
        coef.append((-1) ** k * (2 * k + 1))
        k += 1
    return np.array(pos), np.array(coef, dtype=np.int64)


def ramanujan_tau_table(n: int) -> np.ndarray:
    """tau(m) for m in [0, n] as a Python-int object array.

    Delta = q * (eta^3)^8; the 8-fold product is carried out modulo several
    31-bit primes (sparse times dense, exact in int64) and lifted by CRT.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    length = n  # coefficients of prod (1-q^m)^24 up to q^{n-1}
    pos, coef = _eta_cubed_sparse(length - 1)
    bound = 2 * 10 ** (2 + 5.5 * math.log10(max(n, 2)) + 1)
    primes = []
    modulus = 1
    for prime in _TAU_PRIMES:
        primes.append(prime)
        modulus *= prime
        if modulus > bound:
            break
    residues = []
    for prime in primes:
        series = np.zeros(length, dtype=np.int64)
        series[pos] = coef % prime
        for _ in range(7):
            nxt = np.zeros(length, dtype=np.int64)
            for s, c in zip(pos, coef):
                nxt[s:] = (nxt[s:] + series[: length - s] * c) % prime
            series = nxt
        residues.append(series)
    out = np.zeros(n + 1, dtype=object)
    half = modulus // 2
    cofactors = []
    for prime in primes:
        m_i = modulus // prime
        cofactors.append(m_i * pow(m_i, -1, prime))
    for m in range(length):
        x = sum(int(res[m]) * cf for res, cf in zip(residues, cofactors)) % modulus
        out[m + 1] = x - modulus if x > half else x
    out[0] = 0
    return out


def ramanujan_tau(n: int, table: CoefficientTable | None = None) -> int:
    if table is None:
        table = CoefficientTable("tau", n)
    if table.kind != "tau":
        raise TypeError("need a tau table")
    return int(table(n))


def hecke_triple(l: int, r: int, n: int, table: CoefficientTable | None = None) -> tuple[int, int]:
    """Both sides of lambda(1,l) lambda(r,n) = lambda(r,nl) + [l|n] lambda(rl,n/l) + [l|r] lambda(r/l,n)."""
    if table is None:
        lam = _lambda_min_factored
    else:
        lam = table.lambda_min
    lhs = lam(1, l) * lam(r, n)
    rhs = lam(r, n * l)
    if n % l == 0:
        rhs += lam(r * l, n // l)
    if r % l == 0:
        rhs += lam(r // l, n)
    return int(lhs), int(rhs)


def ramanujan_average(x: int, table: CoefficientTable | None = None) -> int:
    """sum_{n1^2 n2 <= x} lambda_min(n1, n2)^2, exactly."""
    if x < 1:
        return 0
    if table is None:
        table = CoefficientTable("lambda_min", x)
    total = 0
    n1 = 1
    while n1 * n1 <= x:
        n2 = np.arange(1, x // (n1 * n1) + 1)
        vals = table.lambda_min(n1, n2).astype(object)
        total += int(np.sum(vals * vals))
        n1 += 1
    return total
