"""Finite character sums from the Cauchy-Poisson step, evaluated by brute force.

Notation: T_u(c) = sum_{b != u} chi(b) e(c * inv(u - b) / p), the inner b-sum
that every display here is built from.  Terms whose inverse does not exist are
skipped.  The second factor of every product carries conj(chi), as produced by
expanding |.|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .modp import DirichletCharacter, divisors, mobius

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SumParameters:
    """Discrete parameters of one tuple; q = q1 q2 and q' = q1 q2'."""

    chi: DirichletCharacter
    n: int = 1
    n_p: int = 1
    l: int = 1
    l_p: int = 1
    q1: int = 1
    q2: int = 1
    q2p: int = 1
    n1: int = 1
    n2: int = 0
    r: int = 1
    u: int = 0
    a: int = 1

    @property
    def p(self) -> int:
        return self.chi.p

    @property
    def q(self) -> int:
        return self.q1 * self.q2

    @property
    def qp(self) -> int:
        return self.q1 * self.q2p

    def coefficient(self, primed: bool = False) -> int:
        """n * inv(q^2 l) mod p (or the primed version)."""
        p = self.p
        n, l, q = (self.n_p, self.l_p, self.qp) if primed else (self.n, self.l, self.q)
        if q % p == 0 or l % p == 0:
            raise ValueError("need p coprime to q and l")
        return n * pow(q * q * l, -1, p) % p


def _e(x, m):
    return np.exp(TWO_PI * 1j * (np.asarray(x) % m) / m)


def _inv_table(p: int) -> np.ndarray:
    return np.array([0] + [pow(k, -1, p) for k in range(1, p)], dtype=np.int64)


def _ramanujan_f(value: int, q: int) -> int:
    """sum_{d | q, d | value} d mu(q/d)."""
    return sum(d * mobius(q // d) for d in divisors(q) if value % d == 0)


def t_values(chi: DirichletCharacter, c: int) -> np.ndarray:
    """T_u(c) for u = 0..p-1."""
    p = chi.p
    inv = _inv_table(p)
    u = np.arange(p)[:, None]
    b = np.arange(p)[None, :]
    diff = (u - b) % p
    terms = chi.values[b] * _e(c * inv[diff], p)
    terms[diff == 0] = 0.0
    return terms.sum(axis=1)


def twisted(T: np.ndarray, k, p: int) -> np.ndarray:
    """F(k) = sum_{u != 0} T_u e(k inv(u) / p) for an array of k."""
    inv = _inv_table(p)[1:]
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    return _e(np.outer(k, inv), p) @ T[1:]


def exponent_fit(samples) -> tuple[float, float, float]:
    """Least-squares slope, intercept and r^2 of log value against log p."""
    samples = list(samples)
    if len({s[0] for s in samples}) < 4:
        raise ValueError("need at least 4 distinct primes")
    x = np.log([float(s[0]) for s in samples])
    y = np.log([float(s[1]) for s in samples])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return float(slope), float(intercept), r2


# ---- C_1 and the C_2 rearrangement ------------------------------------------------


def c1_inner(P: SumParameters) -> complex:
    """sum_b chi(b) e(n inv(a p + (u - b) q) / (p q)); uninvertible terms skipped."""
    p, q = P.p, P.q
    if q % p == 0:
        raise ValueError("need p not dividing q")
    pq = p * q
    total = 0j
    for b in range(p):
        x = (P.a * p + (P.u - b) * q) % pq
        if math.gcd(x, pq) != 1:
            continue
        total += P.chi.values[b] * complex(_e(P.n * pow(x, -1, pq), pq))
    return total


def _kloosterman_row(xs, y: int, m: int) -> np.ndarray:
    """S(x, y; m) for an array of x."""
    k = np.array([k for k in range(m) if math.gcd(k, m) == 1], dtype=np.int64)
    if m == 1:
        return np.ones(len(xs))
    kinv = np.array([pow(int(v), -1, m) for v in k], dtype=np.int64)
    ph = (np.outer(np.asarray(xs, dtype=np.int64), k) + y * kinv[None, :]) % m
    return np.cos(TWO_PI * ph / m).sum(axis=1)


def _c2_setup(P: SumParameters):
    p, q, r, n1 = P.p, P.q, P.r, P.n1
    if math.gcd(q, p) != 1 or math.gcd(P.l, p * q) != 1:
        raise ValueError("need (p, q) = 1 and (l, pq) = 1")
    if (p * q * r) % n1:
        raise ValueError("n1 must divide pqr")
    N = P.n * pow(P.l, -1, p * q) % (p * q)  # n * lbar
    return p, q, r, n1, p * q * r // n1, N


def c2_direct(P: SumParameters) -> complex:
    """sum_u sum*_a S(r inv(ap + uq), n2; pqr/n1) C_1(n lbar, a, q, u)."""
    p, q, r, n1, m, N = _c2_setup(P)
    pq = p * q
    total = 0j
    for u in range(p):
        for a in range(q):
            if math.gcd(a, q) != 1:
                continue
            d = (a * p + u * q) % pq
            if math.gcd(d, pq) != 1:
                continue
            S = _kloosterman_row([r * pow(d, -1, pq) % m], P.n2, m)[0]
            c1 = c1_inner(SumParameters(P.chi, n=N, q1=1, q2=q, u=u, a=a))
            total += S * c1
    return total


def s_tilde(P: SumParameters, alpha, N: int) -> np.ndarray:
    """S~(alpha, N, q) = sum_b chi(b) sum_{u != b} e(qbar^2 (n1 alpha ubar + N inv(u-b)) / p)."""
    p = P.p
    qb2 = pow(P.q * P.q, -1, p)
    T = t_values(P.chi, qb2 * N % p)
    return twisted(T, qb2 * P.n1 * np.asarray(alpha) % p, p)


def c2_reduced(P: SumParameters) -> complex:
    """sum*_{alpha (pqr/n1)} f(alpha, n lbar, q) S~(alpha, n lbar, q) e(abar n2 n1 / (pqr))."""
    p, q, r, n1, m, N = _c2_setup(P)
    alphas = [a for a in range(m) if math.gcd(a, m) == 1]
    f = np.array([_ramanujan_f(n1 * a + N, q) for a in alphas], dtype=float)
    st = s_tilde(P, np.array(alphas) % p, N)
    ph = _e(np.array([pow(a, -1, m) * P.n2 for a in alphas]), m)
    return complex(np.sum(f * st * ph))


def c2_identity_check(P: SumParameters) -> tuple[complex, complex]:
    if P.p > 13 or P.q > 12 or P.r > 3:
        raise ValueError("c2_identity_check is limited to p <= 13, q <= 12, r <= 3")
    return c2_direct(P), c2_reduced(P)


# ---- the Cauchy-Poisson sum and its factors -----------------------------------------


def _a_side(P: SumParameters, primed: bool):
    """alpha mod p -> sum_{u != 0} T_u(c) e(n1 alpha inv(u q^2) / p), as a length-p table."""
    p = P.p
    q = P.qp if primed else P.q
    T = t_values(P.chi, P.coefficient(primed))
    return twisted(T, P.n1 * pow(q * q, -1, p) * np.arange(p) % p, p)


def _moduli(P: SumParameters):
    p, r, n1 = P.p, P.r, P.n1
    if (p * P.q * r) % n1 or (p * P.qp * r) % n1:
        raise ValueError("n1 must divide pqr and pq'r")
    m = p * P.q * r // n1
    mp = p * P.qp * r // n1
    L = p * r * P.q2 * P.q2p * P.q1 // n1
    return m, mp, L


def _nlbar(P: SumParameters, primed: bool, modulus: int) -> int:
    n, l = (P.n_p, P.l_p) if primed else (P.n, P.l)
    return n * pow(l, -1, modulus) % modulus if modulus > 1 else 0


def big_C_direct(P: SumParameters) -> complex:
    """The Cauchy-Poisson character sum, with alpha' solved from alpha.

    q2 ibar(alpha') = q2' ibar(alpha) - n2 (mod L) fixes ibar(alpha') mod pq'r/n1
    as R/q2 whenever q2 | R; so the double alpha-sum is a single loop.
    """
    m, mp, L = _moduli(P)
    A = _a_side(P, False)
    B = np.conj(_a_side(P, True))
    Nq = _nlbar(P, False, P.q)
    Nqp = _nlbar(P, True, P.qp)
    total = 0j
    for alpha in range(m):
        if math.gcd(alpha, m) != 1:
            continue
        R = (P.q2p * pow(alpha, -1, m) - P.n2) % L
        if R % P.q2:
            continue
        beta = (R // P.q2) % mp
        if math.gcd(beta, mp) != 1:
            continue
        alpha_p = pow(beta, -1, mp) if mp > 1 else 0
        w = _ramanujan_f(P.n1 * alpha + Nq, P.q) * _ramanujan_f(P.n1 * alpha_p + Nqp, P.qp)
        if w:
            total += w * A[alpha % P.p] * B[alpha_p % P.p]
    return complex(total)


def big_C_slow(P: SumParameters) -> complex:
    """Full (alpha, alpha', d, d', u, u', b, b') enumeration; test oracle for tiny p."""
    p = P.p
    m, mp, L = _moduli(P)
    inv = _inv_table(p)
    c, cp = P.coefficient(False), P.coefficient(True)
    qi, qpi = pow(P.q * P.q, -1, p), pow(P.qp * P.qp, -1, p)
    u, up, b, bp = np.meshgrid(*(np.arange(p),) * 4, indexing="ij")
    valid = (u != b) & (up != bp) & (u != 0) & (up != 0)
    chi, chib = P.chi.values, np.conj(P.chi.values)
    base = chi[b] * chib[bp] * _e(c * inv[(u - b) % p] - cp * inv[(up - bp) % p], p) * valid
    Nq, Nqp = _nlbar(P, False, P.q), _nlbar(P, True, P.qp)
    total = 0j
    for alpha in (a for a in range(m) if math.gcd(a, m) == 1):
        for alpha_p in (a for a in range(mp) if math.gcd(a, mp) == 1):
            if (P.q2p * pow(alpha, -1, m) - P.q2 * pow(alpha_p, -1, mp) - P.n2) % L:
                continue
            w = 0
            for d in divisors(P.q):
                for dp in divisors(P.qp):
                    if (P.n1 * alpha + Nq) % d == 0 and (P.n1 * alpha_p + Nqp) % dp == 0:
                        w += d * dp * mobius(P.q // d) * mobius(P.qp // dp)
            if w:
                ph = _e(P.n1 * alpha * inv[u] * qi - P.n1 * alpha_p * inv[up] * qpi, p)
                total += w * np.sum(base * ph)
    return complex(total)


def crt_compatible(P: SumParameters) -> bool:
    """p, r q1/n1 and q2 (resp. q2') pairwise coprime, so the alpha-sums split by CRT."""
    if (P.r * P.q1) % P.n1:
        return False
    K = P.r * P.q1 // P.n1
    parts = (P.p, K, P.q2 * P.q2p)
    return (all(math.gcd(x, y) == 1 for i, x in enumerate(parts) for y in parts[i + 1:])
            and math.gcd(P.q1, P.q2 * P.q2p) == 1)


def c1_block(P: SumParameters) -> complex:
    """The mod-p factor: alpha mod p with q2' ibar(alpha) - q2 ibar(alpha') = n2 (p)."""
    p = P.p
    A = _a_side(P, False)
    B = np.conj(_a_side(P, True))
    q2i = pow(P.q2, -1, p)
    total = 0j
    for alpha in range(1, p):
        beta = (P.q2p * pow(alpha, -1, p) - P.n2) * q2i % p
        if beta:
            total += A[alpha] * B[pow(beta, -1, p)]
    return complex(total)


def _block_count(P: SumParameters, K: int, Kp: int, mod: int, qq: int, qqp: int, signed: bool,
                 direct: bool = False) -> int:
    """sum_{d|qq, d'|qqp} d d' [mu mu] #{alpha (K), alpha' (Kp) : conditions, constraint mod `mod`}."""
    Nq, Nqp = _nlbar(P, False, qq), _nlbar(P, True, qqp)
    units = [a for a in range(K) if math.gcd(a, K) == 1]
    units_p = [a for a in range(Kp) if math.gcd(a, Kp) == 1]
    pairs = []
    for alpha in units:
        ai = pow(alpha, -1, K) if K > 1 else 0
        if direct:
            for ap in units_p:
                api = pow(ap, -1, Kp) if Kp > 1 else 0
                if (P.q2p * ai - P.q2 * api - P.n2) % mod == 0:
                    pairs.append((alpha, ap))
            continue
        # q2 * beta = R (mod mod); the solution set is a coset of mod/g
        R = (P.q2p * ai - P.n2) % mod
        g = math.gcd(P.q2, mod)
        if R % g:
            continue
        step = mod // g
        base = (R // g) * pow(P.q2 // g, -1, step) % step if step > 1 else 0
        for beta in sorted({(base + j * step) % Kp for j in range(g)} if Kp > 1 else {0}):
            if math.gcd(beta, Kp) == 1:
                pairs.append((alpha, pow(beta, -1, Kp) if Kp > 1 else 0))

    def weight(value, q):
        return sum(d * (mobius(q // d) if signed else 1) for d in divisors(q) if value % d == 0)

    return sum(weight(P.n1 * a + Nq, qq) * weight(P.n1 * ap + Nqp, qqp) for a, ap in pairs)


def c2_block(P: SumParameters, signed: bool = False, direct: bool = False) -> int:
    K = P.r * P.q1 // P.n1
    return _block_count(P, K, K, K, P.q1, P.q1, signed, direct)


def c3_block(P: SumParameters, signed: bool = False, direct: bool = False) -> int:
    return _block_count(P, P.q2, P.q2p, P.q2 * P.q2p, P.q2, P.q2p, signed, direct)


@dataclass(frozen=True)
class DivisorBlock:
    c2: int
    c2_bound: float
    c3: int
    c3_bound: int


def c3_divisor_block(P: SumParameters) -> DivisorBlock:
    """Counts of the two non-p factors and the bounds they are compared against."""
    c3_bound = 0
    g1 = math.gcd(P.q2, P.q2p * P.n1 * P.l + P.n * P.n2)
    g2 = math.gcd(P.q2p, P.q2 * P.n1 * P.l_p + P.n_p * P.n2)
    c3_bound = sum(divisors(g1)) * sum(divisors(g2))
    return DivisorBlock(c2_block(P), P.q1**3 * P.r / P.n1, c3_block(P), c3_bound)


# ---- gamma substitution ---------------------------------------------------------------


def _offdiag_coeffs(P: SumParameters):
    p = P.p
    if P.n2 % p == 0:
        raise ValueError("the gamma form needs p not dividing n2")
    q2 = P.q2 % p
    n2i = pow(P.n2, -1, p)
    ka = P.n1 * P.q2p * n2i * pow(P.q * P.q, -1, p) % p  # coefficient of (1 - gbar q2) ubar
    kb = P.n1 * n2i * pow(P.qp * P.qp, -1, p) % p  # coefficient of (gamma - q2) ubar'
    return p, q2, ka, kb


def c1_offdiag(P: SumParameters) -> complex:
    """C_1 after gamma = q2 + n2 alpha': sum over gamma != 0, q2, in O(p^2)."""
    p, q2, ka, kb = _offdiag_coeffs(P)
    T = t_values(P.chi, P.coefficient(False))
    Tp = np.conj(t_values(P.chi, P.coefficient(True)))
    gam = np.array([g for g in range(1, p) if g != q2], dtype=np.int64)
    gi = _inv_table(p)[gam]
    left = twisted(T, ka * (1 - gi * q2) % p, p)
    right = twisted(Tp, -kb * (gam - q2) % p, p)
    return complex(np.sum(left * right))


def c1_offdiag_pre(P: SumParameters) -> complex:
    """Pre-substitution form, by enumeration over (alpha, u, u', b, b')."""
    p = P.p
    if P.n2 % p == 0:
        raise ValueError("needs p not dividing n2")
    inv = _inv_table(p)
    c, cp = P.coefficient(False), P.coefficient(True)
    qi, qpi = pow(P.q * P.q, -1, p), pow(P.qp * P.qp, -1, p)
    u, up, b, bp = np.meshgrid(*(np.arange(p),) * 4, indexing="ij")
    valid = (u != b) & (up != bp) & (u != 0) & (up != 0)
    base = P.chi.values[b] * np.conj(P.chi.values[bp]) * _e(c * inv[(u - b) % p] - cp * inv[(up - bp) % p], p)
    base = base * valid
    total = 0j
    for alpha in range(1, p):
        beta = (P.q2p * inv[alpha] - P.n2) * pow(P.q2, -1, p) % p
        if beta == 0:
            continue
        alpha_p = inv[beta]
        total += np.sum(base * _e(P.n1 * alpha * inv[u] * qi - P.n1 * alpha_p * inv[up] * qpi, p))
    return complex(total)


def c1_offdiag_gamma_direct(P: SumParameters) -> complex:
    """The gamma form with the explicit phase h(gamma, u, u', m, m'), m = inv(u - b)."""
    p, q2, ka, kb = _offdiag_coeffs(P)
    inv = _inv_table(p)
    c, cp = P.coefficient(False), P.coefficient(True)
    u, up, b, bp = np.meshgrid(*(np.arange(p),) * 4, indexing="ij")
    valid = (u != b) & (up != bp) & (u != 0) & (up != 0)
    m, mp = inv[(u - b) % p], inv[(up - bp) % p]
    weight = P.chi.values[b] * np.conj(P.chi.values[bp]) * valid
    total = 0j
    for g in range(1, p):
        if g == q2:
            continue
        h = c * m - cp * mp + ka * (1 - inv[g] * q2) * inv[u] - kb * (g - q2) * inv[up]
        total += np.sum(weight * _e(h, p))
    return complex(total)


def gamma_q2_term(P: SumParameters) -> complex:
    """The gamma = q2 term; both ubar coefficients vanish, so u, u' run over all residues."""
    T = t_values(P.chi, P.coefficient(False))
    Tp = np.conj(t_values(P.chi, P.coefficient(True)))
    return complex(T.sum() * Tp.sum())


def c1_zero_frequency(P: SumParameters) -> complex:
    """C_1 at n2 = 0 mod p: the alpha-sum forces u' q2'^3 = u q2^3 (mod p)."""
    p = P.p
    if P.n2 % p:
        raise ValueError("needs n2 = 0 mod p")
    T = t_values(P.chi, P.coefficient(False))
    Tp = np.conj(t_values(P.chi, P.coefficient(True)))
    ratio = P.q2**3 * pow(P.q2p**3, -1, p) % p
    u = np.arange(1, p)
    forced = p * np.sum(T[u] * Tp[u * ratio % p])
    return complex(forced - T[1:].sum() * Tp[1:].sum())


# ---- zero-frequency sums ----------------------------------------------------------------


def c_zero_u(P: SumParameters, direct: bool = False) -> complex:
    """sum_u sum_{b, b'} chi(b) conj chi(b') e(c (inv(u-b) - inv(u-b')) / p) = sum_u |T_u(c)|^2."""
    c = P.coefficient(False)
    if c == 0:
        raise ValueError("needs p not dividing n q l")
    if not direct:
        return complex(np.sum(np.abs(t_values(P.chi, c)) ** 2))
    p = P.p
    inv = _inv_table(p)
    u, b, bp = np.meshgrid(*(np.arange(p),) * 3, indexing="ij")
    valid = (u != b) & (u != bp)
    terms = P.chi.values[b] * np.conj(P.chi.values[bp]) * _e(c * (inv[(u - b) % p] - inv[(u - bp) % p]), p)
    return complex(np.sum(terms * valid))


def c_tilde(P: SumParameters, direct: bool = False, conjugate_second: bool = False) -> complex:
    """sum_u (sum_b chi(b) e(c inv(u-b)/p)) (sum_b' chi(b') e(-c' inv(u-b')/p)).

    c = n inv(q^2 l), c' = n' inv(q'^2 l').  With conjugate_second the second
    factor carries conj chi(b') instead; that variant collapses to exactly
    -(p + 1) by orthogonality whenever c != c'.
    """
    p = P.p
    if (P.n * pow(P.l, -1, p) - P.n_p * pow(P.l_p, -1, p)) % p == 0:
        raise ValueError("needs p not dividing n lbar - n' lbar'")
    c, cp = P.coefficient(False), P.coefficient(True)
    chi2 = np.conj(P.chi.values) if conjugate_second else P.chi.values
    if not direct:
        first = t_values(P.chi, c)
        second = np.conj(t_values(P.chi, cp)) if conjugate_second else t_values(P.chi, -cp % p)
        return complex(np.sum(first * second))
    inv = _inv_table(p)
    u, b, bp = np.meshgrid(*(np.arange(p),) * 3, indexing="ij")
    valid = (u != b) & (u != bp)
    terms = P.chi.values[b] * chi2[bp] * _e(c * inv[(u - b) % p] - cp * inv[(u - bp) % p], p)
    return complex(np.sum(terms * valid))


# ---- seeded scans ------------------------------------------------------------------------


def random_parameters(p: int, rng: np.random.Generator, principal: bool = False) -> SumParameters:
    """Residue-level tuple: every parameter a random unit mod p, q1 = 1."""
    from .modp import character

    chi = character(p, 0 if principal else int(rng.integers(1, p - 1)))
    unit = lambda: int(rng.integers(1, p))
    return SumParameters(chi, n=unit(), n_p=unit(), l=unit(), l_p=unit(), q2=unit(), q2p=unit(),
                         n1=unit(), n2=unit())


SCANNED = {
    "c_tilde": c_tilde,
    "c_zero_u": c_zero_u,
    "c1_offdiag": c1_offdiag,
}


def scan_max(kind: str, p: int, tuples: int, seed: int) -> float:
    """max |sum| over seeded tuples at one prime (tuples violating a precondition are redrawn)."""
    fn = SCANNED[kind]
    rng = np.random.default_rng([seed, p])
    best, done = 0.0, 0
    while done < tuples:
        P = random_parameters(p, rng)
        if kind == "c_tilde":
            P = SumParameters(P.chi, n=P.n, n_p=P.n_p, l=P.l, l_p=P.l_p, q2=P.q2, q2p=P.q2)
        try:
            value = fn(P)
        except ValueError:
            continue
        best = max(best, abs(value))
        done += 1
    return best


def cancellation_exponents(primes, tuples: int = 50, seed: int = 0) -> dict:
    """Fitted slope of log max|sum| against log p for each scanned sum."""
    out = {}
    for kind in SCANNED:
        samples = [(p, scan_max(kind, p, tuples, seed)) for p in primes]
        slope, intercept, r2 = exponent_fit(samples)
        out[kind] = {"samples": samples, "slope": slope, "intercept": intercept, "r2": r2}
    return out
