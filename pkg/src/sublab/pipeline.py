"""Smoothed dyadic sums S_r(N), the Hecke mass transform, cancellation scans and
the exponent balancing that fixes the final saving.

S_r(N) = sum_n lambda(r, n) a(n) chi(n) V(n/N), with lambda a GL(3) table
(d_3 / lambda_min) and a(n) a GL(2) table (d, or tau(n)/n^{11/2}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .arithfns import CoefficientTable
from .expsums import exponent_fit
from .modp import DirichletCharacter, character, is_prime, primes_in
from .oscillatory.weights import SmoothWeight
from .records import ExperimentRecord


def _n_range(N: float, V) -> np.ndarray:
    lo, hi = getattr(V, "support", (1.0, 2.0))
    return np.arange(max(1, math.ceil(lo * N)), math.floor(hi * N) + 1, dtype=np.int64)


def _gl3(coeff3: CoefficientTable, r: int, n: np.ndarray) -> np.ndarray:
    if coeff3.kind in ("d3", "lambda_min"):
        return coeff3.lambda_min(r, n) if n.size else np.zeros(0, dtype=np.int64)
    if r != 1:
        raise ValueError(f"{coeff3.kind} table has no r-index")
    return np.asarray(coeff3(n), dtype=np.int64)


def _gl2(coeff2: CoefficientTable, n: np.ndarray) -> np.ndarray:
    if coeff2.kind == "tau":
        return np.array([float(v) for v in coeff2(n)]) / n.astype(float) ** 5.5
    return np.asarray(coeff2(n), dtype=np.int64)


def s_r_n(coeff3: CoefficientTable, coeff2: CoefficientTable, chi: DirichletCharacter, r: int,
          N: float, V=None) -> complex:
    """S_r(N); integer coefficients are multiplied exactly before the chi, V weighting."""
    if N < 1:
        return 0j
    V = SmoothWeight("V") if V is None else V
    n = _n_range(N, V)
    if n.size == 0:
        return 0j
    coeffs = _gl3(coeff3, r, n) * _gl2(coeff2, n)
    return complex(np.sum(coeffs * chi(n) * V(n / N)))


def trivial_bound(coeff3: CoefficientTable, coeff2: CoefficientTable, r: int, N: float, V=None) -> float:
    """sum |lambda(r, n) a(n)| V(n/N), the no-cancellation size for V >= 0."""
    if N < 1:
        return 0.0
    V = SmoothWeight("V") if V is None else V
    n = _n_range(N, V)
    if n.size == 0:
        return 0.0
    return float(np.sum(np.abs(_gl3(coeff3, r, n) * _gl2(coeff2, n)) * V(n / N)))


# ---- mass transform -------------------------------------------------------------


def hecke_rearranged(table: CoefficientTable, l: int, r: int, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """lambda(1, l) lambda(r, n) and lambda(r, nl) + [l | n] lambda(rl, n/l), termwise."""
    lhs = table.lambda_min(1, l) * table.lambda_min(r, n)
    rhs = table.lambda_min(r, n * l)
    hit = n % l == 0
    if hit.any():
        rhs[hit] += table.lambda_min(r * l, n[hit] // l)
    return lhs, rhs


def mass_transform_check(l: int, r: int, N: float, chi: DirichletCharacter,
                         table: CoefficientTable | None = None, coeff2: CoefficientTable | None = None,
                         V=None) -> tuple[complex, complex]:
    """lambda(1, l) S_r(N) against the sum of the rearranged Hecke terms.

    The integer arrays are compared exactly first; ArithmeticError if they differ.
    """
    if not is_prime(l):
        raise ValueError(f"l = {l} must be prime")
    if r % l == 0:
        raise ValueError(f"l = {l} divides r = {r}: the lambda(r/l, n) term is not supported")
    V = SmoothWeight("V") if V is None else V
    n = _n_range(N, V) if N >= 1 else np.zeros(0, dtype=np.int64)
    if n.size == 0:
        return 0j, 0j
    top = int(n[-1])
    table = CoefficientTable("lambda_min", max(top * l, r * l)) if table is None else table
    coeff2 = CoefficientTable("d2", top) if coeff2 is None else coeff2
    lhs, rhs = hecke_rearranged(table, l, r, n)
    if not np.array_equal(lhs, rhs):
        bad = int(n[np.nonzero(lhs != rhs)[0][0]])
        raise ArithmeticError(f"Hecke rearrangement fails at n = {bad} (l = {l}, r = {r})")
    w = _gl2(coeff2, n) * chi(n) * V(n / N)
    return complex(np.sum(lhs * w)), complex(np.sum(rhs * w))


def amplifier_mass(L: int) -> tuple[int, int]:
    """(sum of lambda_min(1, l)^2 over primes l in [L, 2L], number of such primes)."""
    ls = primes_in(L, 2 * L)
    if not ls:
        return 0, 0
    table = CoefficientTable("lambda_min", 2 * L)
    return int(sum(table.lambda_min(1, l) ** 2 for l in ls)), len(ls)


# ---- dyadic plan ------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicPlan:
    p: int
    split: float
    eps: float
    r_max: int
    blocks: tuple[tuple[int, float], ...]
    tail_exponent: float

    def range_for(self, r: int) -> tuple[float, float]:
        return dyadic_range(self.p, self.split, self.eps, r)

    def covers(self) -> bool:
        """Every r in [1, r_max] has blocks [N, 2N] tiling its range without gaps."""
        for r in range(1, self.r_max + 1):
            lo, hi = self.range_for(r)
            Ns = [N for rr, N in self.blocks if rr == r]
            if not Ns or Ns[0] > lo or 2 * Ns[-1] < hi:
                return False
            if any(not math.isclose(b, 2 * a) for a, b in zip(Ns, Ns[1:])):
                return False
        return True


def dyadic_range(p: int, split: float, eps: float, r: int, safety: float = 4.0) -> tuple[float, float]:
    return p ** (3.0 - split) / r**2, safety * p ** (3.0 + eps) / r**2


def dyadic_plan(p: int, split: float, eps: float = 0.0) -> DyadicPlan:
    """r <= p^split (capped at p - 1), each with doubling N-blocks over [p^{3-split}/r^2, 4 p^{3+eps}/r^2]."""
    if not 0 < split < 1:
        raise ValueError("split exponent must lie in (0, 1)")
    r_max = min(int(math.floor(p**split * (1 + 1e-12))), p - 1)
    blocks = []
    for r in range(1, r_max + 1):
        lo, hi = dyadic_range(p, split, eps, r)
        N = lo
        while N < hi:
            blocks.append((r, N))
            N *= 2.0
    return DyadicPlan(p, split, eps, r_max, tuple(blocks), (3.0 - split) / 2.0)


# ---- cancellation scans ----------------------------------------------------------

_TABLES: dict[tuple[str, int], CoefficientTable] = {}


def shared_table(kind: str, size: int) -> CoefficientTable:
    """Tables are reused across scans; one covering a larger range serves smaller requests."""
    for (k, n), table in _TABLES.items():
        if k == kind and n >= size:
            return table
    table = CoefficientTable(kind, size)
    _TABLES[(kind, size)] = table
    return table


def scan_character(p: int, principal: bool = False) -> DirichletCharacter:
    """Index-1 character (smallest primitive root), or the principal one."""
    chi = character(p, 0 if principal else 1)
    if not principal and abs(complex(np.sum(chi.values))) > 1e-9 * p:
        raise ArithmeticError(f"character mod {p} does not sum to zero over a period")
    return chi


def default_lengths(lo: float = 1e3, hi: float = 1e6, points: int = 13) -> np.ndarray:
    return np.geomspace(lo, hi, points)


def _scan_name(principal: bool) -> str:
    return "cancellation-scan-principal" if principal else "cancellation-scan"


def cancellation_scan(p: int = 1009, Ns=None, r: int = 1, principal: bool = False,
                      gl2_kind: str = "d2", experiment: str | None = None):
    """|S_r(N)| / N^{1/2} along N at fixed p; returns (records, (slope, intercept, r2)) of |S_r(N)| in N."""
    Ns = default_lengths() if Ns is None else np.asarray(Ns, dtype=float)
    size = int(math.floor(2 * Ns.max())) + 1
    coeff3 = shared_table("lambda_min", max(size, r))
    coeff2 = shared_table(gl2_kind, size)
    chi = scan_character(p, principal)
    experiment = experiment or _scan_name(principal)
    values = [s_r_n(coeff3, coeff2, chi, r, float(N)) for N in Ns]
    fit = exponent_fit([(float(N), abs(v)) for N, v in zip(Ns, values)])
    records = [
        ExperimentRecord.make(experiment, v, math.sqrt(N), p=p, q=1, N=float(N), r=r,
                              tuple_id=i).with_slope(fit[0])
        for i, (N, v) in enumerate(zip(Ns, values))
    ]
    return records, fit


def cancellation_p_scan(primes, ratio: float = 1.0, r: int = 1, principal: bool = False,
                        gl2_kind: str = "d2", experiment: str | None = None):
    """|S_r(N)| at N = ratio * p^3 across primes; fit of |S_r(N)| / N^{1/2} in p."""
    primes = list(primes)
    size = int(math.floor(2 * ratio * max(primes) ** 3)) + 1
    coeff3 = shared_table("lambda_min", max(size, r))
    coeff2 = shared_table(gl2_kind, size)
    experiment = experiment or _scan_name(principal)
    rows = []
    for p in primes:
        N = ratio * p**3
        rows.append((p, N, s_r_n(coeff3, coeff2, scan_character(p, principal), r, N)))
    fit = exponent_fit([(p, abs(v) / math.sqrt(N)) for p, N, v in rows])
    records = [ExperimentRecord.make(experiment, v, math.sqrt(N), p=p, q=1, N=N, r=r,
                                     tuple_id=i).with_slope(fit[0])
               for i, (p, N, v) in enumerate(rows)]
    return records, fit


# ---- exponent balancing --------------------------------------------------------------


@dataclass(frozen=True)
class AffineForm:
    """const + amp * a + split * s, in exact rationals."""

    label: str
    const: Fraction
    amp: Fraction = Fraction(0)
    split: Fraction = Fraction(0)

    def __call__(self, a: Fraction, s: Fraction) -> Fraction:
        return self.const + self.amp * a + self.split * s


@dataclass(frozen=True)
class ExponentProgram:
    """Forms in the amplifier exponent (L = p^a) and the split exponent (r <= p^s), over a box."""

    forms: tuple[AffineForm, ...]
    box: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]] = ((Fraction(0), Fraction(1)),
                                                                         (Fraction(0), Fraction(1)))


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# the four error terms of the final bound, as exponents of p
BOUND_FORMS = ExponentProgram((
    AffineForm("off-diagonal", Fraction(1), Fraction(1), Fraction(1, 2)),
    AffineForm("zero frequency", Fraction(5, 4), Fraction(3, 4)),
    AffineForm("amplifier loss", Fraction(3, 2), Fraction(-1, 4)),
    AffineForm("large r tail", Fraction(3, 2), Fraction(0), Fraction(-1, 2)),
))


def _polygon_vertices(cons):
    """Vertices of {x : c0 x0 + c1 x1 <= rhs for all (c0, c1, rhs) in cons}."""
    pts = set()
    for (a0, a1, ar), (b0, b1, br) in combinations(cons, 2):
        det = a0 * b1 - a1 * b0
        if det == 0:
            continue
        x = (ar * b1 - a1 * br) / det
        y = (a0 * br - ar * b0) / det
        if all(c0 * x + c1 * y <= rhs for c0, c1, rhs in cons):
            pts.add((x, y))
    return sorted(pts)


def minimax_exponents(prog: ExponentProgram) -> tuple[Fraction, Fraction, Fraction]:
    """Exact lexicographic minimax of the forms over the box.

    The first stage gives the minimax value.  Forms that equal it on the whole
    optimal set are then frozen and the rest are minimised again, which picks
    the balanced point when the first stage leaves a segment of optima.
    Ties left at the end go to the lexicographically smallest vertex.
    """
    if not prog.forms:
        raise ValueError("need at least one affine form")
    (alo, ahi), (slo, shi) = prog.box
    if any(v is None or not math.isfinite(v) for v in (alo, ahi, slo, shi)):
        raise ValueError("unbounded program: the box needs finite bounds")
    alo, ahi, slo, shi = map(_frac, (alo, ahi, slo, shi))
    cons = [(Fraction(-1), Fraction(0), -alo), (Fraction(1), Fraction(0), ahi), (Fraction(0), Fraction(-1), -slo), (Fraction(0), Fraction(1), shi)]
    if not _polygon_vertices(cons):
        raise ValueError("empty box")
    free = list(prog.forms)
    value = None
    while free:
        lines = list(cons) + [(f.amp - g.amp, f.split - g.split, g.const - f.const) for f, g in combinations(free, 2)]
        cands = set()
        for (a0, a1, ar), (b0, b1, br) in combinations(lines, 2):
            det = a0 * b1 - a1 * b0
            if det == 0:
                continue
            pt = ((ar * b1 - a1 * br) / det, (a0 * br - ar * b0) / det)
            if all(c0 * pt[0] + c1 * pt[1] <= rhs for c0, c1, rhs in cons):
                cands.add(pt)
        t = min(max(f(*pt) for f in free) for pt in cands)
        value = t if value is None else value
        cons = cons + [(f.amp, f.split, t - f.const) for f in free]
        verts = _polygon_vertices(cons)
        pinned = [f for f in free if min(f(*pt) for pt in verts) == t]
        free = [f for f in free if f not in pinned]
    best = _polygon_vertices(cons)[0]
    return best[0], best[1], value


def theorem_exponent_report(amp: Fraction, split: Fraction, value: Fraction | None = None) -> dict:
    """Exponents of the three central-value bounds implied by the balanced point.

    The degree-six twist gets p^value directly; the GL(3) twist is its square
    root (value / 2) and the GL(2) twist its cube root (value / 3).
    """
    amp, split = _frac(amp), _frac(split)
    if value is None:
        value = max(f(amp, split) for f in BOUND_FORMS.forms)
    value = _frac(value)
    deg6, deg3, deg2 = value, value / 2, value / 3
    return {
        "amplifier": amp,
        "split": split,
        "gl3xgl2": deg6,
        "gl3": deg3,
        "gl2": deg2,
        "savings": (Fraction(3, 2) - deg6, Fraction(3, 4) - deg3, Fraction(1, 2) - deg2),
        "chain": [
            f"max of the error exponents at (a, s) = ({amp}, {split}): {deg6}",
            f"L(1/2, pi x f x chi) << p^({deg6}) = p^(3/2 - {Fraction(3, 2) - deg6})",
            f"L(1/2, pi x chi) << p^({deg6} / 2) = p^(3/4 - {Fraction(3, 4) - deg3})",
            f"L(1/2, f x chi) << p^({deg6} / 3) = p^(1/2 - {Fraction(1, 2) - deg2})",
        ],
    }
