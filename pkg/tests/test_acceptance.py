"""The twelve end-to-end acceptance criteria; each test prints one PASS/FAIL line."""

import math
import random
import time
from dataclasses import replace

import numpy as np
import pytest

from sublab import cli, expsums as es, pipeline as pl
from sublab import arithfns as af
from sublab import voronoi as vo
from sublab.arithfns import CoefficientTable
from sublab.deltasym import DeltaScheme, delta_eval
from sublab.modp import character, kloosterman_table, primes_in
from sublab.oscillatory import integrals as oi
from sublab.oscillatory.gl3 import (ChirpedBump, TransformSpec, g3_transform_contour, li_expansion,
                                    relative_gap, stationary_chirp)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return emit


def test_criterion_01_delta_indicator(report):
    start = time.perf_counter()
    worst = 0.0
    for M in (25, 50, 100):
        scheme = DeltaScheme(M)
        worst = max(worst, max(abs(delta_eval(scheme, n) - (n == 0)) for n in range(-2 * M, 2 * M + 1)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 5.0
    assert report(1, ok, f"max |delta - indicator| = {worst:.2e}, {elapsed:.2f} s")


def test_criterion_02_hecke_and_mass_transform(report):
    bad = 0
    for l in primes_in(2, 13):
        for pr in primes_in(2, 13):
            for a in range(5):
                for b in range(5):
                    lhs, rhs = af.hecke_triple(l, pr**a, pr**b)
                    bad += lhs != rhs
    table = CoefficientTable("lambda_min", 2 * 10**4 * 13 + 130)
    rng = random.Random(2)
    for _ in range(200):
        lhs, rhs = af.hecke_triple(rng.choice(primes_in(2, 13)), rng.randint(1, 500), rng.randint(1, 500), table)
        bad += lhs != rhs
    coeff2 = CoefficientTable("d2", 2 * 10**4)
    chi = character(11, 1)
    cases = 0
    for l in primes_in(2, 13):
        for r in range(1, 11):
            if r % l == 0:
                continue
            for N in (1, 10, 100, 1000, 10**4):
                lhs, rhs = pl.mass_transform_check(l, r, N, chi, table, coeff2)
                bad += lhs != rhs
                cases += 1
    assert report(2, bad == 0, f"{bad} mismatches; Hecke grid + 200 random, {cases} mass-transform cases")


def test_criterion_03_gl2_voronoi(report):
    start = time.perf_counter()
    worst, count = 0.0, 0
    for kind in ("tau", "d"):
        for q in (1, 2, 3, 5):
            for X in (200.0, 500.0):
                worst = max(worst, vo.gl2_voronoi_residual(vo.VoronoiInstance(kind, max(1, q - 1), q, X))[2])
                count += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 120
    assert report(3, ok, f"max residual {worst:.2e} over {count} instances, {elapsed:.1f} s")


def test_criterion_04_gl3_transform(report):
    X, gaps = 50.0, []
    spec = TransformSpec()
    for yX in (1e3, 1e4, 1e5, 1e6):
        y = yX / X
        fn = ChirpedBump(X, stationary_chirp(y, X))
        gaps.append(relative_gap(g3_transform_contour(spec, fn, y), li_expansion(spec, fn, y, K=4)))
    ok = max(gaps) <= 0.05
    assert report(4, ok, "relative gaps " + ", ".join(f"{g:.1e}" for g in gaps))


def test_criterion_05_truncations(report):
    inband = max(abs(oi.gl2_j_integral(oi.declared_point(n_scale=k))) for k in (1.5, 2.5, 4.0))
    gl2 = max(abs(oi.gl2_j_integral(oi.declared_point(n_scale=k))) for k in (1e-2, 1e2)) / inband
    thresholds = {}
    for p in (101, 1009):
        pr = oi.declared_point(p=p, q=1)
        pr = replace(pr, L=float(pr.l))
        thresholds[p] = vo.gl3_truncation_scan(pr, xs=np.linspace(-1, 1, 41))["threshold_over_M0"]
    jdecay = float(oi.j_decay_scan(101)["ratios"][0])
    parts = {
        "gl2 out/in-band": gl2 <= 1e-6,
        "gl3 threshold in [M0/4, 4 M0]": all(0.25 <= t <= 4.0 for t in thresholds.values()),
        "J beyond N2*": jdecay <= 1e-6,
    }
    detail = (f"gl2 ratio {gl2:.1e}; gl3 threshold/M0 " + ", ".join(f"p={p}: {t:.2f}" for p, t in thresholds.items())
              + f"; J ratio {jdecay:.1e}; failing: {[k for k, v in parts.items() if not v] or 'none'}")
    assert report(5, all(parts.values()), detail)


def _c2_tuples(p, count, rng):
    out = []
    while len(out) < count:
        q = rng.randint(1, 12)
        if q % p == 0:
            continue
        r = rng.randint(1, 3)
        n1 = rng.choice(es.divisors(p * q * r))
        l = rng.choice([k for k in range(2, 60) if math.gcd(k, p * q) == 1])
        out.append(es.SumParameters(character(p, rng.randint(0, p - 2)), n=rng.randint(1, 500), l=l, q2=q,
                                    n1=n1, n2=rng.randint(-30, 60), r=r))
    return out


def _rel(a, b, floor):
    return abs(a - b) / max(abs(a), abs(b), floor)


def test_criterion_06_character_sum_algebra(report):
    rng = random.Random(6)
    worst_c2 = worst_off = worst_big = 0.0
    n_c2 = n_off = 0
    for p in (7, 11, 13):
        for P in _c2_tuples(p, 20, rng):
            worst_c2 = max(worst_c2, _rel(*es.c2_identity_check(P), 1.0))
            n_c2 += 1
        nrng = np.random.default_rng([6, p])
        for _ in range(20):
            P = es.random_parameters(p, nrng)
            worst_off = max(worst_off, _rel(es.c1_offdiag(P), es.c1_offdiag_pre(P), p**2.5 * 1e-3))
            n_off += 1
    brng = np.random.default_rng(5)
    n_big = 0
    while n_big < 20:
        q1, q2 = [(1, 6), (2, 3), (1, 3), (2, 1)][n_big % 4]
        P = es.SumParameters(character(5, int(brng.integers(1, 4))), n=int(brng.integers(1, 40)),
                             n_p=int(brng.integers(1, 40)), l=7, l_p=11, q1=q1, q2=q2, q2p=q2,
                             n1=int(brng.choice([1, 2, 3])), n2=int(brng.integers(0, 40)), r=int(brng.choice([1, 2, 3])))
        try:
            fast = es.big_C_direct(P)
        except ValueError:
            continue
        worst_big = max(worst_big, _rel(fast, es.big_C_slow(P), 1.0))
        n_big += 1
    ok = max(worst_c2, worst_off, worst_big) <= 1e-8
    assert report(6, ok, f"C2 {worst_c2:.1e} ({n_c2}), offdiag {worst_off:.1e} ({n_off}), "
                         f"big C at p=5 {worst_big:.1e} ({n_big})")


def test_criterion_07_cancellation_exponents(report):
    start = time.perf_counter()
    res = es.cancellation_exponents(primes_in(11, 61), tuples=50, seed=0)
    elapsed = time.perf_counter() - start
    s = {k: v["slope"] for k, v in res.items()}
    ok = 1.3 <= s["c_tilde"] <= 1.7 and s["c_zero_u"] <= 2.15 and s["c1_offdiag"] <= 2.65 and elapsed < 600
    assert report(7, ok, ", ".join(f"{k} {v:.3f}" for k, v in s.items()) + f", {elapsed:.1f} s")


def test_criterion_08_weil_bound(report):
    worst = 0.0
    for p in primes_in(3, 101):
        t = kloosterman_table(p)
        t[0, 0] = 0.0  # S(0, 0; p) = p - 1 is the one excluded entry
        worst = max(worst, float(np.abs(t).max()) / (2 * math.sqrt(p)))
    assert report(8, worst <= 1 + 1e-12, f"max |S(a,b;p)| / 2 sqrt(p) = {worst:.6f}")


def test_criterion_09_oscillatory_bound(report):
    grid = oi.big_I_grid(seed=0, points=50)
    mo, rho = grid["max_over_reference"], grid["spearman_p"]
    ok = len(grid["records"]) == 50 and mo <= 10 and rho <= 0.5
    assert report(9, ok, f"max/reference {mo:.3f}, spearman in p {rho:.3f}")


def test_criterion_10_exponent_optimizer(report):
    amp, split, value = pl.minimax_exponents(pl.BOUND_FORMS)
    rep = pl.theorem_exponent_report(amp, split, value)
    from fractions import Fraction as Fr
    ok = (amp, split, value) == (Fr(1, 4), Fr(1, 4), Fr(23, 16)) and \
        (rep["gl3xgl2"], rep["gl3"], rep["gl2"]) == (Fr(23, 16), Fr(23, 32), Fr(23, 48))
    assert report(10, ok, f"({amp}, {split}, {value}); exponents {rep['gl3xgl2']}, {rep['gl3']}, {rep['gl2']}")


def test_criterion_11_pipeline_cancellation(report):
    start = time.perf_counter()
    _, fit = pl.cancellation_scan(1009)
    _, pfit = pl.cancellation_scan(1009, principal=True)
    elapsed = time.perf_counter() - start
    ok = fit[0] <= 0.9 and pfit[0] >= 0.95 and elapsed < 300
    assert report(11, ok, f"N-exponent {fit[0]:.3f} (principal {pfit[0]:.3f}), {elapsed:.1f} s")


REPRO = {
    "delta-verify": "M = 25\n",
    "voronoi-verify": "",
    "charsum-scan": "p_min = 11\np_max = 23\nsamples = 5\nseed = 9\n",
    "oscillatory-scan": "samples = 8\nseed = 3\n",
    "mass-transform": "L = 5\nr = 4\nN = 1000\n",
    "cancellation-scan": "p_min = 101\np_max = 101\nN_max = 1e4\npoints = 5\n",
    "optimize-exponents": "",
}


def test_criterion_12_reproducibility(report, tmp_path):
    assert set(REPRO) == set(cli.EXPERIMENTS)
    same = []
    for name, text in REPRO.items():
        cfg = tmp_path / f"{name}.cfg"
        cfg.write_text(text)
        blobs = []
        for k in (1, 2):
            out = tmp_path / f"{name}.{k}.csv"
            cli.main([name, "--config", str(cfg), "--out", str(out)])
            blobs.append(out.read_bytes())
        same.append(blobs[0] == blobs[1] and len(blobs[0]) > 0)
    assert report(12, all(same), f"{sum(same)}/{len(same)} experiments byte-identical on rerun")
