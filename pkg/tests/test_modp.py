import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sublab import modp


def test_mod_inverse_examples():
    assert modp.mod_inverse(3, 7) == 5
    assert modp.mod_inverse(1, 11) == 1
    with pytest.raises(ValueError, match="not invertible"):
        modp.mod_inverse(6, 9)


@given(st.integers(2, 10**6), st.integers(-10**9, 10**9))
def test_mod_inverse_random(c, a):
    if math.gcd(a, c) != 1:
        return
    b = modp.mod_inverse(a, c)
    assert 0 <= b < c and (a * b) % c == 1


def test_unit_exp():
    assert modp.unit_exp(0, 5) == pytest.approx(1)
    assert modp.unit_exp(1, 2) == pytest.approx(-1)
    assert modp.unit_exp(2, 5) == pytest.approx(complex(math.cos(4 * math.pi / 5), math.sin(4 * math.pi / 5)))


def test_prime_modulus_validation():
    with pytest.raises(ValueError):
        modp.PrimeModulus(9)
    with pytest.raises(ValueError):
        modp.PrimeModulus(2)
    g = modp.PrimeModulus(23).primitive_root
    assert len({pow(g, j, 23) for j in range(22)}) == 22


def test_is_prime_against_sieve():
    sieve = [True] * 5000
    sieve[0] = sieve[1] = False
    for i in range(2, 71):
        for j in range(i * i, 5000, i):
            sieve[j] = False
    assert [modp.is_prime(n) for n in range(5000)] == sieve


def test_quadratic_character_mod7():
    chi = modp.character(7, 3)
    squares = {x * x % 7 for x in range(1, 7)}
    for a in range(1, 7):
        assert chi(a) == (1 if a in squares else -1)
    assert chi(3) == -1 and chi(0) == 0


def test_principal_and_orthogonality():
    for p in (5, 13, 31):
        chi0 = modp.character(p, 0)
        assert chi0.is_principal
        assert np.all(chi0.values[1:] == 1)
    assert abs(modp.character(5, 1).values[1:].sum()) < 1e-12
    with pytest.raises(ValueError):
        modp.character(5, 4)


@pytest.mark.parametrize("p", modp.primes_in(3, 101))
def test_character_multiplicative_exhaustive(p):
    a = np.arange(p)
    prod = (a[:, None] * a[None, :]) % p
    for k in range(p - 1):
        v = modp.character(p, k).values
        assert np.allclose(v[prod], v[:, None] * v[None, :], atol=1e-12)
        assert np.allclose(np.abs(v[1:]), 1)
        assert v[p - 1] == modp.character(p, k).parity


def test_gauss_sum_examples():
    assert modp.gauss_sum(modp.character(5, 2)) == pytest.approx(math.sqrt(5))
    assert modp.gauss_sum(modp.character(7, 0)) == pytest.approx(-1)
    for k in range(1, 6):
        assert abs(modp.gauss_sum(modp.character(7, k))) ** 2 == pytest.approx(7, rel=1e-12)


@pytest.mark.parametrize("p", modp.primes_in(3, 101))
def test_gauss_sum_norm(p):
    for k in range(1, p - 1):
        t = modp.gauss_sum(modp.character(p, k))
        assert abs((t * t.conjugate()).real - p) <= 1e-9 * p


def test_kloosterman_examples():
    assert modp.kloosterman(1, 1, 5) == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-12)
    assert modp.kloosterman(0, 1, 5) == pytest.approx(-1)


def _kloosterman_slow(a, b, c):
    s = sum(cmath.exp(2j * math.pi * (a * x + b * pow(x, -1, c)) / c) for x in range(c) if math.gcd(x, c) == 1)
    return s


def test_kloosterman_symmetric_real_small_c():
    for c in range(1, 51):
        for a in range(c):
            for b in range(a, c):
                s = modp.kloosterman(a, b, c)
                assert s == pytest.approx(modp.kloosterman(b, a, c), abs=1e-9)
    assert modp.kloosterman(3, 7, 20) == pytest.approx(_kloosterman_slow(3, 7, 20).real, abs=1e-9)


@settings(max_examples=40)
@given(st.sampled_from(modp.primes_in(3, 101)), st.data())
def test_kloosterman_table_matches_direct(p, data):
    a = data.draw(st.integers(0, p - 1))
    b = data.draw(st.integers(0, p - 1))
    assert modp.kloosterman_table(p)[a, b] == pytest.approx(modp.kloosterman(a, b, p), abs=1e-9)


def test_weil_bound_exhaustive():
    for p in modp.primes_in(3, 101):
        t = modp.kloosterman_table(p)[1:, 1:]
        assert np.abs(t).max() <= 2 * math.sqrt(p) + 1e-9
