import math
import random
from fractions import Fraction

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqfscan import arith
from sqfscan.arith import (
    Congruence,
    chi_d,
    crt,
    factor,
    height,
    is_prime,
    kronecker,
    ord_p,
    prime_in_ap,
    squarefree_part,
)
from sqfscan.errors import BudgetExhausted


# ---------------------------------------------------------------------------
# factor
# ---------------------------------------------------------------------------


def test_factor_one():
    f = factor(1)
    assert f.sign == 1 and f.factors == ()
    assert f.value() == 1


def test_factor_minus_twelve():
    f = factor(-12)
    assert f.sign == -1
    assert f.factors == ((2, 2), (3, 1))
    assert f.value() == -12


def test_factor_degree8_value():
    n = 2 * 800**8 - 800**6 - 8 * 800**4 - 800**2 + 2
    f = factor(n)
    assert f.value() == n
    for p, e in f.factors:
        assert e >= 1 and arith._is_prime_py(p)


def test_factor_rejects_zero():
    with pytest.raises(ValueError):
        factor(0)


def test_factor_reconstruction_small_range():
    for n in range(1, 20_000):
        assert factor(n).value() == n
        assert factor(-n).value() == -n


def test_factor_reconstruction_sampled_up_to_1e6():
    rng = random.Random(11)
    for _ in range(4000):
        n = rng.randint(1, 10**6)
        assert factor(n).value() == n


def test_factor_reconstruction_random_80bit():
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(2**70, 2**80)
        f = factor(n)
        assert f.value() == n
        assert all(is_prime(p) for p, _ in f.factors)


def test_factor_reconstruction_random_128bit():
    # full 128-bit factorizations exercise the pure-Python rho path; the
    # sample is kept small because secondary factors near 2^60 are slow
    rng = random.Random(7)
    for _ in range(12):
        n = rng.randint(2**120, 2**128)
        f = factor(n)
        assert f.value() == n
        assert all(arith._is_prime_py(p) for p, _ in f.factors)


def test_factor_deterministic():
    n = 2**77 - 3
    assert factor(n) == factor(n)


def test_factor_pure_path_agrees_with_fast_path():
    if arith._ff is None:
        pytest.skip("C extension unavailable")
    rng = random.Random(13)
    for _ in range(200):
        n = rng.randint(2, 2**64)
        fast = factor(n)
        out: dict = {}
        arith._factor_into(n, 1, out)
        assert tuple(sorted(out.items())) == fast.factors


# ---------------------------------------------------------------------------
# squarefree part
# ---------------------------------------------------------------------------


def test_squarefree_part_examples():
    assert squarefree_part(4) == 1
    assert squarefree_part(-8) == -2
    assert squarefree_part(Fraction(18, 25)) == 2
    assert Fraction(18, 25) / 2 == Fraction(3, 5) ** 2


def test_squarefree_part_rejects_zero():
    with pytest.raises(ValueError):
        squarefree_part(0)


def test_squarefree_part_invariant_under_squares():
    rng = random.Random(23)
    for _ in range(1000):
        r = Fraction(rng.randint(-500, 500) or 7, rng.randint(1, 500))
        s = Fraction(rng.randint(-60, 60) or 3, rng.randint(1, 60))
        assert squarefree_part(r * s * s) == squarefree_part(r)


def test_squarefree_part_output_is_squarefree_and_quotient_square():
    rng = random.Random(29)
    for _ in range(500):
        r = Fraction(rng.randint(-10**6, 10**6) or 1, rng.randint(1, 10**4))
        d = squarefree_part(r)
        assert arith.is_squarefree(d)
        q = r / d
        assert q > 0
        assert Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator)) ** 2 == q


# ---------------------------------------------------------------------------
# ord_p / height
# ---------------------------------------------------------------------------


def test_ord_p_examples():
    assert ord_p(18, 3) == 2
    assert ord_p(Fraction(5, 27), 3) == -3
    with pytest.raises(ValueError):
        ord_p(0, 5)


def test_ord_p_additive():
    rng = random.Random(31)
    for _ in range(400):
        x = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**6))
        y = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**6))
        for p in (2, 3, 5, 13):
            assert ord_p(x * y, p) == ord_p(x, p) + ord_p(y, p)


def test_odd_valuation_iff_divides_squarefree_part():
    rng = random.Random(37)
    small_primes = [p for p in arith.SMALL_PRIMES if p <= 100]
    for _ in range(1000):
        r = Fraction(rng.randint(-10**5, 10**5) or 3, rng.randint(1, 10**4))
        d = squarefree_part(r)
        for p in small_primes:
            assert (ord_p(r, p) % 2 == 1) == (d % p == 0)


def test_height():
    assert height(Fraction(0)) == 1
    assert height(Fraction(-7, 3)) == 7
    assert height(Fraction(800, 801)) == 801


# ---------------------------------------------------------------------------
# kronecker / chi_d
# ---------------------------------------------------------------------------


def test_kronecker_examples():
    assert kronecker(5, 11) == 1  # 4^2 = 16 = 5 mod 11
    assert kronecker(8, 3) == -1
    for d in range(-30, 31):
        assert kronecker(d, 1) == 1


def test_kronecker_against_gmpy2():
    rng = random.Random(41)
    for _ in range(3000):
        d = rng.randint(-3000, 3000)
        n = rng.randint(-3000, 3000)
        assert kronecker(d, n) == gmpy2.kronecker(d, n), (d, n)


def test_kronecker_multiplicative_in_n():
    rng = random.Random(43)
    for _ in range(500):
        d = rng.randint(-200, 200)
        m = rng.randint(-200, 200)
        n = rng.randint(-200, 200)
        assert kronecker(d, m * n) == kronecker(d, m) * kronecker(d, n)


def test_chi_d_sign_at_minus_one():
    for d in range(-100, 101):
        if d == 0 or not arith.is_squarefree(d):
            continue
        assert chi_d(d, -1) == (1 if d > 0 else -1)


def test_chi_5_at_2():
    # (d^2-1)/8 = 3 odd for d = 5
    assert chi_d(5, 2) == -1


def test_chi_d_matches_legendre_at_odd_primes():
    rng = random.Random(47)
    odd_primes = [p for p in arith.SMALL_PRIMES if p > 2][:100]
    for _ in range(500):
        d = rng.randint(-150, 150)
        if d == 0 or not arith.is_squarefree(d):
            continue
        q = rng.choice(odd_primes)
        if d % q == 0:
            continue
        legendre = pow(d % q, (q - 1) // 2, q)
        legendre = -1 if legendre == q - 1 else legendre
        assert chi_d(d, q) == legendre


def test_chi_d_rejects_nonsquarefree():
    with pytest.raises(ValueError):
        chi_d(12, 5)


# ---------------------------------------------------------------------------
# crt / prime_in_ap
# ---------------------------------------------------------------------------


def test_crt_single():
    assert crt([Congruence(1, 2)]) == 1


def test_crt_pair_matches_enumeration():
    expect = next(n for n in range(15) if n % 3 == 2 and n % 5 == 3)
    assert crt([Congruence(2, 3), Congruence(3, 5)]) == expect == 8


def test_crt_triple():
    n = crt([Congruence(1, 8), Congruence(4, 5), Congruence(2, 7)])
    assert n % 8 == 1 and n % 5 == 4 and n % 7 == 2
    assert 0 <= n < 8 * 5 * 7


def test_crt_rejects_noncoprime():
    with pytest.raises(ValueError):
        crt([Congruence(1, 6), Congruence(2, 4)])


def test_prime_in_ap_first_examples():
    assert prime_in_ap([Congruence(1, 4)]) == 5
    assert prime_in_ap([Congruence(1, 8), Congruence(2, 3)]) == 17


def test_prime_in_ap_proposition_pattern():
    # q = m (mod p) and q = 1 (mod 8*delta), the degree-2 search pattern
    p, m, delta = 11, 3, 5
    q = prime_in_ap([Congruence(m, p), Congruence(1, 8 * delta)])
    assert is_prime(q) and q % p == m and q % (8 * delta) == 1


def test_prime_in_ap_skip_gives_increasing_distinct_primes():
    qs = [prime_in_ap([Congruence(3, 7)], skip=k) for k in range(8)]
    assert qs == sorted(set(qs))
    for q in qs:
        assert is_prime(q) and q % 7 == 3


def test_prime_in_ap_budget():
    with pytest.raises(BudgetExhausted):
        prime_in_ap([Congruence(1, 4)], skip=50, budget=10)


def test_prime_in_ap_rejects_bad_residue():
    with pytest.raises(ValueError):
        prime_in_ap([Congruence(2, 4)])


# ---------------------------------------------------------------------------
# is_prime
# ---------------------------------------------------------------------------


def test_is_prime_small():
    assert not is_prime(1)
    assert is_prime(2)
    assert is_prime(10**9 + 7)
    trial = all((10**9 + 7) % p for p in range(2, math.isqrt(10**9 + 7) + 1))
    assert trial


def test_is_prime_against_sieve():
    sieve = set(arith.SMALL_PRIMES)
    for n in range(-2, arith.TRIAL_BOUND + 1):
        assert is_prime(n) == (n in sieve)


def test_is_prime_against_gmpy2_large():
    rng = random.Random(53)
    for _ in range(2000):
        n = rng.randint(2, 2**80)
        assert is_prime(n) == (gmpy2.is_prime(n, 40) != 0), n


@given(st.integers(min_value=2, max_value=2**64))
@settings(max_examples=300, deadline=None)
def test_is_prime_matches_pure_python(n):
    assert is_prime(n) == arith._is_prime_py(n)


# ---------------------------------------------------------------------------
# Congruence basics
# ---------------------------------------------------------------------------


def test_congruence_normalizes():
    c = Congruence(-1, 7)
    assert c.residue == 6 and c.holds_for(13)
    with pytest.raises(ValueError):
        Congruence(1, 0)
