"""Exact integer and rational arithmetic kernel.

Factorization, valuations, squarefree parts, quadratic symbols, CRT and
prime search in arithmetic progressions.  Everything here is exact big-int
arithmetic; a C extension (:mod:`sqfscan._fastfactor`) accelerates
factorization of inputs below 2**96 but never changes results.

All functions are pure and safe to call concurrently.  Rationals are
represented by :class:`fractions.Fraction` (always in lowest terms with a
positive denominator, which is exactly the normal form we need).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BudgetExhausted

try:
    from . import _fastfactor as _ff
except ImportError:  # pragma: no cover - pure fallback exercised in tests
    _ff = None

Rat = Fraction

TRIAL_BOUND = 10_000

# Miller-Rabin with the first 12 primes as bases is deterministic for all
# n < 318665857834031151167461 (~2**78), which covers 2**64.  Above that we
# extend with a fixed set of further prime bases; no composite passing all
# of them is known, and the fixed bases keep results reproducible.
_MR_BASES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_BASES_BIG = _MR_BASES_64 + (41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)

_MR_DETERMINISTIC_BOUND = 318665857834031151167461


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
    return [i for i, f in enumerate(flags) if f]


SMALL_PRIMES: tuple[int, ...] = tuple(_sieve(TRIAL_BOUND))
_SMALL_PRIME_SET = frozenset(SMALL_PRIMES)

# Blocks of prime products for batched-gcd trial division in the pure path.
_PRIME_BLOCKS: list[tuple[int, tuple[int, ...]]] = []
_blk: list[int] = []
for _p in SMALL_PRIMES:
    _blk.append(_p)
    if len(_blk) == 64:
        _PRIME_BLOCKS.append((math.prod(_blk), tuple(_blk)))
        _blk = []
if _blk:
    _PRIME_BLOCKS.append((math.prod(_blk), tuple(_blk)))
del _blk, _p


def is_prime(n: int) -> bool:
    """Primality test, deterministic for the package's operating range.

    Uses fixed Miller-Rabin bases (provably correct below ~2**78) plus a
    strong Lucas test for larger inputs; output depends only on ``n``.
    """
    if n < 2:
        return False
    if _ff is not None and n.bit_length() <= 96:
        return bool(_ff.is_prime(n >> 64, n & 0xFFFFFFFFFFFFFFFF))
    return _is_prime_py(n)


def _is_prime_py(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    bases = _MR_BASES_64 if n < _MR_DETERMINISTIC_BOUND else _MR_BASES_BIG
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    if n >= _MR_DETERMINISTIC_BOUND and not _strong_lucas(n):
        return False
    return True


def _strong_lucas(n: int) -> bool:
    # Selfridge parameter selection; n odd, not a perfect square (callers
    # have already trial-divided, and squares fail base-2 MR anyway -- but
    # guard regardless).
    s = math.isqrt(n)
    if s * s == n:
        return False
    D = 5
    while True:
        j = jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -(D + 2) if D > 0 else -(D - 2)
    P, Q = 1, (1 - D) // 4
    d = n + 1
    r = (d & -d).bit_length() - 1
    d >>= r
    # Lucas sequence by binary ladder on (U, V, Q^k).
    U, V, qk = 0, 2, 1
    for bit in bin(d)[2:]:
        U, V = U * V % n, (V * V - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            U, V = (P * U + V) * ((n + 1) // 2) % n, (D * U + P * V) * ((n + 1) // 2) % n
            qk = qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(r - 1):
        V = (V * V - 2 * qk) % n
        if V == 0:
            return True
        qk = qk * qk % n
    return False


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi requires odd positive n")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n), defined for all integer pairs."""
    if n == 0:
        return 1 if d in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if d < 0:
            sign = -sign
    # factor out twos of n: (d/2) term
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            sign = -sign
    return sign * jacobi(d, n)


@dataclass(frozen=True)
class Factorization:
    """Signed prime factorization ``sign * prod(p**e)`` of a nonzero integer.

    ``factors`` is sorted by prime; every listed prime passes
    :func:`is_prime` and every exponent is >= 1.
    """

    sign: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        v = self.sign
        for p, e in self.factors:
            v *= p**e
        return v

    def squarefree_part(self) -> int:
        d = self.sign
        for p, e in self.factors:
            if e % 2:
                d *= p
        return d

    def ord(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0


def factor(n: int) -> Factorization:
    """Factor a nonzero integer completely and deterministically.

    Trial division by primes below 10**4, deterministic Miller-Rabin below
    2**64 plus fixed extra bases above, then Brent's variant of Pollard rho
    with a deterministic cycle of polynomial constants.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    sign = 1 if n > 0 else -1
    n = abs(n)
    fac: dict[int, int] = {}
    if _ff is not None and n.bit_length() <= 96:
        for p_hi, p_lo, e, kind in _ff.factor(n >> 64, n & 0xFFFFFFFFFFFFFFFF, 0):
            p = (p_hi << 64) | p_lo
            fac[p] = fac.get(p, 0) + e
    else:
        _factor_into(n, 1, fac)
    return Factorization(sign, tuple(sorted(fac.items())))


def _factor_into(n: int, mult: int, out: dict[int, int]) -> None:
    """Pure-Python complete factorization of n >= 1 into ``out``."""
    if n == 1:
        return
    for block_prod, block in _PRIME_BLOCKS:
        if n == 1:
            return
        g = math.gcd(n, block_prod)
        if g == 1:
            continue
        for p in block:
            if g % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out[p] = out.get(p, 0) + e * mult
    if n == 1:
        return
    _factor_hard(n, mult, out)


def _factor_hard(n: int, mult: int, out: dict[int, int]) -> None:
    """Factor n with no prime factor below TRIAL_BOUND."""
    stack = [(n, mult)]
    while stack:
        m, k = stack.pop()
        if m == 1:
            continue
        if _is_prime_py(m):
            out[m] = out.get(m, 0) + k
            continue
        root, exp = _perfect_power(m)
        if exp > 1:
            stack.append((root, k * exp))
            continue
        d = _brent_rho(m)
        stack.append((d, k))
        stack.append((m // d, k))


def _perfect_power(n: int) -> tuple[int, int]:
    """Largest e with n = root**e (root minimal); (n, 1) if none."""
    for e in (2, 3, 5, 7, 11, 13):
        if n.bit_length() < e + 1:
            break
        r = _iroot(n, e)
        if r**e == n:
            root, exp = _perfect_power(r)
            return root, exp * e
    return n, 1


def _iroot(n: int, k: int) -> int:
    if k == 2:
        return math.isqrt(n)
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _brent_rho(n: int) -> int:
    """Return a nontrivial divisor of composite odd-ish n (deterministic)."""
    if n % 2 == 0:
        return 2
    for c in range(1, 1000):
        d = _brent_rho_attempt(n, c)
        if d is not None:
            return d
    raise RuntimeError(f"pollard rho failed on {n}")  # pragma: no cover


def _brent_rho_attempt(n: int, c: int, max_iters: int | None = None) -> int | None:
    y, r, q = 2, 1, 1
    g = 1
    x = ys = y
    count = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(128, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += 128
        r *= 2
        count += r
        if max_iters is not None and count > max_iters:
            return None
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    if g == n:
        return None
    return g


def squarefree_part(r: Rat | int) -> int:
    """The unique squarefree integer d such that r/d is a rational square."""
    r = Fraction(r)
    if r == 0:
        raise ValueError("squarefree part of 0 is undefined")
    return squarefree_part_int(r.numerator * r.denominator)


def squarefree_part_int(n: int) -> int:
    """Squarefree part of a nonzero integer."""
    if n == 0:
        raise ValueError("squarefree part of 0 is undefined")
    if _ff is not None and abs(n).bit_length() <= 96:
        m = abs(n)
        d = 1
        for p_hi, p_lo, e, kind in _ff.factor(m >> 64, m & 0xFFFFFFFFFFFFFFFF, 0):
            if e % 2:
                d *= (p_hi << 64) | p_lo
        return d if n > 0 else -d
    return factor(n).squarefree_part()


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return abs(squarefree_part_int(n)) == abs(n)


def ord_p(r: Rat | int, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    r = Fraction(r)
    if r == 0:
        raise ValueError("ord_p(0) is undefined")
    return _ord_int(r.numerator, p) - _ord_int(r.denominator, p)


def _ord_int(n: int, p: int) -> int:
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def unit_part(r: Rat | int, p: int) -> tuple[int, Rat]:
    """Write r = p**k * u with u a p-adic unit; returns (k, u)."""
    k = ord_p(r, p)
    return k, Fraction(r) / Fraction(p) ** k


def reduce_unit_mod(u: Rat, p_power: int) -> int:
    """Reduce a rational with denominator coprime to p_power modulo it."""
    num, den = u.numerator, u.denominator
    if math.gcd(den, p_power) != 1:
        raise ValueError("denominator not invertible")
    return num * pow(den, -1, p_power) % p_power


def height(r: Rat | int) -> int:
    """H(a/b) = max(|a|, b) for a/b in lowest terms; H(0) = 1."""
    r = Fraction(r)
    return max(abs(r.numerator), r.denominator)


def chi_d(d: int, n: int) -> int:
    """Quadratic Dirichlet character of the field Q(sqrt(d)).

    Evaluated as the Kronecker symbol of the field discriminant, which is
    d itself when d = 1 mod 4 and 4d otherwise.  d must be squarefree.
    """
    if d == 0 or not is_squarefree(d):
        raise ValueError(f"{d} is not a nonzero squarefree integer")
    disc = d if d % 4 == 1 else 4 * d
    return kronecker(disc, n)


@dataclass(frozen=True)
class Congruence:
    """residue mod modulus, with 0 <= residue < modulus."""

    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def holds_for(self, n: int) -> bool:
        return n % self.modulus == self.residue


def crt(congruences: Sequence[Congruence]) -> int:
    """Smallest nonnegative N satisfying all congruences (coprime moduli)."""
    n, m = 0, 1
    for c in congruences:
        g = math.gcd(m, c.modulus)
        if g != 1:
            raise ValueError(f"moduli not pairwise coprime (gcd {g})")
        # n + m*t = residue (mod modulus)
        t = (c.residue - n) * pow(m, -1, c.modulus) % c.modulus
        n += m * t
        m *= c.modulus
    return n % m


def prime_in_ap(
    congruences: Sequence[Congruence], skip: int = 0, budget: int = 1_000_000
) -> int:
    """The (skip+1)-th prime satisfying all the congruences.

    Every residue must be coprime to its modulus (Dirichlet's hypothesis);
    candidates N, N+M, N+2M, ... with M the modulus product are tested in
    order, and BudgetExhausted is raised after ``budget`` candidates --
    Dirichlet guarantees existence but gives no effective bound.
    """
    for c in congruences:
        if math.gcd(c.residue, c.modulus) != 1:
            raise ValueError(f"residue {c.residue} not coprime to modulus {c.modulus}")
    n = crt(congruences)
    m = math.prod(c.modulus for c in congruences) if congruences else 1
    found = 0
    x = n
    if x == 0:
        x += m
    for _ in range(budget):
        if is_prime(x):
            if found == skip:
                return x
            found += 1
        x += m
    raise BudgetExhausted(
        f"no prime ={n} (mod {m}) with skip={skip} within {budget} candidates"
    )


def primes_up_to(bound: int) -> Iterable[int]:
    """Ascending primes <= bound."""
    if bound <= TRIAL_BOUND:
        for p in SMALL_PRIMES:
            if p > bound:
                return
            yield p
        return
    yield from SMALL_PRIMES
    n = TRIAL_BOUND + 1
    while n <= bound:
        if is_prime(n):
            yield n
        n += 2 - (n % 2 == 0)


def inv_mod(a: int, m: int) -> int:
    return pow(a, -1, m)
