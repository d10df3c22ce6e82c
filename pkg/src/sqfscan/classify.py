"""Global prime classification for y^2 = f(x).

Good-prime thresholds, the set R(f) of good primes where f has a root,
integer witnesses with odd valuation, and the constructive decision for
whether squarefree parts of f-values divisible by p exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import arith, poly
from .arith import Rat
from .errors import BudgetExhausted, NotGoodPrime, NotInRf
from .poly import IntPoly


@dataclass(frozen=True)
class CurveFamily:
    """A separable f together with the data controlling its good primes.

    Every prime >= n0 is good for f, and the Hasse-Weil floor
    4g^2 + 6g + 4 guarantees at least 2g + 5 points on any genus-g curve
    over F_l for l >= n0.
    """

    f: IntPoly
    g: int
    disc: int
    lc: int
    n0: int


def make_family(f: IntPoly) -> CurveFamily:
    if f.degree < 3:
        raise ValueError("curve families need deg f >= 3")
    d = poly.discriminant(f)
    if d == 0:
        raise ValueError("f must be separable")
    g = poly.genus(f)
    floor = max(4 * g * g + 6 * g + 4, 3)
    largest_bad = max(p for p, _ in arith.factor(2 * d * f.lc).factors)
    n0 = max(floor, largest_bad + 1)
    return CurveFamily(f=f, g=g, disc=d, lc=f.lc, n0=n0)


def local_threshold(f: IntPoly) -> int:
    """n0 for any separable f (degree 1 and 2 use genus 0)."""
    d = poly.discriminant(f)
    if d == 0:
        raise ValueError("f must be separable")
    g = poly.genus(f)
    floor = max(4 * g * g + 6 * g + 4, 3)
    largest_bad = max(p for p, _ in arith.factor(2 * d * f.lc).factors)
    return max(floor, largest_bad + 1)


def find_R_f(f: IntPoly, bound: int) -> list[int]:
    """Good primes q <= bound such that f has a root mod q, ascending."""
    if not poly.is_separable(f):
        raise ValueError("R(f) is defined for separable f")
    out = []
    for q in arith.primes_up_to(bound):
        if poly.is_good_prime(f, q) and poly.has_root_mod_p(f, q):
            out.append(q)
    return out


def _require_in_Rf(f: IntPoly, q: int) -> None:
    if not arith.is_prime(q) or q == 2:
        raise NotInRf(q, "not an odd prime")
    if not poly.is_good_prime(f, q):
        raise NotInRf(q, "not a good prime (divides 2*disc*lc)")
    if not poly.has_root_mod_p(f, q):
        raise NotInRf(q, "f has no root modulo q")


def witness_odd_valuation(f: IntPoly, q: int) -> int:
    """An integer n with ord_q(f(n)) odd and positive and q not | f'(n).

    Searches lifts of each root of f mod q through q^2; a lift with even
    valuation 2s is repaired by the Taylor shift n -> n + q^(2s-1), which
    provably drops the valuation to 2s - 1.
    """
    _require_in_Rf(f, q)
    fp = poly.derivative(f)
    cap = 2 * arith._ord_int(poly.discriminant(f), q) + 4
    roots = sorted(poly.roots_mod_p(f, q)) if q <= 1500 else [poly.any_root_mod_p(f, q)]
    for r0 in roots:
        for t in range(q):
            n = r0 + t * q
            v = f.eval_int(n)
            if v == 0:
                continue
            assert fp.eval_int(n) % q != 0  # simple root at a good prime
            k = arith._ord_int(v, q)
            if k % 2 == 1:
                return n
            if k > cap:
                continue
            s = k // 2
            n2 = n + q ** (2 * s - 1)
            v2 = f.eval_int(n2)
            assert v2 != 0 and arith._ord_int(v2, q) == 2 * s - 1
            return n2
    raise NotInRf(q, "no usable lift found (exceeded valuation cap)")


def witness_multi(f: IntPoly, T: Sequence[int]) -> int:
    """An integer n with ord_q(f(n)) odd and q not | f'(n) for all q in T."""
    T = sorted(set(T))
    if not T:
        return _first_nonroot(f)
    for q in T:
        _require_in_Rf(f, q)
    fp = poly.derivative(f)
    # CRT a root for each prime, then dodge the finitely many zeros of f
    residues = []
    for q in T:
        r = poly.any_root_mod_p(f, q)
        residues.append(arith.Congruence(r, q))
    n = arith.crt(residues)
    M = math.prod(T)
    while f.eval_int(n) == 0:
        n += M
    # one Taylor shift makes every even valuation odd, keeping odd ones
    value = f.eval_int(n)
    even_q = [q for q in T if arith._ord_int(value, q) % 2 == 0]
    if even_q:
        shift = 1
        for q in T:
            k = arith._ord_int(value, q)
            shift *= q ** (k - 1) if k % 2 == 0 else q ** (k + 1)
        n = n + shift
    value = f.eval_int(n)
    for q in T:
        assert value != 0 and arith._ord_int(value, q) % 2 == 1 and fp.eval_int(n) % q != 0
    return n


def _first_nonroot(f: IntPoly) -> int:
    n = 0
    while f.eval_int(n) == 0:
        n += 1
    return n


def divisible_class_elements(
    f: IntPoly, T: Sequence[int], count: int, scan_bound: int = 10_000
) -> list[tuple[int, int]]:
    """``count`` distinct d in S(f), each divisible by every prime of T.

    Realizes the d's by augmenting T with fresh primes from R(f); each
    returned pair is (d, n) with d = squarefree_part(f(n)).
    """
    T = sorted(set(T))
    for q in T:
        _require_in_Rf(f, q)
    out: list[tuple[int, int]] = []
    seen: set[int] = set()
    for q in arith.primes_up_to(scan_bound):
        if q in T or not poly.is_good_prime(f, q) or not poly.has_root_mod_p(f, q):
            continue
        n = witness_multi(f, T + [q])
        d = arith.squarefree_part_int(f.eval_int(n))
        if d not in seen:
            seen.add(d)
            out.append((d, n))
            if len(out) == count:
                return out
    raise BudgetExhausted(
        f"found only {len(out)} of {count} elements scanning R(f) up to {scan_bound}"
    )


ODD_DEGREE_ALWAYS_INFINITE = "OddDegreeAlwaysInfinite"
EVEN_DEGREE_ROOT_EXISTS = "EvenDegreeRootExists"
EVEN_DEGREE_NO_ROOT = "EvenDegreeNoRoot"


@dataclass(frozen=True)
class ZeroClassVerdict:
    """Whether S(f) contains (infinitely many) multiples of p.

    When it does, ``witness`` is a pair (r, d) with d = S(f(r)) and p | d,
    checkable by one evaluation and one squarefree part.
    """

    kind: str
    witness: Optional[tuple[Rat, int]]

    @property
    def has_multiples(self) -> bool:
        return self.kind != EVEN_DEGREE_NO_ROOT


def zero_class_decide(f: IntPoly, p: int) -> ZeroClassVerdict:
    """Decide whether S(f) contains elements divisible by the good prime p.

    Odd degree: always, witnessed by r = 1/p^n for odd n.  Even degree:
    exactly when f has a root mod p; the witness then comes from the
    odd-valuation construction.
    """
    if not poly.is_separable(f):
        raise ValueError("f must be separable")
    if not poly.is_good_prime(f, p):
        raise NotGoodPrime(f"{p} is not good for this polynomial")
    if f.degree % 2 == 1:
        n = 1
        while f(Fraction(1, p**n)) == 0:
            n += 2  # smallest odd n works unless 1/p^n happens to be a root
        r = Fraction(1, p**n)
        d = arith.squarefree_part(f(r))
        assert d % p == 0
        return ZeroClassVerdict(ODD_DEGREE_ALWAYS_INFINITE, (r, d))
    if poly.has_root_mod_p(f, p):
        nw = witness_odd_valuation(f, p)
        d = arith.squarefree_part_int(f.eval_int(nw))
        assert d % p == 0
        return ZeroClassVerdict(EVEN_DEGREE_ROOT_EXISTS, (Fraction(nw), d))
    return ZeroClassVerdict(EVEN_DEGREE_NO_ROOT, None)
