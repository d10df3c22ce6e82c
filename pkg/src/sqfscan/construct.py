"""Unconditional residue-class constructions for degrees 1 and 2.

Produces primes (times a fixed squarefree unit) inside S(f) lying in a
prescribed residue class mod p, via Dirichlet progressions for degree 1
and Legendre's ternary-form theorem plus a rational change of variables
for degree 2.  Every returned element carries the rational r certifying
d = squarefree_part(f(r)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import arith, poly
from .arith import Congruence, Rat
from .errors import InternalSearchExhausted, UnsupportedConditional
from .poly import IntPoly


@dataclass(frozen=True)
class TernaryForm:
    """Diagonal form a x^2 + b y^2 + c z^2 with the classical hypotheses:
    squarefree, pairwise coprime, not all of one sign."""

    a: int
    b: int
    c: int

    def validate(self) -> None:
        for name, v in (("a", self.a), ("b", self.b), ("c", self.c)):
            if v == 0:
                raise ValueError(f"coefficient {name} is zero")
            if not arith.is_squarefree(v):
                raise ValueError(f"coefficient {name}={v} is not squarefree")
        if math.gcd(self.a, self.b) != 1 or math.gcd(self.a, self.c) != 1 or math.gcd(self.b, self.c) != 1:
            raise ValueError("coefficients are not pairwise coprime")
        if (self.a > 0) == (self.b > 0) == (self.c > 0):
            raise ValueError("coefficients all have the same sign")

    def eval(self, x: int, y: int, z: int) -> int:
        return self.a * x * x + self.b * y * y + self.c * z * z


def _is_square_mod_squarefree(v: int, m: int) -> bool:
    """Whether v is a square modulo squarefree |m|."""
    for p, _ in arith.factor(abs(m)).factors:
        if p == 2:
            continue  # everything is a square mod 2
        if arith.kronecker(v % p, p) == -1:
            return False
    return True


def legendre_solvable(form: TernaryForm) -> bool:
    """Legendre's criterion: -bc, -ac, -ab squares mod |a|, |b|, |c|."""
    form.validate()
    a, b, c = form.a, form.b, form.c
    return (
        _is_square_mod_squarefree(-b * c, a)
        and _is_square_mod_squarefree(-a * c, b)
        and _is_square_mod_squarefree(-a * b, c)
    )


def holzer_bounds(form: TernaryForm) -> tuple[int, int, int]:
    a, b, c = abs(form.a), abs(form.b), abs(form.c)
    return math.isqrt(b * c), math.isqrt(a * c), math.isqrt(a * b)


def legendre_solve(form: TernaryForm) -> Optional[tuple[int, int, int]]:
    """A primitive nontrivial solution of a x^2 + b y^2 + c z^2 = 0, if any.

    Searches inside Holzer's box (|x| <= sqrt|bc| etc.), which contains a
    solution whenever one exists; solvable-by-criterion with an empty box
    therefore indicates a bug and aborts loudly.
    """
    if not legendre_solvable(form):
        return None
    a, b, c = form.a, form.b, form.c
    bx, by, bz = holzer_bounds(form)
    # enumerate the two variables with the smallest bounds, solve for the third
    order = sorted([(bx, 0), (by, 1), (bz, 2)])
    (b1, i1), (b2, i2), (_, i3) = order
    coeffs = (a, b, c)
    c3 = coeffs[i3]
    for v1 in range(b1 + 1):
        for v2 in range(b2 + 1):
            if v1 == 0 and v2 == 0:
                continue
            rhs = -(coeffs[i1] * v1 * v1 + coeffs[i2] * v2 * v2)
            num, rem = divmod(rhs, c3)
            if rem != 0:
                continue
            if num < 0:
                continue
            v3 = math.isqrt(num)
            if v3 * v3 != num:
                continue
            sol = [0, 0, 0]
            sol[i1], sol[i2], sol[i3] = v1, v2, v3
            g = math.gcd(math.gcd(sol[0], sol[1]), sol[2])
            sol = tuple(s // g for s in sol)
            assert form.eval(*sol) == 0
            return sol
    raise InternalSearchExhausted(
        f"criterion says solvable but Holzer box empty for {form}"
    )


@dataclass(frozen=True)
class ClassElement:
    """A certified element of S(f): d = squarefree_part(f(r)).

    ``q`` is the prime with d = delta * q when the element came from one
    of the prime-producing reductions.
    """

    d: int
    r: Rat
    q: Optional[int] = None


def _verify_element(f: IntPoly, e: ClassElement, p: int, m: int) -> None:
    value = f(e.r)
    assert value != 0
    assert e.d == arith.squarefree_part(value)
    assert (e.d - m) % p == 0
    assert arith.is_squarefree(e.d)


def reduce_A_from_I(f: IntPoly, p: int, m: int) -> tuple[IntPoly, int, int]:
    """Strip square content: f = delta * s^2 * h with h primitive.

    Returns (h, delta, target) where a prime q in S(h) with q = target
    (mod p) and q not dividing delta gives d = delta * q in S(f) with
    d = m (mod p).
    """
    if not poly.is_good_prime(f, p):
        raise ValueError(f"{p} is not good for f")
    if m % p == 0:
        raise ValueError("m must be coprime to p")
    delta, s, h = poly.content_split(f)
    target = arith.inv_mod(delta, p) * m % p
    return h, delta, target


def gen_degree1(f: IntPoly, p: int, m: int, count: int) -> list[ClassElement]:
    """``count`` elements of S(f) congruent to m mod p, for deg f = 1.

    After the content reduction, h = ax + b is primitive, and primes
    q = target (mod p), q = b (mod |a|) are values h(n), so d = delta*q.
    """
    if f.degree != 1:
        raise ValueError("gen_degree1 needs a degree-1 polynomial")
    h, delta, target = reduce_A_from_I(f, p, m)
    b, a = h.coeffs
    congs = [Congruence(target, p)]
    if abs(a) > 1:
        congs.append(Congruence(b % abs(a), abs(a)))
    out: list[ClassElement] = []
    skip = 0
    while len(out) < count:
        q = arith.prime_in_ap(congs, skip=skip)
        skip += 1
        if delta % q == 0:
            continue
        n = (q - b) // a
        assert a * n + b == q
        e = ClassElement(d=delta * q, r=Fraction(n), q=q)
        _verify_element(f, e, p, m)
        out.append(e)
    return out


def gen_degree2(f: IntPoly, p: int, m: int, count: int) -> list[ClassElement]:
    """``count`` elements of S(f) congruent to m mod p, for deg f = 2.

    Pipeline: h = delta_lc * f has square leading coefficient a^2; its
    homogenization is equivalent over Q to x^2 - delta y^2 where
    delta s^2 = b^2 - 4 a^2 c.  Primes q = 1 (mod 8|delta|) in the right
    class mod p are represented: Legendre's theorem solves
    x^2 - delta y^2 - q z^2 = 0, and the inverse change of variables maps
    the solution back to a rational r with squarefree_part(h(r)) = q.
    """
    if f.degree != 2:
        raise ValueError("gen_degree2 needs a degree-2 polynomial")
    if not poly.is_separable(f):
        raise ValueError("f must be separable (nonzero discriminant)")
    if not poly.is_good_prime(f, p):
        raise ValueError(f"{p} is not good for f")
    if m % p == 0:
        raise ValueError("m must be coprime to p")
    delta_lc = arith.squarefree_part_int(f.lc)
    h = IntPoly([delta_lc * c for c in f.coeffs])
    c0, b, a2 = h.coeffs
    a = math.isqrt(a2)
    assert a * a == a2
    disc = b * b - 4 * a2 * c0
    assert disc != 0
    delta = arith.squarefree_part_int(disc)
    s = math.isqrt(disc // delta)
    assert delta * s * s == disc

    target = arith.inv_mod(delta_lc, p) * m % p
    congs = [Congruence(target, p), Congruence(1, 8 * abs(delta))]
    out: list[ClassElement] = []
    skip = 0
    while len(out) < count:
        q = arith.prime_in_ap(congs, skip=skip)
        skip += 1
        if (2 * delta * delta_lc * a) % q == 0 or q == p:
            continue
        if delta == 1:
            X, Y = Fraction(q + 1, 2), Fraction(q - 1, 2)
        else:
            assert arith.kronecker(delta, q) == 1  # forced by q = 1 mod 8|delta|
            sol = legendre_solve(TernaryForm(1, -delta, -q))
            assert sol is not None
            x0, y0, z0 = sol
            assert z0 != 0  # delta squarefree != 1 forces z0 != 0
            X, Y = Fraction(x0, z0), Fraction(y0, z0)
        # invert (X, Y) = (a x + b/(2a) y, s/(2a) y)
        y = 2 * a * Y / s
        x = (X - Fraction(b, 2 * a) * y) / a
        if y == 0:
            continue
        r = x / y
        value_h = poly.eval_rat(h, r)
        if value_h == 0:
            continue
        assert arith.squarefree_part(value_h) == q
        e = ClassElement(d=delta_lc * q, r=r, q=q)
        _verify_element(f, e, p, m)
        out.append(e)
    return out


def gen_degree3(*args, **kwargs):
    raise UnsupportedConditional(
        "degree-3 residue-class generation relies on the Parity Conjecture "
        "(elliptic-curve rank machinery) and is deliberately not implemented"
    )


def gen_degree4(*args, **kwargs):
    raise UnsupportedConditional(
        "degree-4 residue-class generation relies on the Parity Conjecture "
        "(elliptic-curve rank machinery) and is deliberately not implemented"
    )
