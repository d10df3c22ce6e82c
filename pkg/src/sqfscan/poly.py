"""Integer polynomials: evaluation, calculus, discriminants, reductions
mod p, homogenization/reversal devices, and Taylor shifts.

Coefficients are stored in ascending order (constant term first),
everywhere, including the CLI text format ``c0,c1,...,cn``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import arith
from .arith import Rat


class IntPoly:
    """A nonzero integer polynomial, coefficients ascending."""

    __slots__ = ("coeffs", "_disc")

    def __init__(self, coeffs: Iterable[int]):
        cs = [int(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs or all(c == 0 for c in cs):
            raise ValueError("the zero polynomial is not supported")
        self.coeffs: tuple[int, ...] = tuple(cs)
        self._disc: int | None = None

    @classmethod
    def parse(cls, text: str) -> "IntPoly":
        """Parse the comma-separated ascending coefficient format."""
        return cls(int(part) for part in text.split(","))

    def format(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPoly({list(self.coeffs)})"

    def __call__(self, x):
        return self.eval_int(x) if isinstance(x, int) else eval_rat(self, x)

    def eval_int(self, x: int) -> int:
        v = 0
        for c in reversed(self.coeffs):
            v = v * x + c
        return v


def eval_rat(f: IntPoly, r: Rat | int) -> Rat:
    """Exact value f(r)."""
    r = Fraction(r)
    a, b = r.numerator, r.denominator
    n = f.degree
    # f(a/b) = (sum c_i a^i b^(n-i)) / b^n
    num = 0
    bp = 1
    apows = [1]
    for _ in range(n):
        apows.append(apows[-1] * a)
    for i in range(n, -1, -1):
        num += f.coeffs[i] * apows[i] * bp
        bp *= b
    return Fraction(num, b**n)


def derivative(f: IntPoly) -> IntPoly:
    if f.degree == 0:
        raise ValueError("derivative of a constant is the zero polynomial")
    return IntPoly([i * c for i, c in enumerate(f.coeffs)][1:])


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of a by b: rem(lc(b)^(da-db+1) * a, b), exact."""
    da, db = len(a) - 1, len(b) - 1
    r = a[:]
    lb = b[-1]
    for _ in range(da - db + 1):
        dr = len(r) - 1
        if dr < db:
            r = [c * lb for c in r]
            continue
        lead = r[-1]
        r = [c * lb for c in r[:-1]]
        for i in range(db):
            r[dr - db + i] -= lead * b[i]
        while len(r) > 1 and r[-1] == 0:
            r.pop()
        if r == [0]:
            return r
    return r


def resultant(f: IntPoly, g: IntPoly) -> int:
    """Resultant of f and g over Z, by the subresultant PRS (fraction free)."""
    a = list(f.coeffs)
    b = list(g.coeffs)
    s = 1
    if len(a) < len(b):
        if (len(a) - 1) % 2 == 1 and (len(b) - 1) % 2 == 1:
            s = -s
        a, b = b, a
    gg, h = 1, 1
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            # res = h^(1-da) * lc(b)^da, with the accumulated sign
            if da == 0:
                return s  # two constants: empty resultant
            num = b[0] ** da
            for _ in range(da - 1):
                num //= h
            return s * num
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            s = -s
        r = _prem(a, b)
        if r == [0]:
            return 0
        divisor = gg * h**delta
        a, b = b, [c // divisor for c in r]
        gg = a[-1]
        if delta == 0:
            pass  # h unchanged
        else:
            num = gg**delta
            for _ in range(delta - 1):
                num //= h
            h = num
    raise AssertionError  # pragma: no cover


def discriminant(f: IntPoly) -> int:
    """disc(f) = (-1)^(n(n-1)/2) * Res(f, f') / lc(f)."""
    n = f.degree
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return 1
    if f._disc is not None:
        return f._disc
    res = resultant(f, derivative(f))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    d, rem = divmod(sign * res, f.lc)
    assert rem == 0
    f._disc = d
    return d


def is_separable(f: IntPoly) -> bool:
    return f.degree >= 1 and discriminant(f) != 0


def content_split(f: IntPoly) -> tuple[int, int, IntPoly]:
    """Write f = delta * s**2 * h with delta squarefree and h primitive.

    The sign of the content follows the leading coefficient, so h always
    has positive leading coefficient.
    """
    c = math.gcd(*f.coeffs) if len(f.coeffs) > 1 else abs(f.coeffs[0])
    if f.lc < 0:
        c = -c
    delta = arith.squarefree_part_int(c)
    s = math.isqrt(c // delta)
    assert delta * s * s == c
    return delta, s, IntPoly([x // c for x in f.coeffs])


def reverse(f: IntPoly, n: int) -> IntPoly:
    """x**n * f(1/x): reversed coefficients padded to degree n."""
    if n < f.degree:
        raise ValueError("reversal degree must be >= deg f")
    rev = [0] * (n + 1)
    for i, c in enumerate(f.coeffs):
        rev[n - i] = c
    return IntPoly(rev)


@dataclass(frozen=True)
class BiForm:
    """Homogeneous form F(x, y) = y**n * f(x/y) of degree n."""

    coeffs: tuple[int, ...]  # coefficient of x^i y^(n-i) at index i
    n: int

    def eval(self, a: int, b: int) -> int:
        v = 0
        bp = 1
        apows = [1]
        for _ in range(self.n):
            apows.append(apows[-1] * a)
        for i in range(self.n, -1, -1):
            v += self.coeffs[i] * apows[i] * bp
            bp *= b
        return v


def homogenize(f: IntPoly, n: int) -> BiForm:
    if n < f.degree:
        raise ValueError("homogenization degree must be >= deg f")
    cs = list(f.coeffs) + [0] * (n - f.degree)
    return BiForm(tuple(cs), n)


def taylor_shift(f: IntPoly, v: int) -> IntPoly:
    """g with g(x) = f(x + v), computed by Horner over Z[x]."""
    out = [0]
    for c in reversed(f.coeffs):
        # out = out * (x + v) + c
        new = [0] * (len(out) + 1)
        for i, o in enumerate(out):
            new[i + 1] += o
            new[i] += o * v
        new[0] += c
        while len(new) > 1 and new[-1] == 0:
            new.pop()
        out = new
    return IntPoly(out)


def reduce_mod_p(f: IntPoly, p: int) -> tuple[int, ...]:
    """Coefficientwise reduction into F_p (trailing zeros stripped)."""
    cs = [c % p for c in f.coeffs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def eval_mod_p(coeffs: Sequence[int], x: int, p: int) -> int:
    v = 0
    for c in reversed(coeffs):
        v = (v * x + c) % p
    return v


def roots_mod_p(f: IntPoly, p: int) -> set[int]:
    """Exact set of roots of f mod p, by exhaustive scan."""
    cs = reduce_mod_p(f, p)
    return {x for x in range(p) if eval_mod_p(cs, x, p) == 0}


def has_root_mod_p(f: IntPoly, p: int) -> bool:
    """Whether f has a root mod p; uses gcd(x^p - x, f) for large p."""
    if p <= 1500:
        return bool(roots_mod_p(f, p))
    return _distinct_root_poly(f, p) is not None


def any_root_mod_p(f: IntPoly, p: int) -> int | None:
    """Some root of f mod p, or None: deterministic for a given (f, p)."""
    if p <= 1500:
        rs = roots_mod_p(f, p)
        return min(rs) if rs else None
    g = _distinct_root_poly(f, p)
    if g is None:
        return None
    return _find_root_cz(g, p)


def _polmod_normalize(a: list[int], p: int) -> list[int]:
    a = [c % p for c in a]
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    if a == [0]:
        return []
    return a


def _polmod_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = a[:]
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - db, 1)
    while len(a) - 1 >= db and a != [0] and a:
        da = len(a) - 1
        coef = a[-1] * inv % p
        q[da - db] = coef
        for i in range(db + 1):
            a[da - db + i] = (a[da - db + i] - coef * b[i]) % p
        a = _polmod_normalize(a, p) or [0]
        if a == [0]:
            break
    return q, ([] if a == [0] else a)


def _polmod_mul(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    _, r = _polmod_divmod(out, mod, p)
    return r or [0]


def _polmod_pow_x(e: int, mod: list[int], p: int) -> list[int]:
    """x**e mod (mod, p)."""
    result = [1]
    base = [0, 1]
    if len(mod) - 1 <= 1:
        base = _polmod_divmod(base, mod, p)[1] or [0]
    while e:
        if e & 1:
            result = _polmod_mul(result, base, mod, p)
        base = _polmod_mul(base, base, mod, p)
        e >>= 1
    return result


def _polmod_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a = _polmod_normalize(a, p)
    b = _polmod_normalize(b, p)
    while b:
        _, r = _polmod_divmod(a, b, p)
        a, b = b, r
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _distinct_root_poly(f: IntPoly, p: int) -> list[int] | None:
    """gcd(x^p - x, f) mod p: the product of (x - a) over roots a."""
    cs = list(reduce_mod_p(f, p))
    if len(cs) == 1:
        return None
    xp = _polmod_pow_x(p, cs, p)
    xp_minus_x = xp[:]
    while len(xp_minus_x) < 2:
        xp_minus_x.append(0)
    xp_minus_x[1] = (xp_minus_x[1] - 1) % p
    g = _polmod_gcd(xp_minus_x, cs, p)
    if len(g) <= 1:
        return None
    return g


def _find_root_cz(g: list[int], p: int) -> int:
    """A root of g, where g splits into distinct linear factors mod p.

    Deterministic Cantor-Zassenhaus: split with gcd(g, (x+c)^((p-1)/2) - 1)
    for c = 0, 1, 2, ...
    """
    while len(g) - 1 > 1:
        for c in range(p):
            h = _polmod_pow_shifted(c, (p - 1) // 2, g, p)
            h = h[:] or [0]
            h[0] = (h[0] - 1) % p
            d = _polmod_gcd(h, g, p)
            if 0 < len(d) - 1 < len(g) - 1:
                g = d if len(d) < len(g) else _polmod_divmod(g, d, p)[0]
                g = _polmod_normalize(g, p)
                break
        else:  # pragma: no cover
            raise AssertionError("equal-degree splitting failed")
    return (-g[0]) * pow(g[1], -1, p) % p


def _polmod_pow_shifted(c: int, e: int, mod: list[int], p: int) -> list[int]:
    """(x + c)**e mod (mod, p)."""
    result = [1]
    base = _polmod_divmod([c, 1], mod, p)[1] or [0]
    while e:
        if e & 1:
            result = _polmod_mul(result, base, mod, p)
        base = _polmod_mul(base, base, mod, p)
        e >>= 1
    return result


def genus(f: IntPoly) -> int:
    """Genus of y^2 = f(x) for separable f: (deg - 1) // 2."""
    if f.degree < 1:
        raise ValueError("genus needs degree >= 1")
    return (f.degree - 1) // 2


def is_good_prime(f: IntPoly, p: int) -> bool:
    """Odd p with p not dividing lc(f) and disc(f) nonzero mod p."""
    if not is_separable(f):
        raise ValueError("good primes are defined for separable f")
    if p == 2 or not arith.is_prime(p):
        return False
    return f.lc % p != 0 and discriminant(f) % p != 0
