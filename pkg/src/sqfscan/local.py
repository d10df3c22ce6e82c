"""Local solvability of quadratic twists d*y^2 = f(x).

Square testing in Q_l, point counting over F_l, Hensel lifting, a complete
two-chart decision procedure for nontrivial Q_l points with verifiable
certificates (a Hensel-liftable approximate point when solvable, a
residue-class exhaustion transcript when not), the real place via exact
Sturm sequences, and the construction of squarefree d in a prescribed
residue class whose twist has points everywhere locally.

"Nontrivial point" always means an affine point with y != 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import arith, classify, poly
from .arith import Congruence, Rat
from .errors import (
    BudgetExhausted,
    DepthCapTooSmall,
    InternalSearchExhausted,
    NotGoodPrime,
    SingularSeed,
)
from .poly import IntPoly

REAL_PLACE = "real"


# --------------------------------------------------------------------------
# squares in Q_l
# --------------------------------------------------------------------------


def is_square_in_Ql(x: Union[Rat, int], ell: int) -> bool:
    """Whether x is a square in Q_ell.

    Writes x = ell^n * u with u a unit: a square iff n is even and (ell
    odd) the reduction of u is a square in F_ell, or (ell = 2) u = 1 mod 8.
    """
    x = Fraction(x)
    if x == 0:
        raise ValueError("0 is excluded; test nonzero elements")
    n = arith.ord_p(x, ell)
    if n % 2:
        return False
    u = x / Fraction(ell) ** n
    if ell == 2:
        return arith.reduce_unit_mod(u, 8) == 1
    return arith.kronecker(arith.reduce_unit_mod(u, ell), ell) == 1


def sqrt_mod_p(a: int, p: int) -> int:
    """Tonelli-Shanks square root mod an odd prime (a must be a QR)."""
    a %= p
    if a == 0:
        return 0
    assert arith.kronecker(a, p) == 1, "not a quadratic residue"
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # factor p - 1 = q * 2^s
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while arith.kronecker(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def _sqrt_unit_mod_power(u: int, ell: int, k: int) -> int:
    """y with y^2 = u mod ell^k, for u a unit square class."""
    if ell == 2:
        assert u % 8 == 1
        y = 1
        for i in range(3, k):
            if (y * y - u) % (1 << (i + 1)):
                y += 1 << (i - 1)
        y %= 1 << k
        return y
    y = sqrt_mod_p(u, ell)
    prec = 1
    m = ell
    while prec < k:
        prec = min(2 * prec, k)
        m = ell**prec
        # Newton: y <- y - (y^2 - u) / (2y)
        y = (y - (y * y - u) * pow(2 * y, -1, m)) % m
    return y


def padic_sqrt(w: Rat, ell: int, rel_prec: int) -> Rat:
    """y with ord(y^2 - w) >= ord(w) + rel_prec, for w a square in Q_ell."""
    w = Fraction(w)
    n = arith.ord_p(w, ell)
    assert n % 2 == 0 and is_square_in_Ql(w, ell)
    u = w / Fraction(ell) ** n
    m = ell ** (rel_prec + (3 if ell == 2 else 0))
    u_int = arith.reduce_unit_mod(u, m)
    y0 = _sqrt_unit_mod_power(u_int, ell, rel_prec + (3 if ell == 2 else 0))
    return Fraction(ell) ** (n // 2) * y0


# --------------------------------------------------------------------------
# point counting over F_l
# --------------------------------------------------------------------------


def count_points_Fl(f: IntPoly, d: int, ell: int) -> int:
    """#C~_d(F_ell) for the twist d y^2 = f(x) at a good odd prime ell not
    dividing d, including points at infinity (1 for odd degree; for even
    degree 2 or 0 as d*lc is or is not a square mod ell)."""
    if not poly.is_good_prime(f, ell):
        raise NotGoodPrime(f"{ell} is not good for f")
    if d % ell == 0:
        raise ValueError("ell must not divide d")
    cs = poly.reduce_mod_p(f, ell)
    squares = {(x * x) % ell for x in range(1, (ell + 1) // 2 + 1)}
    dmod = d % ell
    count = 0
    for x in range(ell):
        v = poly.eval_mod_p(cs, x, ell)
        if v == 0:
            count += 1
        elif (v * dmod) % ell in squares:
            count += 2
    if f.degree % 2 == 1:
        count += 1
    else:
        count += 2 if (f.lc * d) % ell in squares else 0
    return count


# --------------------------------------------------------------------------
# certificates and reports
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HenselPoint:
    """Approximate point certifying a nontrivial Q_ell point.

    Guarantee: ord_ell(d*y^2 - f(x)) >= prec and prec > 2*ord_ell(2*d*y),
    so Newton's method converges from y to an exact nonzero y-coordinate.
    """

    x: Rat
    y: Rat
    prec: int

    kind = "hensel_point"


@dataclass(frozen=True)
class InfinityPoint:
    """A point at infinity (a trivial point: never certifies nontrivial
    solvability, present for schema completeness)."""

    kind = "infinity_point"


@dataclass(frozen=True)
class RealWitness:
    """A rational r with d*f(r) > 0."""

    r: Rat

    kind = "real_witness"


@dataclass(frozen=True)
class ExhaustionTranscript:
    """Finite residue-class exhaustion proving insolvability over Q_ell.

    Each chart record is a nested node dict covering all residue classes
    at each depth; see verify_transcript for the checkable semantics.
    """

    depth_cap: int
    charts: tuple[dict, ...]

    kind = "exhaustion"


@dataclass(frozen=True)
class CountingBound:
    """Citation-style certificate for good ell >= n0 not dividing d: the
    curve has at least 2g+5 points over F_ell, hence an affine point with
    y != 0 that Hensel-lifts."""

    n0: int

    kind = "counting_bound"


Certificate = Union[HenselPoint, InfinityPoint, RealWitness, ExhaustionTranscript, CountingBound]


@dataclass(frozen=True)
class TwistLocalReport:
    place: Union[int, str]  # a prime, or "real"
    solvable: bool
    certificate: Optional[Certificate]

    def to_json_dict(self) -> dict:
        cert: Optional[dict] = None
        c = self.certificate
        if isinstance(c, HenselPoint):
            cert = {"kind": c.kind, "x": _rat_str(c.x), "y": _rat_str(c.y), "prec": c.prec}
        elif isinstance(c, InfinityPoint):
            cert = {"kind": c.kind}
        elif isinstance(c, RealWitness):
            cert = {"kind": c.kind, "r": _rat_str(c.r)}
        elif isinstance(c, ExhaustionTranscript):
            cert = {"kind": c.kind, "depth_cap": c.depth_cap, "charts": list(c.charts)}
        elif isinstance(c, CountingBound):
            cert = {"kind": c.kind, "n0": c.n0}
        return {"place": self.place, "solvable": self.solvable, "certificate": cert}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "TwistLocalReport":
        c = obj.get("certificate")
        cert: Optional[Certificate] = None
        if c is not None:
            kind = c["kind"]
            if kind == "hensel_point":
                cert = HenselPoint(_rat_parse(c["x"]), _rat_parse(c["y"]), int(c["prec"]))
            elif kind == "infinity_point":
                cert = InfinityPoint()
            elif kind == "real_witness":
                cert = RealWitness(_rat_parse(c["r"]))
            elif kind == "exhaustion":
                cert = ExhaustionTranscript(int(c["depth_cap"]), tuple(c["charts"]))
            elif kind == "counting_bound":
                cert = CountingBound(int(c["n0"]))
            else:
                raise ValueError(f"unknown certificate kind {kind!r}")
        return cls(place=obj["place"], solvable=bool(obj["solvable"]), certificate=cert)


def _rat_str(r: Rat) -> str:
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}" if r.denominator != 1 else str(r.numerator)


def _rat_parse(s: str) -> Rat:
    return Fraction(s)


@dataclass(frozen=True)
class LocalSearchParams:
    """Tunables for the local decision procedure.

    ``depth_cap`` overrides the per-prime cap 2*ord_ell(4*disc*lc) + 5;
    an override below the floor 2*ord_ell(2*disc*lc) + 3 is rejected.
    ``real_sample_grid`` is the radius of the integer grid tried before
    Sturm bisection at the real place.  Good primes above ``cert_bound``
    get a counting-bound citation instead of an explicit Hensel point.
    """

    n0: int
    depth_cap: Optional[int] = None
    real_sample_grid: int = 8
    cert_bound: int = 10_000


def default_params(f: IntPoly) -> LocalSearchParams:
    return LocalSearchParams(n0=classify.local_threshold(f))


# --------------------------------------------------------------------------
# Hensel lifting (public operation)
# --------------------------------------------------------------------------


def hensel_lift(
    f: IntPoly, d: int, ell: int, seed: tuple[int, int], precision: int
) -> tuple[int, int]:
    """Lift a nonsingular mod-ell point of d y^2 = f(x) to mod ell^k.

    The seed (alpha, beta) must satisfy d beta^2 = f(alpha) mod ell, and
    the gradient (-f'(alpha), 2 d beta) must be nonzero mod ell.
    """
    alpha, beta = seed[0] % ell, seed[1] % ell
    if (d * beta * beta - f.eval_int(alpha)) % ell != 0:
        raise ValueError("seed does not lie on the curve mod ell")
    fp = poly.derivative(f)
    dfx = (-fp.eval_int(alpha)) % ell
    dfy = (2 * d * beta) % ell
    if dfx == 0 and dfy == 0:
        raise SingularSeed(f"gradient vanishes at seed ({alpha}, {beta}) mod {ell}")
    x, y = alpha, beta
    prec = 1
    while prec < precision:
        prec = min(2 * prec, precision)
        m = ell**prec
        if dfy != 0:
            # solve d y^2 = f(x) for y, x fixed
            r = (d * y * y - f.eval_int(x)) % m
            y = (y - r * pow(2 * d * y, -1, m)) % m
        else:
            # solve f(x) = d beta^2 for x, y fixed
            r = (f.eval_int(x) - d * y * y) % m
            x = (x - r * pow(fp.eval_int(x), -1, m)) % m
    m = ell**precision
    assert (d * y * y - f.eval_int(x)) % m == 0
    return x % m, y % m


# --------------------------------------------------------------------------
# the two-chart decision engine
# --------------------------------------------------------------------------


def _content(coeffs: Sequence[int]) -> int:
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    return g


def _newton_root(coeffs: Sequence[int], x0: int, ell: int, target: int) -> int:
    """Refine x0 to r with ord_ell(g(r)) >= target.

    Requires ord(g(x0)) > 2*ord(g'(x0)) (Newton's convergence condition);
    asserts progress on every step.
    """
    g = list(coeffs)
    gp = [i * c for i, c in enumerate(g)][1:]

    def ev(cs, x):
        v = 0
        for c in reversed(cs):
            v = v * x + c
        return v

    x = x0
    mu = arith._ord_int(ev(gp, x), ell) if ev(gp, x) != 0 else 0
    for _ in range(target + 8):
        v = ev(g, x)
        if v == 0:
            return x
        k = arith._ord_int(v, ell)
        if k >= target:
            return x
        m = ell ** (2 * (k - mu) + mu + 4)
        dv = ev(gp, x)
        dv_unit = dv // ell**mu
        step = (v // ell**mu) * pow(dv_unit, -1, m) % m
        x = x - step
    raise InternalSearchExhausted("newton refinement failed to reach target precision")


@dataclass(frozen=True)
class _ChartCtx:
    """Original chart polynomial and the affine map back to its variable.

    A node at depth k works on g_k(s) with the chart variable
    t = center + scale * s; witnesses are returned and verified in
    t-coordinates against (f_chart, c0) so their soundness never depends
    on the node-level bookkeeping.
    """

    f_chart: IntPoly
    c0: int
    skip_zero: bool


class _Decision:
    __slots__ = ("solvable", "witness", "node")

    def __init__(self, solvable, witness=None, node=None):
        self.solvable = solvable
        self.witness = witness  # integer in the chart variable
        self.node = node  # transcript node when not solvable


def _make_check(ctx: _ChartCtx, ell: int):
    def check(t: int) -> bool:
        if t == 0 and ctx.skip_zero:
            return False
        v = ctx.f_chart.eval_int(t)
        return v != 0 and is_square_in_Ql(ctx.c0 * v, ell)

    return check


def _decide_chart(
    g: IntPoly,
    c: int,
    ell: int,
    depth: int,
    cap: int,
    ctx: _ChartCtx,
    center: int,
    scale: int,
) -> _Decision:
    """Decide: exists s in Z_ell with c*g(s) a nonzero square in Q_ell,
    where t = center + scale*s in the chart variable.

    Returns a witness t, or a transcript node covering all residue classes.
    """
    cnt = _content(g.coeffs)
    if cnt > 1:
        g = IntPoly([x // cnt for x in g.coeffs])
        c = arith.squarefree_part_int(c * cnt)
    gp_coeffs = [i * co for i, co in enumerate(g.coeffs)][1:] or [0]
    check = _make_check(ctx, ell)

    def class_witness(a: int, step_mod: int) -> int:
        """Any witness in the class s = a (mod step_mod): the unit square
        class there is constant, so pushing deeper into the class keeps
        the value's class while avoiding the excluded point."""
        if check(center + scale * a):
            return center + scale * a
        for i in range(0, 40):
            t = center + scale * (a + step_mod * ell**i)
            if check(t):
                return t
        raise InternalSearchExhausted("could not realize a unit-class witness")

    node: dict = {"depth": depth, "poly": list(g.coeffs), "c": c, "classes": []}

    if ell == 2:
        for a in range(8):
            v = g.eval_int(a)
            if v % 2 == 0:
                continue  # covered by the mod-2 recursion classes
            if is_square_in_Ql(c * v, 2):
                return _Decision(True, witness=class_witness(a, 8))
            node["classes"].append({"rep": a, "status": "excluded"})
        for a in range(2):
            if g.eval_int(a) % 2 != 0:
                continue
            if _ev(gp_coeffs, a) % 2 != 0:
                t = _witness_near_simple_root(g, ell, a, center, scale, check)
                return _Decision(True, witness=t)
            if depth >= cap:
                t = _witness_at_cap(ell, center + scale * a, ctx, check)
                return _Decision(True, witness=t)
            sub = poly.taylor_shift(g, a)
            sub = IntPoly([co * (2**i) for i, co in enumerate(sub.coeffs)])
            child = _decide_chart(sub, c, ell, depth + 1, cap, ctx, center + scale * a, scale * 2)
            if child.solvable:
                return child
            node["classes"].append({"rep": a, "status": "recursed", "child": child.node})
        return _Decision(False, node=node)

    for a in range(ell):
        v = g.eval_int(a)
        if v % ell != 0:
            if is_square_in_Ql(c * v, ell):
                return _Decision(True, witness=class_witness(a, ell))
            node["classes"].append({"rep": a, "status": "excluded"})
            continue
        if _ev(gp_coeffs, a) % ell != 0:
            t = _witness_near_simple_root(g, ell, a, center, scale, check)
            return _Decision(True, witness=t)
        if depth >= cap:
            t = _witness_at_cap(ell, center + scale * a, ctx, check)
            return _Decision(True, witness=t)
        sub = poly.taylor_shift(g, a)
        sub = IntPoly([co * (ell**i) for i, co in enumerate(sub.coeffs)])
        child = _decide_chart(sub, c, ell, depth + 1, cap, ctx, center + scale * a, scale * ell)
        if child.solvable:
            return child
        node["classes"].append({"rep": a, "status": "recursed", "child": child.node})
    return _Decision(False, node=node)


def _ev(coeffs: Sequence[int], x: int) -> int:
    v = 0
    for c in reversed(coeffs):
        v = v * x + c
    return v


def _witness_near_simple_root(
    g: IntPoly, ell: int, a: int, center: int, scale: int, check
) -> int:
    """Witness in the class of a simple root of g mod ell.

    Near a simple root, the valuation and unit class of the value are both
    freely adjustable, so the square class is always reachable; every
    candidate is verified exactly against the chart polynomial.
    """
    r = _newton_root(g.coeffs, a, ell, 40)
    units = (1, 3, 5, 7) if ell == 2 else range(1, ell)
    for j in range(1, 24):
        for u in units:
            t = center + scale * (r + u * ell**j)
            if check(t):
                return t
    raise InternalSearchExhausted("no witness near a simple root (impossible)")


def _witness_at_cap(ell: int, t_center: int, ctx: _ChartCtx, check) -> int:
    """Witness for a class that survives to the depth cap.

    At the cap, the chart value at the class center has valuation above
    twice ord_ell of Res(f, f'), so Newton (in the chart variable, from the
    center) converges to a genuine root of the chart polynomial, and
    witnesses exist arbitrarily close to it.
    """
    f = ctx.f_chart
    fp = [i * co for i, co in enumerate(f.coeffs)][1:]
    dv = _ev(fp, t_center)
    assert dv != 0
    mu = arith._ord_int(dv, ell)
    v0 = f.eval_int(t_center)
    assert v0 == 0 or arith._ord_int(v0, ell) > 2 * mu
    r = _newton_root(f.coeffs, t_center, ell, 4 * mu + 60)
    units = (1, 3, 5, 7) if ell == 2 else range(1, ell)
    for j in range(mu + 1, 3 * mu + 30):
        for u in units:
            t = r + u * ell**j
            if check(t):
                return t
    raise InternalSearchExhausted("no witness near a capped class (impossible)")


def _depth_cap(f_chart: IntPoly, ell: int, override: Optional[int]) -> int:
    disc = poly.discriminant(f_chart)
    auto = 2 * arith._ord_int(4 * disc * f_chart.lc, ell) + 5
    if override is None:
        return auto
    floor = 2 * arith._ord_int(2 * disc * f_chart.lc, ell) + 3
    if override < floor:
        raise DepthCapTooSmall(
            f"cap {override} below floor {floor} for ell={ell}"
        )
    return override


def _chart_infinity_poly(f: IntPoly) -> IntPoly:
    n = f.degree + (f.degree % 2)
    return poly.reverse(f, n)


def decide_Ql_by_exhaustion(
    f: IntPoly, d: int, ell: int, depth_override: Optional[int] = None
) -> tuple[bool, Optional[Rat], Optional[ExhaustionTranscript]]:
    """Complete decision over Q_ell by two-chart bounded lifting.

    Chart one covers x in Z_ell; the chart at infinity covers |x| > 1 via
    x = 1/u with u in ell*Z_ell, using the even-degree reversal so the
    square class is preserved.  Returns (solvable, witness x, transcript).
    """
    cap1 = _depth_cap(f, ell, depth_override)
    ctx1 = _ChartCtx(f_chart=f, c0=d, skip_zero=False)
    dec1 = _decide_chart(f, d, ell, 0, cap1, ctx1, center=0, scale=1)
    if dec1.solvable:
        assert _make_check(ctx1, ell)(dec1.witness)
        return True, Fraction(dec1.witness), None
    frev = _chart_infinity_poly(f)
    cap2 = _depth_cap(frev, ell, depth_override)
    ctx2 = _ChartCtx(f_chart=frev, c0=d, skip_zero=True)
    sub = IntPoly([co * (ell**i) for i, co in enumerate(frev.coeffs)])
    dec2 = _decide_chart(sub, d, ell, 1, cap2, ctx2, center=0, scale=ell)
    if dec2.solvable:
        u = dec2.witness
        assert u != 0 and u % ell == 0 and _make_check(ctx2, ell)(u)
        return True, Fraction(1, u), None
    transcript = ExhaustionTranscript(
        depth_cap=max(cap1, cap2),
        charts=(
            {"chart": "finite", "depth_cap": cap1, "node": dec1.node},
            {"chart": "infinity", "depth_cap": cap2, "node": dec2.node},
        ),
    )
    return False, None, transcript


def verify_transcript(f: IntPoly, d: int, ell: int, transcript: ExhaustionTranscript) -> bool:
    """Re-verify an insolvability transcript from scratch.

    Checks, for every node: the recorded polynomial matches the recorded
    substitution chain, every residue class is covered by an exclusion or
    a recursion, every exclusion really is a non-square unit class, and
    every recursion child is consistent.
    """
    charts = {c["chart"]: c for c in transcript.charts}
    ok = _verify_node(IntPoly(f.coeffs), d, ell, charts["finite"]["node"])
    frev = _chart_infinity_poly(f)
    sub = IntPoly([co * (ell**i) for i, co in enumerate(frev.coeffs)])
    ok = ok and _verify_node(sub, d, ell, charts["infinity"]["node"])
    return ok


def _verify_node(g: IntPoly, c: int, ell: int, node: dict) -> bool:
    cnt = _content(g.coeffs)
    if cnt > 1:
        g = IntPoly([x // cnt for x in g.coeffs])
        c = arith.squarefree_part_int(c * cnt)
    if list(g.coeffs) != node["poly"] or c != node["c"]:
        return False
    recs = {r["rep"]: r for r in node["classes"]}
    if ell == 2:
        for a in range(8):
            v = g.eval_int(a)
            if v % 2:
                r = recs.get(a)
                if r is None or r["status"] != "excluded":
                    return False
                if v != 0 and is_square_in_Ql(c * v, 2):
                    return False
        for a in range(2):
            if g.eval_int(a) % 2 == 0:
                r = recs.get(a)
                if r is None or r["status"] != "recursed":
                    return False
                sub = poly.taylor_shift(g, a)
                sub = IntPoly([co * (2**i) for i, co in enumerate(sub.coeffs)])
                if not _verify_node(sub, c, 2, r["child"]):
                    return False
        return True
    for a in range(ell):
        r = recs.get(a)
        if r is None:
            return False
        v = g.eval_int(a)
        if r["status"] == "excluded":
            if v % ell == 0:
                return False
            if is_square_in_Ql(c * v, ell):
                return False
        elif r["status"] == "recursed":
            if v % ell != 0:
                return False
            sub = poly.taylor_shift(g, a)
            sub = IntPoly([co * (ell**i) for i, co in enumerate(sub.coeffs)])
            if not _verify_node(sub, c, ell, r["child"]):
                return False
        else:
            return False
    return True


# --------------------------------------------------------------------------
# certificates from witnesses
# --------------------------------------------------------------------------


def _hensel_certificate(f: IntPoly, d: int, ell: int, x: Rat) -> HenselPoint:
    """Build a verifiable HenselPoint at x, where d*f(x) is a nonzero
    square in Q_ell."""
    w = poly.eval_rat(f, x) / d
    # rel precision comfortably past the Newton threshold 2*ord(2dy)
    y = padic_sqrt(w, ell, rel_prec=12 + 2 * abs(arith.ord_p(Fraction(d), ell)))
    err = d * y * y - poly.eval_rat(f, x)
    prec = arith.ord_p(err, ell) if err != 0 else 10**6
    assert prec > 2 * arith.ord_p(2 * d * y, ell)
    return HenselPoint(x=x, y=y, prec=prec)


def verify_certificate(f: IntPoly, d: int, report: TwistLocalReport) -> bool:
    """Re-check a report's certificate against its defining inequalities."""
    c = report.certificate
    if isinstance(c, HenselPoint):
        err = d * c.y * c.y - poly.eval_rat(f, c.x)
        ell = report.place
        if c.y == 0:
            return False
        lhs = arith.ord_p(err, ell) if err != 0 else 10**6
        return lhs >= c.prec and c.prec > 2 * arith.ord_p(2 * d * c.y, ell)
    if isinstance(c, RealWitness):
        return d * poly.eval_rat(f, c.r) > 0
    if isinstance(c, ExhaustionTranscript):
        return verify_transcript(f, d, report.place, c)
    if isinstance(c, CountingBound):
        ell = report.place
        return ell >= c.n0 and d % ell != 0 and poly.is_good_prime(f, ell)
    return False


# --------------------------------------------------------------------------
# the main local decision
# --------------------------------------------------------------------------


def has_real_point(f: IntPoly, d: int, grid: int = 8) -> TwistLocalReport:
    """Exact decision of whether d*f(r) > 0 for some rational r."""
    if d == 0:
        raise ValueError("d must be nonzero")
    for t in range(0, grid + 1):
        for r in ((t, -t) if t else (0,)):
            if d * f.eval_int(r) > 0:
                return TwistLocalReport(REAL_PLACE, True, RealWitness(Fraction(r)))
    if f.degree == 0:
        return TwistLocalReport(REAL_PLACE, False, None)  # grid covered d*f(0)
    lead = d * f.lc
    bound = 2 + max(abs(c) for c in f.coeffs[:-1]) // abs(f.lc)
    if lead > 0:
        r = Fraction(bound)
        assert d * poly.eval_rat(f, r) > 0
        return TwistLocalReport(REAL_PLACE, True, RealWitness(r))
    if f.degree % 2 == 1:
        r = Fraction(-bound)
        assert d * poly.eval_rat(f, r) > 0
        return TwistLocalReport(REAL_PLACE, True, RealWitness(r))
    # even degree, negative at both infinities: positive values exist iff
    # d*f has a real root; isolate sign changes exactly with Sturm
    g = [Fraction(d * c) for c in f.coeffs]
    witness = _sturm_positive_point(g, Fraction(-bound), Fraction(bound))
    if witness is not None:
        return TwistLocalReport(REAL_PLACE, True, RealWitness(witness))
    return TwistLocalReport(REAL_PLACE, False, None)


def _sturm_chain(g: list[Fraction]) -> list[list[Fraction]]:
    def norm(p):
        while len(p) > 1 and p[-1] == 0:
            p.pop()
        return p

    def rem(a, b):
        a = a[:]
        while len(a) >= len(b) and any(a):
            if a[-1] == 0:
                a.pop()
                continue
            q = a[-1] / b[-1]
            off = len(a) - len(b)
            for i in range(len(b)):
                a[off + i] -= q * b[i]
            a.pop()
        return norm(a or [Fraction(0)])

    chain = [norm(g[:]), norm([i * c for i, c in enumerate(g)][1:])]
    while len(chain[-1]) > 1 or chain[-1][0] != 0:
        r = rem(chain[-2], chain[-1])
        r = [-c for c in r]
        if len(r) == 1 and r[0] == 0:
            break
        chain.append(r)
    return chain


def _sign_changes(chain, x: Fraction) -> int:
    signs = []
    for p in chain:
        v = Fraction(0)
        for c in reversed(p):
            v = v * x + c
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _sturm_positive_point(g: list[Fraction], lo: Fraction, hi: Fraction) -> Optional[Fraction]:
    """A rational point where g > 0, if g has any real root (g < 0 at both
    ends, even degree); None when g has no real roots."""

    def ev(x):
        v = Fraction(0)
        for c in reversed(g):
            v = v * x + c
        return v

    chain = _sturm_chain(g)
    total = _sign_changes(chain, lo) - _sign_changes(chain, hi)
    if total == 0:
        return None
    # bisect: maintain intervals carrying at least one root; evaluate
    # midpoints, return as soon as a positive value appears
    intervals = [(lo, hi, total)]
    for _ in range(200):
        nxt = []
        for a, b, cnt in intervals:
            mid = (a + b) / 2
            if ev(mid) > 0:
                return mid
            left = _sign_changes(chain, a) - _sign_changes(chain, mid)
            right = cnt - left
            if left > 0:
                nxt.append((a, mid, left))
            if right > 0:
                nxt.append((mid, b, right))
        intervals = nxt
    raise InternalSearchExhausted("sturm bisection failed to surface a positive value")


def has_nontrivial_Ql_point(
    f: IntPoly,
    d: int,
    ell: int,
    params: Optional[LocalSearchParams] = None,
) -> TwistLocalReport:
    """Decide whether d*y^2 = f(x) has a Q_ell point with y != 0.

    Strategy: good ell >= n0 not dividing d is solvable by point counting
    (explicit Hensel certificate below ``cert_bound``); ell >= n0 dividing
    d uses the odd-degree reversal device or, for even degree, the
    root-mod-ell criterion with the Taylor-shift construction; everything
    else is decided by the complete two-chart exhaustion.
    """
    if not poly.is_separable(f):
        raise ValueError("f must be separable")
    if not arith.is_squarefree(d):
        raise ValueError("d must be a nonzero squarefree integer")
    if not arith.is_prime(ell):
        raise ValueError("ell must be prime (use has_real_point for the real place)")
    if params is None:
        params = default_params(f)
    if ell >= params.n0 and d % ell != 0:
        if ell > params.cert_bound:
            return TwistLocalReport(ell, True, CountingBound(params.n0))
        x = _find_affine_point(f, d, ell)
        return TwistLocalReport(ell, True, _hensel_certificate(f, d, ell, Fraction(x)))
    if ell >= params.n0 and d % ell == 0:
        if f.degree % 2 == 1:
            # x = 1/(lc*d): the reversal evaluates to d * (square unit)
            x = Fraction(1, f.lc * d)
            assert is_square_in_Ql(d * poly.eval_rat(f, x), ell)
            return TwistLocalReport(ell, True, _hensel_certificate(f, d, ell, x))
        if poly.has_root_mod_p(f, ell):
            x = _even_degree_dividing_witness(f, d, ell)
            return TwistLocalReport(ell, True, _hensel_certificate(f, d, ell, x))
        solvable, x, transcript = decide_Ql_by_exhaustion(f, d, ell, params.depth_cap)
        assert not solvable
        return TwistLocalReport(ell, False, transcript)
    solvable, x, transcript = decide_Ql_by_exhaustion(f, d, ell, params.depth_cap)
    if solvable:
        return TwistLocalReport(ell, True, _hensel_certificate(f, d, ell, x))
    return TwistLocalReport(ell, False, transcript)


def _find_affine_point(f: IntPoly, d: int, ell: int) -> int:
    """x with f(x) != 0 mod ell and d*f(x) a square mod ell (exists for
    good ell >= n0 not dividing d, by the Hasse-Weil count)."""
    cs = poly.reduce_mod_p(f, ell)
    squares = {(t * t) % ell for t in range(1, (ell + 1) // 2 + 1)}
    for x in range(ell):
        v = poly.eval_mod_p(cs, x, ell)
        if v != 0 and (v * d) % ell in squares:
            return x
    raise InternalSearchExhausted(
        f"no affine point mod {ell}: counting guarantee violated (bug)"
    )


def _even_degree_dividing_witness(f: IntPoly, d: int, ell: int) -> Rat:
    """The Taylor-shift witness for even degree, ell | d, root mod ell.

    From n with ord(f(n)) = 2k-1 odd and ell not dividing f'(n), choosing
    b with b*t*f'(n) = 1 - s*t (mod ell) makes d*f(n + ell^(2k-1)*b) equal
    to ell^(2k) times a unit that is 1 mod ell.
    """
    n = classify.witness_odd_valuation(f, ell)
    fn = f.eval_int(n)
    k2 = arith._ord_int(fn, ell)  # odd, = 2k - 1
    s = fn // ell**k2
    t = d // ell
    fpn = poly.derivative(f).eval_int(n)
    b = (1 - s * t) * pow(t * fpn, -1, ell) % ell
    r = Fraction(n + ell**k2 * b)
    assert is_square_in_Ql(d * poly.eval_rat(f, r), ell)
    return r


def pointless_obstruction(f: IntPoly, p: int):
    """If C: y^2 = f(x) (even degree) has no F_p point at the good prime p,
    every squarefree d that is a nonzero square mod p has no nontrivial
    Q_p point on C_d; returns the statement, or None."""
    if f.degree % 2 == 1:
        raise ValueError("odd-degree curves always have a point at infinity")
    if not poly.is_good_prime(f, p):
        raise NotGoodPrime(f"{p} is not good for f")
    if count_points_Fl(f, 1, p) != 0:
        return None
    qrs = tuple(sorted({(x * x) % p for x in range(1, p)}))
    return ObstructionStatement(p=p, qr_classes=qrs)


@dataclass(frozen=True)
class ObstructionStatement:
    """C(F_p) is empty: no twist by a squarefree d in a nonzero square
    class mod p has a nontrivial Q_p point."""

    p: int
    qr_classes: tuple[int, ...]


# --------------------------------------------------------------------------
# everywhere-locally-solvable d
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EverywhereLocalResult:
    d: int
    q: int
    delta: int
    t: int  # the base point: d*f(t) > 0 and a square at all ell < n0
    reports: tuple[TwistLocalReport, ...]


def everywhere_local_d(
    f: IntPoly,
    p: int,
    m: int,
    count: int,
    params: Optional[LocalSearchParams] = None,
    budget: int = 1_000_000,
    allow_small_p: bool = False,
) -> list[EverywhereLocalResult]:
    """``count`` squarefree d = m (mod p) whose twists have nontrivial
    points over every completion of Q, with per-place reports.

    Construction: pick t with f(t) != 0, absorb the valuation parities of
    f(t) at all ell < n0 into a squarefree delta with delta*f(t) > 0, then
    search primes q making q*u_ell a square mod each ell (q = u_2^{-1} mod
    8, q = u_ell mod ell, q = delta^{-1} m mod p) and set d = delta*q; for
    even degree the prime stream is additionally filtered on f having a
    root mod q.  Small places get explicit Hensel certificates at the base
    point, ell = q gets the dividing-prime construction, and the remaining
    good primes get the counting-bound citation.
    """
    if f.degree < 3:
        raise ValueError("everywhere_local_d expects deg f >= 3")
    if params is None:
        params = default_params(f)
    n0 = params.n0
    if not arith.is_prime(p) or (p < n0 and not allow_small_p):
        raise ValueError(
            f"p must be a prime >= n0 = {n0} (pass allow_small_p=True to experiment below it)"
        )
    if m % p == 0:
        raise ValueError("m must be coprime to p")

    t = 0
    while f.eval_int(t) == 0:
        t = -t + 1 if t <= 0 else -t
    ft = f.eval_int(t)
    eps = 1 if ft > 0 else -1
    small_primes = [ell for ell in arith.primes_up_to(n0 - 1)]
    delta = eps
    for ell in small_primes:
        if arith._ord_int(ft, ell) % 2 == 1:
            delta *= ell
    dft = delta * ft
    assert dft > 0
    congs = [Congruence(arith.inv_mod(delta, p) * m % p, p)]
    for ell in small_primes:
        e = arith._ord_int(dft, ell)
        assert e % 2 == 0
        u = dft // ell**e
        if ell == 2:
            congs.append(Congruence(pow(u, -1, 8), 8))
        else:
            congs.append(Congruence(u % ell, ell))

    out: list[EverywhereLocalResult] = []
    skip = 0
    tried = 0
    even = f.degree % 2 == 0
    while len(out) < count:
        if tried >= budget:
            raise BudgetExhausted(
                f"found {len(out)} of {count} everywhere-local d within {budget} prime candidates"
            )
        q = arith.prime_in_ap(congs, skip=skip, budget=budget)
        skip += 1
        tried += 1
        if even and not poly.has_root_mod_p(f, q):
            continue
        d = delta * q
        assert d % p == m % p and arith.is_squarefree(d)
        reports = []
        for ell in small_primes:
            assert is_square_in_Ql(d * ft, ell)
            reports.append(TwistLocalReport(ell, True, _hensel_certificate(f, d, ell, Fraction(t))))
        reports.append(has_nontrivial_Ql_point(f, d, q, params))
        if p != q:
            reports.append(has_nontrivial_Ql_point(f, d, p, params))
        reports.append(has_real_point(f, d, params.real_sample_grid))
        reports.append(TwistLocalReport("other-good-primes", True, CountingBound(n0)))
        if not all(r.solvable for r in reports):  # pragma: no cover
            raise InternalSearchExhausted("constructed d failed its own local checks")
        out.append(
            EverywhereLocalResult(d=d, q=q, delta=delta, t=t, reports=tuple(reports))
        )
    return out
