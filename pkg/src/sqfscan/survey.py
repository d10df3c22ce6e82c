"""Height-bounded surveys of squarefree parts of polynomial values.

Enumerates all rationals r with H(r) <= B, collects the set of squarefree
parts of f(r), reduces it modulo each prime up to a bound, and reports the
primes with a missing nonzero residue class ("exceptional" primes, always
relative to the height bound).  Also: polynomial-family scans and the
counting series E(t) and D~(t).

Reports are deterministic: runs with different worker counts produce
byte-identical JSON (wall-clock goes to the log, never into the report).
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import multiprocessing
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from . import arith, poly
from .arith import Rat
from .arith_bulk import BulkStats, squarefree_part_bulk
from .poly import IntPoly

log = logging.getLogger("sqfscan.survey")

SCHEMA_VERSION = 1
WITNESS_SAMPLE_SIZE = 1000


@dataclass(frozen=True)
class SurveyConfig:
    f: IntPoly
    height_bound: int
    prime_bound: int
    include_negative: bool = True
    threads: int = 1
    coverage_detail_bound: int = 100
    thorough: bool = False  # force complete factorizations

    def __post_init__(self):
        if self.height_bound < 1:
            raise ValueError("height bound must be >= 1")
        if self.prime_bound < 3:
            raise ValueError("prime bound must be >= 3")
        if not poly.is_separable(self.f):
            raise ValueError("survey needs a separable polynomial")


def enumerate_heights(B: int, include_negative: bool = True) -> Iterator[Rat]:
    """Every rational with H(r) <= B exactly once, ordered by denominator
    then numerator (0 appears with denominator 1)."""
    if B < 1:
        raise ValueError("B must be >= 1")
    for b in range(1, B + 1):
        lo = -B if include_negative else 0
        for a in range(lo, B + 1):
            if a == 0 and b != 1:
                continue
            if math.gcd(abs(a), b) == 1:
                yield Fraction(a, b)


# ---------------------------------------------------------------------------
# the enumeration worker (runs in subprocesses; module-level for pickling)
# ---------------------------------------------------------------------------

_W: dict = {}


def _init_worker(coeffs, B, include_negative, thorough):
    _W["coeffs"] = coeffs
    _W["B"] = B
    _W["neg"] = include_negative
    _W["thorough"] = thorough


def _scan_denominator(b: int):
    """Scan all numerators for denominator b; returns the partial result."""
    coeffs = _W["coeffs"]
    B = _W["B"]
    n = len(coeffs) - 1
    thorough = _W["thorough"]
    # F(a, b) = sum coeffs[i] * a^i * b^(n-i), Horner in a
    w = [c * b ** (n - i) for i, c in enumerate(coeffs)]
    wr = w[::-1]
    deg_odd = n % 2 == 1
    out: set[int] = set()
    witness: dict[int, tuple[int, int, int]] = {}
    stats = BulkStats()
    zeros = 0
    if _W["neg"]:
        numerators = range(-B, B + 1)
    else:
        numerators = range(0, B + 1)
    for a in numerators:
        if (a == 0 and b != 1) or math.gcd(abs(a), b) != 1:
            continue
        v = 0
        for c in wr:
            v = v * a + c
        if v == 0:
            zeros += 1
            continue
        if deg_odd:
            v *= b
        d = squarefree_part_bulk(v, stats, thorough)
        if d not in out:
            out.add(d)
            witness[d] = (b, abs(a), a)
        else:
            prev = witness[d]
            cand = (b, abs(a), a)
            if cand < prev:
                witness[d] = cand
    sample = sorted(((abs(d), d) for d in out))[:WITNESS_SAMPLE_SIZE]
    wit_sample = {d: witness[d] for _, d in sample}
    return out, wit_sample, stats, zeros


@dataclass
class STildeResult:
    values: set[int]
    witness_sample: dict[int, tuple[int, int, int]]  # d -> (b, |a|, a)
    stats: BulkStats
    zeros_skipped: int
    wall_seconds: float = field(default=0.0, compare=False)


def s_tilde(config: SurveyConfig) -> STildeResult:
    """The exact set of squarefree parts S(f(r)) over H(r) <= B."""
    t0 = time.time()
    coeffs = list(config.f.coeffs)
    B = config.height_bound
    tasks = list(range(1, B + 1))
    values: set[int] = set()
    witness: dict[int, tuple[int, int, int]] = {}
    stats = BulkStats()
    zeros = 0

    def absorb(partial):
        nonlocal zeros
        out, wit, st, z = partial
        values.update(out)
        for d, cand in wit.items():
            prev = witness.get(d)
            if prev is None or cand < prev:
                witness[d] = cand
        stats.merge(st)
        zeros += z

    if config.threads <= 1:
        _init_worker(coeffs, B, config.include_negative, config.thorough)
        for b in tasks:
            absorb(_scan_denominator(b))
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(
            processes=config.threads,
            initializer=_init_worker,
            initargs=(coeffs, B, config.include_negative, config.thorough),
        ) as pool:
            for partial in pool.imap_unordered(_scan_denominator, tasks, chunksize=8):
                absorb(partial)

    sample_keys = sorted(((abs(d), d) for d in witness))[:WITNESS_SAMPLE_SIZE]
    witness = {d: witness[d] for _, d in sample_keys}
    wall = time.time() - t0
    log.info(
        "s_tilde: %d values from height %d in %.1fs (%d zero skips)",
        len(values), B, wall, zeros,
    )
    return STildeResult(values, witness, stats, zeros, wall)


def coverage(values: Sequence[int] | set[int], p: int) -> set[int]:
    """The set of residues mod p attained by the value set."""
    return {d % p for d in values}


def _coverage_entry(values, p: int, detail_bound: int) -> tuple[dict, bool]:
    res = coverage(values, p)
    missing = [r for r in range(1, p) if r not in res]
    exceptional = bool(missing)
    if p <= detail_bound:
        entry = {"residues": sorted(res)}
    else:
        entry = {"nonzero_complete": not missing, "has_zero": 0 in res}
        if missing:
            entry["missing"] = missing
    return entry, exceptional


@dataclass
class CoverageReport:
    config: SurveyConfig
    s_tilde_size: int
    exceptional: list[int]
    coverage_map: dict[int, dict]
    witness_sample: list[dict]
    stats: dict

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "coverage_scan",
            "config": {
                "poly": list(self.config.f.coeffs),
                "height_bound": self.config.height_bound,
                "prime_bound": self.config.prime_bound,
                "include_negative": self.config.include_negative,
                "coverage_detail_bound": self.config.coverage_detail_bound,
                "thorough": self.config.thorough,
            },
            "s_tilde_size": self.s_tilde_size,
            "exceptional_primes": self.exceptional,
            "coverage": {str(p): entry for p, entry in sorted(self.coverage_map.items())},
            "witness_sample": self.witness_sample,
            "stats": self.stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["prime,exceptional,has_zero,missing_count,residues"]
        for p, entry in sorted(self.coverage_map.items()):
            if "residues" in entry:
                res = entry["residues"]
                missing = [r for r in range(1, p) if r not in res]
                lines.append(
                    f"{p},{bool(missing)},{0 in res},{len(missing)},{' '.join(map(str, res))}"
                )
            else:
                miss = entry.get("missing", [])
                lines.append(
                    f"{p},{not entry['nonzero_complete']},{entry['has_zero']},{len(miss)},"
                )
        return "\n".join(lines) + "\n"


def exceptional_primes(config: SurveyConfig, precomputed: Optional[STildeResult] = None) -> CoverageReport:
    """Scan all primes up to the bound for missing nonzero residue classes."""
    st = precomputed if precomputed is not None else s_tilde(config)
    values = sorted(st.values)
    exceptional = []
    cov: dict[int, dict] = {}
    for p in arith.primes_up_to(config.prime_bound):
        entry, is_exc = _coverage_entry(values, p, config.coverage_detail_bound)
        cov[p] = entry
        if is_exc:
            exceptional.append(p)
    witness_sample = [
        {"d": d, "r": f"{a}/{b}"}
        for d, (b, _, a) in sorted(st.witness_sample.items(), key=lambda kv: (abs(kv[0]), kv[0]))
    ]
    stats = {
        "values_processed": st.stats.values,
        "zero_values_skipped": st.zeros_skipped,
        "distinct_squarefree_parts": len(values),
        "semiprime_cofactors": st.stats.atoms,
        "full_refactor_fallbacks": st.stats.fallbacks,
    }
    return CoverageReport(
        config=config,
        s_tilde_size=len(values),
        exceptional=exceptional,
        coverage_map=cov,
        witness_sample=witness_sample,
        stats=stats,
    )


# ---------------------------------------------------------------------------
# family scans
# ---------------------------------------------------------------------------


def iter_family(degrees: range, coeff_bound: int) -> Iterator[IntPoly]:
    """All polynomials with the given degrees, |coefficients| <= bound,
    canonicalized to positive leading coefficient, separable only."""
    for deg in degrees:
        for lead in range(1, coeff_bound + 1):
            for rest in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=deg):
                f = IntPoly(list(rest) + [lead])
                if poly.is_separable(f):
                    yield f


def sample_family(degrees: range, coeff_bound: int, count: int, seed: int) -> list[IntPoly]:
    """Deterministic random sample of separable family members."""
    rng = random.Random(seed)
    out = []
    seen = set()
    while len(out) < count:
        deg = rng.choice(list(degrees))
        lead = rng.randint(1, coeff_bound)
        rest = [rng.randint(-coeff_bound, coeff_bound) for _ in range(deg)]
        f = IntPoly(rest + [lead])
        if f.coeffs in seen or not poly.is_separable(f):
            continue
        seen.add(f.coeffs)
        out.append(f)
    return out


@dataclass
class FamilyScanReport:
    degrees: tuple[int, int]
    coeff_bound: int
    height_bound: int
    prime_bound: int
    per_poly: list[dict]
    max_exceptional: Optional[int]
    counts: dict
    expected_size: Optional[int] = None

    def to_json_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "kind": "family_scan",
            "degrees": list(self.degrees),
            "coeff_bound": self.coeff_bound,
            "height_bound": self.height_bound,
            "prime_bound": self.prime_bound,
            "per_poly": self.per_poly,
            "max_exceptional_prime": self.max_exceptional,
            "counts": self.counts,
        }
        if self.expected_size is not None:
            out["expected_size"] = self.expected_size
            out["size_delta"] = self.counts.get("scanned", 0) - self.expected_size
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def family_scan(
    degrees: range,
    coeff_bound: int,
    height_bound: int,
    prime_bound: int,
    threads: int = 1,
    sample: Optional[int] = None,
    seed: int = 0,
    expected_size: Optional[int] = None,
) -> FamilyScanReport:
    """Exceptional-prime scan over a coefficient-bounded family.

    ``sample`` picks a seeded random subset instead of the full family
    (the full degree-4..9 bound-3 family is an overnight-plus job).
    """
    if sample is not None:
        polys = sample_family(degrees, coeff_bound, sample, seed)
    else:
        polys = list(iter_family(degrees, coeff_bound))
    scanned = len(polys)
    per_poly = []
    max_exc: Optional[int] = None
    for f in polys:
        cfg = SurveyConfig(
            f=f,
            height_bound=height_bound,
            prime_bound=prime_bound,
            threads=threads,
            coverage_detail_bound=0,
        )
        rep = exceptional_primes(cfg)
        per_poly.append({"poly": list(f.coeffs), "exceptional": rep.exceptional,
                         "s_tilde_size": rep.s_tilde_size})
        for p in rep.exceptional:
            if max_exc is None or p > max_exc:
                max_exc = p
        log.info("family member %s: exceptional %s", f.format(), rep.exceptional)
    counts = {"scanned": scanned}
    if sample is not None:
        counts["sample"] = sample
        counts["seed"] = seed
    return FamilyScanReport(
        degrees=(degrees.start, degrees.stop - 1),
        coeff_bound=coeff_bound,
        height_bound=height_bound,
        prime_bound=prime_bound,
        per_poly=per_poly,
        max_exceptional=max_exc,
        counts=counts,
        expected_size=expected_size,
    )


# ---------------------------------------------------------------------------
# counting series
# ---------------------------------------------------------------------------


@dataclass
class CountSeries:
    """E(t) is exact for t <= B; D~(t) counts the height-B slice by |d|
    and is an explicit under-approximation of the true D(t)."""

    p: int
    m: int
    height_bound: int
    thresholds: list[int]
    e_counts: list[int]
    d_counts: list[int]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "count_series",
            "class": {"p": self.p, "m": self.m},
            "height_bound": self.height_bound,
            "thresholds": self.thresholds,
            "E": self.e_counts,
            "D_lower_bound": self.d_counts,
            "note": "D counts only the height-bounded slice: a lower bound for the true class count",
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def count_series(
    f: IntPoly, p: int, m: int, thresholds: Sequence[int], height_bound: int
) -> CountSeries:
    if m % p == 0:
        raise ValueError("m must be coprime to p")
    if not poly.is_separable(f):
        raise ValueError("f must be separable")
    thresholds = sorted(thresholds)
    min_height: dict[int, int] = {}
    stats = BulkStats()
    n = f.degree
    for b in range(1, height_bound + 1):
        w = [c * b ** (n - i) for i, c in enumerate(f.coeffs)]
        wr = w[::-1]
        for a in range(-height_bound, height_bound + 1):
            if (a == 0 and b != 1) or math.gcd(abs(a), b) != 1:
                continue
            v = 0
            for c in wr:
                v = v * a + c
            if v == 0:
                continue
            if n % 2 == 1:
                v *= b
            d = squarefree_part_bulk(v, stats)
            h = max(abs(a), b)
            prev = min_height.get(d)
            if prev is None or h < prev:
                min_height[d] = h
    in_class = [(d, h) for d, h in min_height.items() if d % p == m % p]
    e_counts = [sum(1 for _, h in in_class if h <= t) for t in thresholds]
    d_counts = [sum(1 for d, _ in in_class if abs(d) <= t) for t in thresholds]
    return CountSeries(
        p=p, m=m, height_bound=height_bound,
        thresholds=list(thresholds), e_counts=e_counts, d_counts=d_counts,
    )
