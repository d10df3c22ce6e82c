"""Bulk squarefree-part extraction for survey workloads.

Uses the C fast path's capped mode, in which a cofactor that is provably a
product of two distinct large primes is kept whole (it is squarefree, so
it contributes itself; splitting it would cost the expensive half of
Pollard rho for no information).  Atom cofactors are cross-checked for
shared primes against the other parts; any interaction falls back to the
complete factorization.
"""

from __future__ import annotations

import math

from . import arith

_M64 = (1 << 64) - 1


class BulkStats:
    __slots__ = ("values", "atoms", "fallbacks")

    def __init__(self):
        self.values = 0
        self.atoms = 0
        self.fallbacks = 0

    def merge(self, other: "BulkStats") -> None:
        self.values += other.values
        self.atoms += other.atoms
        self.fallbacks += other.fallbacks

    def as_dict(self) -> dict:
        return {"values": self.values, "semiprime_cofactors": self.atoms, "full_refactor_fallbacks": self.fallbacks}


def squarefree_part_bulk(n: int, stats: BulkStats | None = None, thorough: bool = False) -> int:
    """Squarefree part of n, optimized for large batches.

    ``thorough`` forces complete factorization (no semiprime shortcut).
    """
    if n == 0:
        raise ValueError("squarefree part of 0 is undefined")
    if stats is not None:
        stats.values += 1
    m = abs(n)
    if arith._ff is None or m.bit_length() > 94 or thorough:
        return arith.squarefree_part_int(n)
    parts = arith._ff.factor(m >> 64, m & _M64, 1)
    atoms = []
    big_primes = []
    d = 1
    for hi, lo, e, kind in parts:
        p = (hi << 64) | lo
        if kind == 1:
            atoms.append(p)
        elif p > arith.TRIAL_BOUND:
            big_primes.append(p)
        if e % 2:
            d *= p
    if atoms:
        if stats is not None:
            stats.atoms += len(atoms)
        for a in atoms:
            for p in big_primes:
                if a % p == 0:
                    if stats is not None:
                        stats.fallbacks += 1
                    return arith.squarefree_part_int(n)
        for i in range(len(atoms)):
            for j in range(i + 1, len(atoms)):
                if math.gcd(atoms[i], atoms[j]) != 1:
                    if stats is not None:
                        stats.fallbacks += 1
                    return arith.squarefree_part_int(n)
    return d if n > 0 else -d
