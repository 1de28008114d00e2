"""Cyclotomic values, primitive prime divisors R_i(a) and primitive parts k_i(a)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .arith import PrimeSet, factorize, multiplicative_order, valuation

EXCEPTION_PAIRS: frozenset[tuple[int, int]] = frozenset(
    {(2, 1), (2, 6), (-2, 2), (-2, 3), (3, 1), (-3, 2)}
)


def is_exception_pair(a: int, i: int) -> bool:
    return (a, i) in EXCEPTION_PAIRS


def _check_base(a: int) -> None:
    if abs(a) <= 1:
        raise ValueError(f"base must satisfy |a| > 1, got {a}")


def _divisors(d: int) -> list[int]:
    small = [k for k in range(1, math.isqrt(d) + 1) if d % k == 0]
    return sorted(set(small + [d // k for k in small]))


@lru_cache(maxsize=1 << 16)
def _cyclotomic_signed(d: int, a: int) -> int:
    # a^d - 1 = prod_{e | d} Phi_e(a); peel off the proper divisors
    value = a**d - 1
    for e in _divisors(d)[:-1]:
        value //= _cyclotomic_signed(e, a)
    return value


def cyclotomic_eval(d: int, a: int) -> int:
    """|Phi_d(a)| by exact division of a^d - 1 by the lower cyclotomic values."""
    if d < 1:
        raise ValueError("d must be positive")
    _check_base(a)
    return abs(_cyclotomic_signed(d, a))


@dataclass(frozen=True)
class ZsigmondyRecord:
    base: int
    index: int
    primes: PrimeSet
    primitive_part: int
    is_exception: bool


@lru_cache(maxsize=1 << 14)
def _primitive_primes(a: int, i: int) -> PrimeSet:
    phi = cyclotomic_eval(i, a)
    return PrimeSet(r for r in factorize(phi).factors if multiplicative_order(r, a) == i)


def primitive_prime_divisors(a: int, i: int) -> ZsigmondyRecord:
    """R_i(a) = {r prime : e(r, a) = i}, together with k_i(a).

    Candidates come from the factorization of Phi_i(a): a primitive prime
    of a^i - 1 cannot divide Phi_e(a) for a proper divisor e of i, and the
    2-adic convention for e(2, a) keeps 2 inside Phi_1 or Phi_2.
    """
    _check_base(a)
    if i < 1:
        raise ValueError("index must be positive")
    return ZsigmondyRecord(a, i, _primitive_primes(a, i), k(a, i), is_exception_pair(a, i))


def k(a: int, i: int) -> int:
    """Product of the primitive prime divisors of a^i - 1 with multiplicity.

    k_2(a) is read as k_1(-a). An empty product gives 1.
    """
    _check_base(a)
    if i < 1:
        raise ValueError("index must be positive")
    if i == 2:
        a, i = -a, 1
    target = a**i - 1
    return math.prod(r ** valuation(target, r) for r in _primitive_primes(a, i))


def zsigmondy_scan(a_range: Iterable[int], i_range: Iterable[int]) -> list[tuple[int, int]]:
    """All (a, i) in the given ranges with R_i(a) empty, lexicographically."""
    i_values = sorted(set(i_range))
    hits = []
    for a in sorted(set(a_range)):
        for i in i_values:
            _check_base(a)
            if not _primitive_primes(a, i):
                hits.append((a, i))
    return hits


@dataclass(frozen=True)
class Coincidence:
    """Two primitive parts k_i(a^n) = k_j(a^m) > 1 and how the pair resolves."""

    a: int
    i: int
    n: int
    j: int
    m: int
    value: int
    resolution: str  # "in=jm" | "exception" | "violation"


def verify_primitiv(a_max: int, n_max: int, i_max: int) -> list[Coincidence]:
    """Brute-force check that k_i(a^n) = k_j(a^m) forces in = jm.

    Every coincidence with common value > 1 is returned, including the
    reflexive ones. Unordered pairs are listed once, with (i, n) <= (j, m).
    A coincidence with in != jm is labelled "exception" when (a, in) or
    (a, jm) is an exception pair, otherwise "violation".
    """
    if a_max < 2 or n_max < 1 or i_max < 2:
        raise ValueError("need a_max >= 2, n_max >= 1, i_max >= 2")
    out: list[Coincidence] = []
    for a in range(2, a_max + 1):
        table: dict[int, list[tuple[int, int]]] = {}
        for n in range(1, n_max + 1):
            for i in range(1, i_max + 1):
                value = k(a**n, i)
                if value > 1:
                    table.setdefault(value, []).append((i, n))
        for value in sorted(table):
            keys = sorted(table[value])
            for x, (i, n) in enumerate(keys):
                for j, m in keys[x:]:
                    if i * n == j * m:
                        res = "in=jm"
                    elif is_exception_pair(a, i * n) or is_exception_pair(a, j * m):
                        res = "exception"
                    else:
                        res = "violation"
                    out.append(Coincidence(a, i, n, j, m, value, res))
    return out


def violations(coincidences: Iterable[Coincidence]) -> list[Coincidence]:
    return [c for c in coincidences if c.resolution == "violation"]
