"""Exact integer arithmetic: primality, factorization, orders, pi-parts.

Everything here works on Python ints of unbounded size. The only numeric
arrays involved are the small-prime tables fed to the residue kernel in
:mod:`expgraph._kernels`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from . import _kernels

TRIAL_DIVISION_LIMIT = 10**6
MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
DETERMINISTIC_BELOW = 1 << 64

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class FactorizationError(ArithmeticError):
    """Pollard-rho could not split a composite cofactor."""


class PrimeSet(frozenset):
    """A frozenset whose elements are all verified primes."""

    def __new__(cls, elements: Iterable[int] = ()):
        items = [int(x) for x in elements]
        for x in items:
            if not is_prime(x):
                raise ValueError(f"{x} is not prime")
        return super().__new__(cls, items)

    def __repr__(self) -> str:
        return "PrimeSet({" + ", ".join(map(str, sorted(self))) + "})"


@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer together with its complete prime factorization."""

    value: int
    factors: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.value < 1:
            raise ValueError("FactoredInteger holds positive integers only")
        clean = {int(p): int(e) for p, e in sorted(self.factors.items()) if e}
        if any(e < 0 for e in clean.values()):
            raise ValueError("negative exponent")
        if math.prod(p**e for p, e in clean.items()) != self.value:
            raise ValueError(f"factors do not multiply to {self.value}")
        object.__setattr__(self, "factors", MappingProxyType(clean))

    @classmethod
    def from_factors(cls, factors: Mapping[int, int]) -> "FactoredInteger":
        return cls(math.prod(p**e for p, e in factors.items()), factors)

    def __int__(self) -> int:
        return self.value

    def __hash__(self) -> int:
        return hash((self.value, tuple(self.factors.items())))

    @property
    def primes(self) -> PrimeSet:
        return PrimeSet(self.factors)

    def valuation(self, p: int) -> int:
        return self.factors.get(p, 0)

    def __mul__(self, other: "FactoredInteger") -> "FactoredInteger":
        merged = dict(self.factors)
        for p, e in other.factors.items():
            merged[p] = merged.get(p, 0) + e
        return FactoredInteger(self.value * other.value, merged)

    def __pow__(self, k: int) -> "FactoredInteger":
        if k < 0:
            raise ValueError("negative power")
        return FactoredInteger(self.value**k, {p: e * k for p, e in self.factors.items()})

    def exact_divide(self, other: "FactoredInteger | int") -> "FactoredInteger":
        if not isinstance(other, FactoredInteger):
            other = factorize(other)
        out = dict(self.factors)
        for p, e in other.factors.items():
            if out.get(p, 0) < e:
                raise ArithmeticError(f"{other.value} does not divide {self.value}")
            out[p] -= e
        return FactoredInteger(self.value // other.value, out)

    def format(self, sep: str = " * ") -> str:
        if not self.factors:
            return "1"
        return sep.join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors.items())


# --------------------------------------------------------------------------
# primality


def is_prime(n: int) -> bool:
    """Strong-probable-prime test with the fixed witness set.

    Deterministic for n < 2^64 (in fact up to ~3.3e24). Above 2^64 the
    same witnesses are used, so results stay reproducible; callers that
    care can consult :func:`in_probabilistic_regime`.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 47 * 47:
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def in_probabilistic_regime(n: int) -> bool:
    return n >= DETERMINISTIC_BELOW


# --------------------------------------------------------------------------
# factorization


@lru_cache(maxsize=1)
def _trial_primes() -> np.ndarray:
    return _kernels.sieve_primes(TRIAL_DIVISION_LIMIT)


def _brent(n: int, c: int, max_iter: int = 1 << 22) -> int | None:
    """One Pollard-rho run (Brent cycle detection, batched gcds)."""
    y, r, g, q = 2, 1, 1, 1
    m = 128
    x = ys = y
    steps = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        steps += r
        if steps > max_iter:
            return None
    if g == n:
        # batched gcd overshot; replay one step at a time
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def _split(n: int) -> int:
    for c in range(1, 64):
        d = _brent(n, c)
        if d is not None and 1 < d < n:
            return d
    raise FactorizationError(f"Pollard-rho failed to split {n}")


def _factor_cofactor(n: int, out: dict[int, int]) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _split(m)
        stack += [d, m // d]


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> FactoredInteger:
    """Complete factorization: trial division to 10^6, then Pollard-Brent."""
    n = int(n)
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    out: dict[int, int] = {}
    m = n
    primes = _trial_primes()
    bound = min(TRIAL_DIVISION_LIMIT, math.isqrt(m))
    cut = int(np.searchsorted(primes, bound, side="right"))
    if cut:
        res = _kernels.residues(m, primes[:cut])
        for p in primes[:cut][res == 0].tolist():
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m > 1:
        if m <= TRIAL_DIVISION_LIMIT**2 or bound * bound >= m:
            # no prime factor <= min(10^6, sqrt(m)) remains, so m is prime
            out[m] = out.get(m, 0) + 1
        else:
            _factor_cofactor(m, out)
    return FactoredInteger(n, dict(sorted(out.items())))


def prime_set(n: int) -> PrimeSet:
    return factorize(n).primes


# --------------------------------------------------------------------------
# multiplicative order


def _order_from_group_exponent(a: int, m: int, exponent: FactoredInteger) -> int:
    e = exponent.value
    for p, k in exponent.factors.items():
        for _ in range(k):
            if pow(a, e // p, m) == 1:
                e //= p
            else:
                break
    return e


def multiplicative_order(r: int, n: int) -> int:
    """e(r, n): order of n modulo the prime r.

    For r = 2 the convention is e(2, n) = 1 when n = 1 (mod 4) and 2
    otherwise.
    """
    if abs(n) <= 1:
        raise ValueError("multiplicative_order needs |n| > 1")
    if n % r == 0:
        raise ValueError(f"{r} divides {n}")
    if r == 2:
        return 1 if n % 4 == 1 else 2
    return _order_from_group_exponent(n % r, r, factorize(r - 1))


def order_modulo(a: int, m: int) -> int:
    """Order of a in (Z/mZ)^* for an arbitrary modulus m > 1."""
    if m < 2:
        raise ValueError("modulus must exceed 1")
    a %= m
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not a unit modulo {m}")
    # exponent of the unit group (Carmichael lambda)
    lam = FactoredInteger(1)
    for p, k in factorize(m).factors.items():
        if p == 2:
            part = {2: max(0, k - 2) if k >= 3 else k - 1}
            part = FactoredInteger.from_factors(part)
        else:
            part = factorize(p - 1) * FactoredInteger(p ** (k - 1), {p: k - 1})
        lam = _lcm_factored(lam, part)
    return _order_from_group_exponent(a, m, lam)


def _lcm_factored(x: FactoredInteger, y: FactoredInteger) -> FactoredInteger:
    merged = dict(x.factors)
    for p, e in y.factors.items():
        merged[p] = max(merged.get(p, 0), e)
    return FactoredInteger.from_factors(merged)


# --------------------------------------------------------------------------
# pi-parts


def pi_part(n: FactoredInteger | int, pi: Iterable[int]) -> FactoredInteger:
    """Largest divisor of n whose prime support lies in pi."""
    if not isinstance(n, FactoredInteger):
        n = factorize(n)
    keep = set(pi)
    return FactoredInteger.from_factors({p: e for p, e in n.factors.items() if p in keep})


def pi_prime_part(n: FactoredInteger | int, pi: Iterable[int]) -> FactoredInteger:
    """n divided by its pi-part."""
    if not isinstance(n, FactoredInteger):
        n = factorize(n)
    drop = set(pi)
    return FactoredInteger.from_factors({p: e for p, e in n.factors.items() if p not in drop})


def valuation(n: int, p: int) -> int:
    n = abs(n)
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# --------------------------------------------------------------------------
# certified logarithms

_GRID = 1 << 64
_ATANH_TERMS = 24


def _floor_grid(x: Fraction) -> Fraction:
    return Fraction(math.floor(x * _GRID), _GRID)


def _ceil_grid(x: Fraction) -> Fraction:
    return Fraction(math.ceil(x * _GRID), _GRID)


def _ln_bounds(x: Fraction) -> tuple[Fraction, Fraction]:
    # ln x = 2 atanh(y), y = (x-1)/(x+1); for x in [1, 2], 0 <= y <= 1/3
    y = (x - 1) / (x + 1)
    y2 = y * y
    term = y
    lo = Fraction(0)
    for j in range(_ATANH_TERMS):
        lo += term / (2 * j + 1)
        term *= y2
    # remaining terms are positive and bounded by a geometric tail
    tail = term / (2 * _ATANH_TERMS + 1) / (1 - y2)
    return 2 * lo, 2 * (lo + tail)


@lru_cache(maxsize=1)
def ln2_bounds() -> tuple[Fraction, Fraction]:
    lo, hi = _ln_bounds(Fraction(2))
    return _floor_grid(lo), _ceil_grid(hi)


def _log2_of_mantissa(t: int, bits: int) -> tuple[Fraction, Fraction]:
    # t in [2^(bits-1), 2^bits)
    x = Fraction(t, 1 << (bits - 1))
    lo, hi = _ln_bounds(x)
    l2lo, l2hi = ln2_bounds()
    return lo / l2hi, hi / l2lo


def log2_bounds(n: int) -> tuple[Fraction, Fraction]:
    """Rationals lo <= log2(n) <= hi, each on a 2^-64 grid."""
    if n < 1:
        raise ValueError("log2 of non-positive integer")
    if n == 1:
        return Fraction(0), Fraction(0)
    bits = n.bit_length()
    shift = max(0, bits - 64)
    t_lo = n >> shift
    t_hi = t_lo + (1 if (t_lo << shift) != n else 0)
    tb = t_lo.bit_length()
    lo, _ = _log2_of_mantissa(t_lo, tb)
    lo += tb - 1 + shift
    # t_hi may carry into the next power of two
    hb = t_hi.bit_length()
    _, hi = _log2_of_mantissa(t_hi, hb)
    hi += hb - 1 + shift
    return _floor_grid(lo), _ceil_grid(hi)


def log2_factorial_lower_bound(m: int) -> Fraction:
    """Certified lower bound on log2(m!) from m! >= (m/e)^m."""
    if m < 2:
        raise ValueError("log2_factorial_lower_bound needs m >= 2")
    log2m_lo, _ = log2_bounds(m)
    ln2_lo, _ = ln2_bounds()
    log2e_hi = _ceil_grid(1 / ln2_lo)
    return _floor_grid(m * (log2m_lo - log2e_hi))
