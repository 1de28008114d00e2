"""Fixed-width integer kernels behind factoring and the order oracle.

Each kernel has a numba ``@njit`` body and a pure-numpy body with the same
signature. The module-level names (``sieve_primes``, ``residues``,
``naive_orders``) are bound to one or the other at import time:

* ``EXPGRAPH_DISABLE_NUMBA=1`` forces the numpy path;
* a missing or broken numba install falls back to numpy silently.

Both paths are always importable under explicit names so tests and the
benchmark can compare them directly.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is installed in CI
    HAVE_NUMBA = False

_FLAG = os.environ.get("EXPGRAPH_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")
BACKEND = "numba" if USE_NUMBA else "numpy"

# residue kernel shifts a partial remainder left by 32 bits; keep p < 2^31
MAX_RESIDUE_PRIME = 1 << 31


def to_limbs(n: int) -> np.ndarray:
    """Big-endian base-2^32 digits of a non-negative int, as int64."""
    if n < 0:
        raise ValueError("to_limbs expects n >= 0")
    nbytes = max(4, -(-n.bit_length() // 32) * 4)
    raw = n.to_bytes(nbytes, "big")
    return np.frombuffer(raw, dtype=">u4").astype(np.int64)


# --------------------------------------------------------------------------
# numpy bodies


def sieve_primes_numpy(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=np.bool_)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, int(limit**0.5) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def residues_numpy(limbs: np.ndarray, primes: np.ndarray) -> np.ndarray:
    acc = np.zeros(primes.shape[0], dtype=np.int64)
    for limb in limbs:
        acc = ((acc << 32) | int(limb)) % primes
    return acc


def naive_orders_numpy(moduli: np.ndarray, bases: np.ndarray) -> np.ndarray:
    r = moduli.astype(np.int64)
    b = bases.astype(np.int64) % r
    out = np.zeros(r.shape[0], dtype=np.int64)
    x = b.copy()
    live = np.ones(r.shape[0], dtype=np.bool_)
    e = 1
    while live.any():
        hit = live & (x == 1)
        out[hit] = e
        live &= ~hit
        # a base that never reaches 1 within r steps is not a unit
        dead = live & (e >= r)
        out[dead] = 0
        live &= ~dead
        x = np.where(live, (x * b) % r, x)
        e += 1
    return out


# --------------------------------------------------------------------------
# numba bodies

if HAVE_NUMBA:

    @njit(cache=True)
    def sieve_primes_numba(limit):
        if limit < 2:
            return np.zeros(0, dtype=np.int64)
        flags = np.ones(limit + 1, dtype=np.bool_)
        flags[0] = False
        flags[1] = False
        p = 2
        while p * p <= limit:
            if flags[p]:
                for k in range(p * p, limit + 1, p):
                    flags[k] = False
            p += 1
        count = 0
        for k in range(limit + 1):
            if flags[k]:
                count += 1
        out = np.empty(count, dtype=np.int64)
        j = 0
        for k in range(limit + 1):
            if flags[k]:
                out[j] = k
                j += 1
        return out

    @njit(cache=True)
    def residues_numba(limbs, primes):
        out = np.empty(primes.shape[0], dtype=np.int64)
        for k in range(primes.shape[0]):
            p = primes[k]
            acc = 0
            for limb in limbs:
                acc = ((acc << 32) | limb) % p
            out[k] = acc
        return out

    @njit(cache=True)
    def naive_orders_numba(moduli, bases):
        out = np.zeros(moduli.shape[0], dtype=np.int64)
        for k in range(moduli.shape[0]):
            r = moduli[k]
            b = bases[k] % r
            x = b
            e = 1
            while x != 1 and e < r:
                x = (x * b) % r
                e += 1
            out[k] = e if x == 1 else 0
        return out

else:  # pragma: no cover
    sieve_primes_numba = sieve_primes_numpy
    residues_numba = residues_numpy
    naive_orders_numba = naive_orders_numpy


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit, ascending int64 array."""
    if USE_NUMBA:
        return sieve_primes_numba(int(limit))
    return sieve_primes_numpy(int(limit))


def residues(n: int, primes: np.ndarray) -> np.ndarray:
    """``n mod p`` for every p in ``primes`` (each p < 2^31)."""
    limbs = to_limbs(n)
    if USE_NUMBA:
        return residues_numba(limbs, primes)
    return residues_numpy(limbs, primes)


def naive_orders(moduli, bases) -> np.ndarray:
    """Least e >= 1 with base^e == 1 (mod modulus), by repeated multiplication.

    Returns 0 where no such e exists below the modulus. Moduli must stay
    below ~3e9 so products fit in int64.
    """
    r = np.ascontiguousarray(moduli, dtype=np.int64)
    b = np.ascontiguousarray(bases, dtype=np.int64)
    if USE_NUMBA:
        return naive_orders_numba(r, b)
    return naive_orders_numpy(r, b)
