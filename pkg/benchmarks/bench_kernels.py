"""Compare the numba and numpy bodies of the hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Both bodies are called directly, so the EXPGRAPH_DISABLE_NUMBA flag does not
matter here. The numba timings exclude the first (compiling) call.
"""
import argparse
import time

import numpy as np

from expgraph import _kernels as K
from expgraph.groups import prime_powers
from expgraph.zsigmondy import cyclotomic_eval


def best_of(fn, repeat):
    fn()  # warm-up / JIT
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        print("numba not importable; only the numpy path is available")
        return

    primes = K.sieve_primes_numpy(10**6)
    targets = [cyclotomic_eval(d, q) for q in prime_powers(2, 1000) for d in (9, 12, 18)][:300]
    limbs = [K.to_limbs(n) for n in targets]
    rng = np.random.default_rng(0)
    small = K.sieve_primes_numpy(10**4)[1:]
    moduli = rng.choice(small, size=10_000)
    bases = rng.integers(2, 10**4, size=10_000)
    keep = bases % moduli != 0
    moduli, bases = moduli[keep], bases[keep]

    cases = [
        ("sieve_primes(1e6)", lambda: K.sieve_primes_numpy(10**6), lambda: K.sieve_primes_numba(10**6)),
        (
            f"residues x{len(limbs)} values",
            lambda: [K.residues_numpy(x, primes) for x in limbs],
            lambda: [K.residues_numba(x, primes) for x in limbs],
        ),
        (
            f"naive_orders x{len(moduli)} pairs",
            lambda: K.naive_orders_numpy(moduli, bases),
            lambda: K.naive_orders_numba(moduli, bases),
        ),
    ]
    print(f"{'kernel':32s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, f_np, f_nb in cases:
        t_np = best_of(f_np, args.repeat)
        t_nb = best_of(f_nb, args.repeat)
        print(f"{name:32s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
