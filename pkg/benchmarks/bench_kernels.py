"""Time the numba and numpy kernel backends on one sector.

    python benchmarks/bench_kernels.py [--L 12] [--n-up 3] [--n-dn 3] [--repeat 5]

The first numba call compiles (or loads the on-disk cache); it is reported
separately and excluded from the timed repeats.
"""

import argparse
import time

import numpy as np

from hubbard_ring import kernels
from hubbard_ring.basis import SectorSpec, enumerate_sector
from hubbard_ring.hamiltonian import ModelParams, build_hamiltonian, ring_bonds


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--L", type=int, default=12)
    p.add_argument("--n-up", type=int, default=3)
    p.add_argument("--n-dn", type=int, default=3)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    spec = SectorSpec(args.L, args.n_up, args.n_dn)
    basis = enumerate_sector(spec)
    L = spec.L
    src, dst, spin, coef = [], [], [], []
    for i, j in ring_bonds(L):
        for s in (0, 1):
            src += [j - 1, i - 1]
            dst += [i - 1, j - 1]
            spin += [s, s]
            coef += [-1.0, -1.0]
    pot = np.linspace(0.0, 1.0, L)
    params = ModelParams()

    cases = {
        "masks": lambda be: kernels.masks_with_popcount(L, spec.n_up, be),
        "hop_coo": lambda be: kernels.hop_coo(basis.up_masks, basis.dn_masks, L, src, dst, spin, coef, be),
        "diagonal": lambda be: kernels.diagonal(basis.up_masks, basis.dn_masks, L, 10.0, pot, be),
        "occupations": lambda be: kernels.occupations(basis.up_masks, L, be),
        "hamiltonian": lambda be: build_hamiltonian(basis, params, be) if L % 2 == 0 and L >= 6 else None,
    }

    print(f"sector L={L} n_up={spec.n_up} n_dn={spec.n_dn} dim={spec.dim}, best of {args.repeat}")
    t0 = time.perf_counter()
    for fn in cases.values():
        fn("numba")
    print(f"numba warm-up (compile or cache load): {time.perf_counter() - t0:.3f}s")
    print(f"{'kernel':12s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, fn in cases.items():
        tn = _time(lambda: fn("numba"), args.repeat)
        tp = _time(lambda: fn("numpy"), args.repeat)
        print(f"{name:12s} {1e3 * tn:11.3f} {1e3 * tp:11.3f} {tp / tn:8.2f}")


if __name__ == "__main__":
    main()
